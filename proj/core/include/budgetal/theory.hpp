#pragma once

#include <vector>

#include "budgetal/error_model.hpp"

namespace budgetal::theory {

/// A two-population learning problem: examples arrive from the easy
/// population with probability p, and an example routed to the hard learner
/// is worth a factor alpha of an easy one (its error term is E(alpha * n)).
struct MixtureProblem {
    double p;
    double alpha;
    ErrorModel error_model;

    MixtureProblem(double p_, double alpha_, ErrorModel model);
};

/// Sampling fractions over {natural mixture D, easy-only, hard-only}.
/// Sums to 1; at most one of r_low / r_high is nonzero.
struct Composition {
    double r_rand = 1.0;
    double r_low = 0.0;
    double r_high = 0.0;
};

Composition make_composition(double r_rand, double r_low, double r_high);

/// Budget transition points for a given active-set fraction f = |A| / B.
struct Thresholds {
    double b_low = 0.0;
    double b_eq = 0.0;
    double b_high = 0.0;
    double active_fraction = 0.0;
};

/// Tolerances and search ranges for the scalar solvers. Defaults match the
/// documented contracts; everything is overridable.
struct SolverOptions {
    double q_tolerance = 1e-6;        // accuracy of the optimal mixture q
    double budget_rel_tolerance = 1e-6;
    double budget_search_min = 1e-3;
    double budget_search_max = 1e9;
    double composition_tie = 1e-9;    // |q - p| below this counts as random
};

/// Mean generalization error of a mixed strategy: q B examples go to the
/// easy learner and (1 - q) B to the hard one,
///   E_L(B, q) = p E(q B) + (1 - p) E(alpha (1 - q) B).
double combined_error(const MixtureProblem& problem, double budget, double q);

/// The q in [0, 1] minimizing combined_error at this budget (bracketed
/// minimization with explicit endpoint comparison).
double optimal_q(const MixtureProblem& problem, double budget,
                 const SolverOptions& opts = {});

/// Transition budgets for active-set fraction f in (0, 1]:
///   b_eq   : optimal_q(B) == p (querying from D is optimal),
///   b_low  : largest B with optimal_q(B) >= p + f (1 - p)  (query all-easy),
///   b_high : smallest B with optimal_q(B) <= p (1 - f)     (query all-hard).
/// Throws std::runtime_error when a level is never crossed inside
/// [budget_search_min, budget_search_max].
Thresholds budget_thresholds(const MixtureProblem& problem, double active_fraction,
                             const SolverOptions& opts = {});

/// Error of a training set with the given composition at this budget.
double composition_error(const MixtureProblem& problem, double budget,
                         const Composition& comp);

/// Optimal composition of the whole training set (unconstrained).
Composition optimal_composition(const MixtureProblem& problem, double budget,
                                const SolverOptions& opts = {});

/// Best composition of the active set alone, when the other (1 - f) B
/// examples arrived from D. Equals the five-case clipping of the optimal
/// composition to what an active set of fraction f can realize.
Composition attainable_composition(const MixtureProblem& problem, double budget,
                                   double active_fraction,
                                   const SolverOptions& opts = {});

/// Error of the full training set when the active set uses
/// attainable_composition and the rest came from D.
double attainable_error(const MixtureProblem& problem, double budget,
                        double active_fraction, const SolverOptions& opts = {});

/// Limit of the attainable composition as the active set shrinks: pure easy
/// below the equilibrium budget, D at it, pure hard above it.
Composition pure_limit_composition(const MixtureProblem& problem, double budget,
                                   const SolverOptions& opts = {});

struct IterationRecord {
    double budget = 0.0;       // total labels after this step
    Composition source;        // where this step's segment was drawn from
    double error = 0.0;        // error of the resulting training set
};

/// Incremental query selection: the budget grows in segments of length m.
/// At each visited budget B_k the base of B_k - m examples is drawn from D
/// (the first-round setting) and the trailing segment is allocated by the
/// pure limit rule, splitting at the equilibrium budget when the segment
/// straddles it. Error is computed from the accumulated per-learner counts.
std::vector<IterationRecord> simulate_iterative_querying(
    const MixtureProblem& problem, double total_budget, double segment,
    const SolverOptions& opts = {});

/// (budget, gain) pairs where gain(B) = E_L(B, p) - E_L(B, q): positive when
/// the mixed strategy q beats drawing from D.
std::vector<std::pair<double, double>> gain_curve(const MixtureProblem& problem,
                                                  double q,
                                                  const std::vector<double>& budgets);

}  // namespace budgetal::theory
