#include "budgetal/theory.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "budgetal/numeric.hpp"

namespace budgetal::theory {

MixtureProblem::MixtureProblem(double p_, double alpha_, ErrorModel model)
    : p(p_), alpha(alpha_), error_model(std::move(model)) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("MixtureProblem: p must be in (0, 1)");
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("MixtureProblem: alpha must be positive");
}

Composition make_composition(double r_rand, double r_low, double r_high) {
    const double sum = r_rand + r_low + r_high;
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("Composition: fractions must sum to 1");
    for (double r : {r_rand, r_low, r_high})
        if (r < -1e-12 || r > 1.0 + 1e-12)
            throw std::invalid_argument("Composition: fractions must lie in [0, 1]");
    if (r_low > 1e-12 && r_high > 1e-12)
        throw std::invalid_argument(
            "Composition: at most one of r_low / r_high may be nonzero");
    return Composition{r_rand, r_low, r_high};
}

double combined_error(const MixtureProblem& problem, double budget, double q) {
    if (!(budget > 0.0))
        throw std::domain_error("combined_error: budget must be positive");
    if (!(q >= 0.0 && q <= 1.0))
        throw std::domain_error("combined_error: q must lie in [0, 1]");
    const ErrorModel& e = problem.error_model;
    return problem.p * e.value(q * budget) +
           (1.0 - problem.p) * e.value(problem.alpha * (1.0 - q) * budget);
}

namespace {

// Same argmin as combined_error but safe against exp underflow at extreme
// budgets: exponential models are scored in log space.
double minimization_objective(const MixtureProblem& problem, double budget,
                              double q) {
    if (!problem.error_model.is_exponential())
        return combined_error(problem, budget, q);
    const double a = problem.error_model.exponent_rate();
    const double x1 = std::log(problem.p) - a * q * budget;
    const double x2 =
        std::log1p(-problem.p) - a * problem.alpha * (1.0 - q) * budget;
    const double m = std::max(x1, x2);
    return m + std::log(std::exp(x1 - m) + std::exp(x2 - m));
}

}  // namespace

namespace {

// Newton refinement of an interior optimum for exponential models, working
// on the derivative of the log objective. Brent localizes a minimum only to
// about sqrt(machine eps); this recovers full precision so that exact
// equilibrium comparisons (|q - p| within 1e-9) are meaningful.
double polish_interior_q(const MixtureProblem& problem, double budget, double q) {
    const double a = problem.error_model.exponent_rate();
    const double b = budget;
    const double alpha = problem.alpha;
    for (int it = 0; it < 4; ++it) {
        const double x1 = std::log(problem.p) - a * q * b;
        const double x2 = std::log1p(-problem.p) - a * alpha * (1.0 - q) * b;
        const double w1 = 1.0 / (1.0 + std::exp(x2 - x1));
        const double w2 = 1.0 - w1;
        if (w1 * w2 < 1e-300) break;
        const double step =
            (w1 - alpha * w2) / (w1 * w2 * a * b * (1.0 + alpha) * (1.0 + alpha));
        const double next = std::clamp(q + step, 0.0, 1.0);
        if (next == q) break;
        q = next;
    }
    return q;
}

}  // namespace

double optimal_q(const MixtureProblem& problem, double budget,
                 const SolverOptions& opts) {
    if (!(budget > 0.0))
        throw std::domain_error("optimal_q: budget must be positive");
    auto objective = [&](double q) {
        return minimization_objective(problem, budget, q);
    };
    auto [q_star, f_star] = brent_minimize(objective, 0.0, 1.0,
                                           0.01 * opts.q_tolerance);
    if (problem.error_model.is_exponential() && q_star > 0.0 && q_star < 1.0) {
        q_star = polish_interior_q(problem, budget, q_star);
        f_star = objective(q_star);
    }
    // The stationary point may fall outside [0, 1]; compare the endpoints.
    // Exact ties keep the polished interior point (flat objectives at
    // degenerate budgets otherwise snap to an arbitrary boundary).
    const double f0 = objective(0.0);
    const double f1 = objective(1.0);
    if (f0 < f_star && f0 <= f1) return 0.0;
    if (f1 < f_star && f1 < f0) return 1.0;
    return q_star;
}

namespace {

std::string describe(const MixtureProblem& problem, double budget_lo,
                     double budget_hi, double target) {
    std::ostringstream os;
    os << "q(B) never crosses " << target << " for B in [" << budget_lo << ", "
       << budget_hi << "] (p=" << problem.p << ", alpha=" << problem.alpha << ")";
    return os.str();
}

// Budget at which the optimal mixture q(B) crosses `level`. q(B) is monotone
// for the models covered here; the direction is read off the range endpoints.
// `prefer_above`: return the last budget with q >= level (vs the first with
// q <= level) so that plateaus from clipping resolve to the stated boundary.
double crossing_budget(const MixtureProblem& problem, double level,
                       bool prefer_above, const SolverOptions& opts) {
    const double lo = opts.budget_search_min;
    const double hi = opts.budget_search_max;
    const double q_lo = optimal_q(problem, lo, opts);
    const double q_hi = optimal_q(problem, hi, opts);
    const double slack = 0.1 * opts.q_tolerance;  // well above solver noise

    auto at_least = [&](double b) { return optimal_q(problem, b, opts) >= level - slack; };
    auto at_most = [&](double b) { return optimal_q(problem, b, opts) <= level + slack; };

    if (q_lo >= level && q_hi <= level) {
        // Decreasing through the level.
        return prefer_above
                   ? bisect_last_true(at_least, lo, hi, opts.budget_rel_tolerance)
                   : bisect_first_true(at_most, lo, hi, opts.budget_rel_tolerance);
    }
    if (q_lo <= level && q_hi >= level) {
        // Increasing through the level.
        return prefer_above
                   ? bisect_first_true(at_least, lo, hi, opts.budget_rel_tolerance)
                   : bisect_last_true(at_most, lo, hi, opts.budget_rel_tolerance);
    }
    throw std::runtime_error("budget_thresholds: " + describe(problem, lo, hi, level));
}

}  // namespace

Thresholds budget_thresholds(const MixtureProblem& problem, double active_fraction,
                             const SolverOptions& opts) {
    if (!(active_fraction > 0.0 && active_fraction <= 1.0))
        throw std::domain_error("budget_thresholds: active fraction must be in (0, 1]");
    const double p = problem.p;
    const double f = active_fraction;

    Thresholds t;
    t.active_fraction = f;
    t.b_eq = crossing_budget(problem, p, true, opts);
    t.b_low = crossing_budget(problem, p + f * (1.0 - p), true, opts);
    t.b_high = crossing_budget(problem, p * (1.0 - f), false, opts);
    if (t.b_low > t.b_eq) std::swap(t.b_low, t.b_eq);
    if (t.b_eq > t.b_high) std::swap(t.b_eq, t.b_high);
    return t;
}

double composition_error(const MixtureProblem& problem, double budget,
                         const Composition& comp) {
    const double q = comp.r_rand * problem.p + comp.r_low;
    return combined_error(problem, budget, q);
}

namespace {

// Composition whose easy-learner share equals q: solves
// q = r_rand p + r_low (or the mirrored high-side equation).
Composition composition_for_share(double q, double p, double tie) {
    if (std::abs(q - p) <= tie) return Composition{1.0, 0.0, 0.0};
    if (q > p) {
        const double r = (q - p) / (1.0 - p);
        return Composition{1.0 - r, r, 0.0};
    }
    const double r = (p - q) / p;
    return Composition{1.0 - r, 0.0, r};
}

}  // namespace

Composition optimal_composition(const MixtureProblem& problem, double budget,
                                const SolverOptions& opts) {
    const double q_hat = optimal_q(problem, budget, opts);
    return composition_for_share(q_hat, problem.p, opts.composition_tie);
}

Composition attainable_composition(const MixtureProblem& problem, double budget,
                                   double active_fraction,
                                   const SolverOptions& opts) {
    if (!(active_fraction > 0.0 && active_fraction <= 1.0))
        throw std::domain_error(
            "attainable_composition: active fraction must be in (0, 1]");
    const double p = problem.p;
    const double f = active_fraction;
    const double q_hat = optimal_q(problem, budget, opts);
    // The active set contributes f of the total; the rest arrived from D.
    // Its own easy-share must be (q_hat - (1 - f) p) / f, clipped to [0, 1].
    const double q_active = std::clamp((q_hat - (1.0 - f) * p) / f, 0.0, 1.0);
    return composition_for_share(q_active, p, opts.composition_tie);
}

double attainable_error(const MixtureProblem& problem, double budget,
                        double active_fraction, const SolverOptions& opts) {
    const Composition active =
        attainable_composition(problem, budget, active_fraction, opts);
    const double f = active_fraction;
    const double q_active = active.r_rand * problem.p + active.r_low;
    const double q_total = (1.0 - f) * problem.p + f * q_active;
    return combined_error(problem, budget, q_total);
}

Composition pure_limit_composition(const MixtureProblem& problem, double budget,
                                   const SolverOptions& opts) {
    const double q_hat = optimal_q(problem, budget, opts);
    if (std::abs(q_hat - problem.p) <= opts.composition_tie)
        return Composition{1.0, 0.0, 0.0};
    if (q_hat > problem.p) return Composition{0.0, 1.0, 0.0};
    return Composition{0.0, 0.0, 1.0};
}

std::vector<IterationRecord> simulate_iterative_querying(
    const MixtureProblem& problem, double total_budget, double segment,
    const SolverOptions& opts) {
    if (!(segment > 0.0) || segment > total_budget)
        throw std::domain_error(
            "simulate_iterative_querying: need 0 < segment <= total budget");

    const double p = problem.p;
    std::vector<IterationRecord> records;

    for (double budget = std::min(segment, total_budget);;
         budget = std::min(budget + segment, total_budget)) {
        IterationRecord rec;
        rec.budget = budget;
        rec.source = pure_limit_composition(problem, budget, opts);

        // Accumulated counts: the base arrived from D, the trailing segment
        // follows the pure rule, split where q(B) crosses p inside it.
        const double chunk = std::min(segment, budget);
        const double base = budget - chunk;
        double easy = p * base;

        const double chunk_lo = base;
        const double chunk_hi = budget;
        // The q solver loses all resolution as B -> 0; clamp the evaluation
        // point of an empty base to a budget the solver can still resolve.
        const double eval_floor = std::min(1e-5, 0.5 * budget);
        const double q_at_lo =
            optimal_q(problem, std::max(chunk_lo, eval_floor), opts);
        const double q_at_hi = optimal_q(problem, chunk_hi, opts);
        const double tie = opts.composition_tie;

        if (std::abs(q_at_lo - p) <= tie && std::abs(q_at_hi - p) <= tie) {
            easy += p * chunk;  // equilibrium throughout: segment from D
        } else if (q_at_lo > p && q_at_hi > p) {
            easy += chunk;      // all-easy segment
        } else if (q_at_lo < p && q_at_hi < p) {
            // all-hard segment: contributes nothing to the easy count
        } else {
            // The crossing lies inside the segment.
            const bool decreasing = q_at_lo > q_at_hi;
            auto easy_side = [&](double b) {
                const double q = optimal_q(problem, std::max(b, eval_floor), opts);
                return decreasing ? q >= p : q <= p;
            };
            const double cross = bisect_last_true(easy_side, chunk_lo, chunk_hi,
                                                  opts.budget_rel_tolerance);
            easy += decreasing ? (cross - chunk_lo) : (chunk_hi - cross);
        }

        rec.error = combined_error(problem, budget, easy / budget);
        records.push_back(rec);
        if (budget >= total_budget) break;
    }
    return records;
}

std::vector<std::pair<double, double>> gain_curve(const MixtureProblem& problem,
                                                  double q,
                                                  const std::vector<double>& budgets) {
    if (budgets.empty())
        throw std::invalid_argument("gain_curve: budget list is empty");
    std::vector<std::pair<double, double>> out;
    out.reserve(budgets.size());
    for (double b : budgets)
        out.emplace_back(b, combined_error(problem, b, problem.p) -
                                combined_error(problem, b, q));
    return out;
}

}  // namespace budgetal::theory
