#pragma once

#include <cstdint>
#include <vector>

#include "budgetal/dataset.hpp"
#include "budgetal/learner.hpp"
#include "budgetal/numeric.hpp"
#include "budgetal/strategies.hpp"

namespace budgetal::selector {

enum class Regime { Low, Rand, High };

std::string regime_name(Regime r);

struct SelectALConfig {
    double epsilon = 0.05;            // removal fraction of |L|
    std::size_t rand_repetitions = 5; // R: independent random removals
    std::size_t cv_repetitions = 10;  // V: holdout repetitions per subset
    double holdout_fraction = 0.01;   // of the evaluated subset, floored at C
    double tie_margin = 1.0;          // in standard errors; ties go to Rand

    // Restricted strategies drive the removals and may not read labels or
    // model outputs; validate() rejects anything else.
    strategies::StrategyKind restricted_low = strategies::StrategyKind::Typicality;
    strategies::StrategyKind restricted_high =
        strategies::StrategyKind::InverseTypicality;

    strategies::StrategyKind dispatch_low = strategies::StrategyKind::ProbCover;
    strategies::StrategyKind dispatch_rand = strategies::StrategyKind::Random;
    strategies::StrategyKind dispatch_high = strategies::StrategyKind::Badge;

    strategies::StrategyParams params;
    learn::LearnerConfig learner;

    void validate() const;
};

struct RegimeDecision {
    Regime regime = Regime::Rand;
    double acc_low = 0.0, acc_high = 0.0, acc_rand = 0.0;
    double se_low = 0.0, se_high = 0.0, se_rand = 0.0;
    std::size_t c_per_class = 0;
};

/// Removal budget per class: epsilon of |L| rounded up, split over classes,
/// never less than one point per class.
std::size_t removal_count(double epsilon, std::size_t labeled_count,
                          std::size_t num_classes);

/// The subset a restricted strategy would take away from L: the strategy
/// ranks L's members with L itself acting as the unlabeled pool (and an
/// empty labeled set), then the top c per class are taken using L's labels.
IndexSet perturbation_subset(const Dataset& dataset, const IndexSet& labeled,
                             strategies::StrategyKind kind,
                             std::size_t c_per_class,
                             const strategies::StrategyParams& params,
                             std::uint64_t seed);

/// Repeated stratified-holdout accuracy of a learner trained on `subset`:
/// V rounds of train-on-rest / evaluate-on-holdout.
std::vector<double> evaluate_subset_samples(const Dataset& dataset,
                                            const IndexSet& subset,
                                            const learn::LearnerConfig& config,
                                            std::size_t repetitions,
                                            double holdout_fraction,
                                            std::uint64_t seed);

MeanSe evaluate_subset(const Dataset& dataset, const IndexSet& subset,
                       const learn::LearnerConfig& config, std::size_t repetitions,
                       double holdout_fraction, std::uint64_t seed);

/// The argmin-accuracy rule with the conservative tie handling: if the
/// winner's mean is within tie_margin combined standard errors of the random
/// baseline, the decision is Rand.
Regime regime_from_stats(const RegimeDecision& stats, double tie_margin);

/// The full decision: build the three perturbed subsets, score each with
/// repeated holdouts (pooling the R random removals), and pick the regime
/// whose removal hurt most.
RegimeDecision decide_regime(const Dataset& dataset, const IndexSet& labeled,
                             const SelectALConfig& config, std::uint64_t seed);

strategies::StrategyKind select_strategy(const RegimeDecision& decision,
                                         const SelectALConfig& config);

}  // namespace budgetal::selector
