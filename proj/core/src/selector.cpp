#include "budgetal/selector.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "budgetal/datagen.hpp"
#include "budgetal/rng.hpp"

namespace budgetal::selector {

std::string regime_name(Regime r) {
    switch (r) {
        case Regime::Low: return "low";
        case Regime::Rand: return "rand";
        case Regime::High: return "high";
    }
    return "unknown";
}

void SelectALConfig::validate() const {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("SelectALConfig: epsilon must be in (0, 1)");
    if (rand_repetitions < 1 || cv_repetitions < 1)
        throw std::invalid_argument("SelectALConfig: repetitions must be >= 1");
    if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0))
        throw std::invalid_argument("SelectALConfig: holdout fraction in (0, 1)");
    if (tie_margin < 0.0)
        throw std::invalid_argument("SelectALConfig: tie margin must be >= 0");
    for (auto kind : {restricted_low, restricted_high})
        if (!strategies::is_label_blind(kind))
            throw std::invalid_argument(
                "SelectALConfig: restricted strategy '" +
                strategies::kind_name(kind) +
                "' would read labels or model outputs; only label-blind kinds "
                "may drive the removal test");
}

std::size_t removal_count(double epsilon, std::size_t labeled_count,
                          std::size_t num_classes) {
    if (labeled_count == 0)
        throw std::invalid_argument("removal_count: labeled set is empty");
    if (num_classes == 0)
        throw std::invalid_argument("removal_count: no classes");
    const auto target = static_cast<std::size_t>(
        std::ceil(epsilon * static_cast<double>(labeled_count)));
    return std::max<std::size_t>(target / num_classes, 1);
}

IndexSet perturbation_subset(const Dataset& dataset, const IndexSet& labeled,
                             strategies::StrategyKind kind,
                             std::size_t c_per_class,
                             const strategies::StrategyParams& params,
                             std::uint64_t seed) {
    using strategies::StrategyKind;
    if (!strategies::is_label_blind(kind))
        throw std::invalid_argument("perturbation_subset: '" +
                                    strategies::kind_name(kind) +
                                    "' is not label-blind");
    if (labeled.empty())
        throw std::invalid_argument("perturbation_subset: labeled set is empty");

    IndexSet members = labeled;
    std::sort(members.begin(), members.end());

    // Higher score = removed earlier. Selection-order strategies are run to
    // exhaustion over L (with an empty labeled set) to obtain a full ranking.
    std::vector<double> scores(members.size(), 0.0);
    auto order_to_scores = [&](const IndexSet& order) {
        for (std::size_t pos = 0; pos < order.size(); ++pos) {
            const auto it =
                std::lower_bound(members.begin(), members.end(), order[pos]);
            scores[static_cast<std::size_t>(it - members.begin())] =
                static_cast<double>(order.size() - pos);
        }
    };

    switch (kind) {
        case StrategyKind::Typicality:
        case StrategyKind::InverseTypicality: {
            if (members.size() >= 2) {
                scores = strategies::typicality(dataset, members, params.knn_k);
                if (kind == StrategyKind::InverseTypicality)
                    for (auto& s : scores) s = -s;
            }
            break;
        }
        case StrategyKind::ProbCover: {
            PoolState pool{{}, members};
            const double delta =
                params.delta ? *params.delta
                             : (members.size() >= 2
                                    ? strategies::default_probcover_delta(dataset,
                                                                          members)
                                    : 1.0);
            order_to_scores(
                strategies::probcover_rank_order(dataset, pool, delta));
            break;
        }
        case StrategyKind::CoreSet: {
            order_to_scores(strategies::k_center_greedy(dataset, {}, members,
                                                        members.size()));
            break;
        }
        case StrategyKind::Random: {
            auto rng = make_engine(seed, 7);
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            for (auto& s : scores) s = unif(rng);
            break;
        }
        default:
            throw std::logic_error("perturbation_subset: unhandled kind");
    }
    return datagen::class_balanced_sample(dataset, members, c_per_class, scores,
                                          seed);
}

namespace {

// Stratified holdout of at least one member per class present; the holdout
// size is max(ceil(fraction * |subset|), #classes present).
std::pair<IndexSet, IndexSet> split_holdout(const Dataset& dataset,
                                            const IndexSet& subset,
                                            double holdout_fraction,
                                            std::mt19937_64& rng) {
    std::vector<IndexSet> by_class(dataset.num_classes());
    for (std::size_t idx : subset)
        by_class[static_cast<std::size_t>(dataset.label(idx))].push_back(idx);
    std::size_t present = 0;
    for (const auto& members : by_class)
        if (!members.empty()) ++present;

    const auto want = std::max<std::size_t>(
        static_cast<std::size_t>(
            std::ceil(holdout_fraction * static_cast<double>(subset.size()))),
        present);
    if (want >= subset.size())
        throw std::invalid_argument(
            "evaluate_subset: subset too small for a stratified holdout");

    IndexSet holdout, train;
    // One per class first, then round-robin top-up, largest classes first,
    // never draining the training side completely.
    std::vector<std::size_t> take(by_class.size(), 0);
    std::size_t assigned = 0;
    std::vector<std::size_t> class_order;
    for (std::size_t c = 0; c < by_class.size(); ++c)
        if (!by_class[c].empty()) {
            take[c] = 1;
            ++assigned;
            class_order.push_back(c);
        }
    std::stable_sort(class_order.begin(), class_order.end(),
                     [&](std::size_t a, std::size_t b) {
                         return by_class[a].size() > by_class[b].size();
                     });
    while (assigned < want) {
        bool progressed = false;
        for (std::size_t c : class_order) {
            if (assigned == want) break;
            if (take[c] < by_class[c].size() && subset.size() - assigned > 1) {
                ++take[c];
                ++assigned;
                progressed = true;
            }
        }
        if (!progressed) break;
    }

    for (std::size_t c = 0; c < by_class.size(); ++c) {
        auto members = by_class[c];
        std::shuffle(members.begin(), members.end(), rng);
        for (std::size_t i = 0; i < members.size(); ++i)
            (i < take[c] ? holdout : train).push_back(members[i]);
    }
    std::sort(holdout.begin(), holdout.end());
    std::sort(train.begin(), train.end());
    if (train.empty())
        throw std::invalid_argument("evaluate_subset: holdout left no training data");
    return {train, holdout};
}

}  // namespace

std::vector<double> evaluate_subset_samples(const Dataset& dataset,
                                            const IndexSet& subset,
                                            const learn::LearnerConfig& config,
                                            std::size_t repetitions,
                                            double holdout_fraction,
                                            std::uint64_t seed) {
    if (subset.empty())
        throw std::invalid_argument("evaluate_subset: subset is empty");
    std::vector<double> accs;
    accs.reserve(repetitions);
    for (std::size_t rep = 0; rep < repetitions; ++rep) {
        auto rng = make_engine(seed, 200 + rep);
        auto [train_set, holdout] =
            split_holdout(dataset, subset, holdout_fraction, rng);
        const auto model = learn::train(dataset, train_set, config);
        accs.push_back(learn::accuracy(model, dataset, holdout));
    }
    return accs;
}

MeanSe evaluate_subset(const Dataset& dataset, const IndexSet& subset,
                       const learn::LearnerConfig& config, std::size_t repetitions,
                       double holdout_fraction, std::uint64_t seed) {
    return mean_and_se(evaluate_subset_samples(dataset, subset, config,
                                               repetitions, holdout_fraction,
                                               seed));
}

Regime regime_from_stats(const RegimeDecision& stats, double tie_margin) {
    Regime winner = Regime::Rand;
    double best = stats.acc_rand;
    if (stats.acc_low < best) {
        best = stats.acc_low;
        winner = Regime::Low;
    }
    if (stats.acc_high < best) {
        best = stats.acc_high;
        winner = Regime::High;
    }
    if (winner == Regime::Rand) return winner;
    const double se_winner = winner == Regime::Low ? stats.se_low : stats.se_high;
    const double se_comb =
        std::sqrt(se_winner * se_winner + stats.se_rand * stats.se_rand);
    if (stats.acc_rand - best <= tie_margin * se_comb) return Regime::Rand;
    return winner;
}

RegimeDecision decide_regime(const Dataset& dataset, const IndexSet& labeled,
                             const SelectALConfig& config, std::uint64_t seed) {
    config.validate();
    if (labeled.size() < 2 * dataset.num_classes())
        throw std::invalid_argument(
            "decide_regime: need at least two labeled examples per class");

    const std::size_t c =
        removal_count(config.epsilon, labeled.size(), dataset.num_classes());

    auto subset_minus = [&](const IndexSet& removed) {
        IndexSet rest;
        rest.reserve(labeled.size() - removed.size());
        std::set_difference(labeled.begin(), labeled.end(), removed.begin(),
                            removed.end(), std::back_inserter(rest));
        return rest;
    };

    IndexSet sorted_labeled = labeled;
    std::sort(sorted_labeled.begin(), sorted_labeled.end());

    const auto removed_low =
        perturbation_subset(dataset, sorted_labeled, config.restricted_low, c,
                            config.params, derive_seed(seed, 11));
    const auto removed_high =
        perturbation_subset(dataset, sorted_labeled, config.restricted_high, c,
                            config.params, derive_seed(seed, 12));

    RegimeDecision decision;
    decision.c_per_class = c;

    const auto low_stats =
        evaluate_subset(dataset, subset_minus(removed_low), config.learner,
                        config.cv_repetitions, config.holdout_fraction,
                        derive_seed(seed, 21));
    const auto high_stats =
        evaluate_subset(dataset, subset_minus(removed_high), config.learner,
                        config.cv_repetitions, config.holdout_fraction,
                        derive_seed(seed, 22));

    std::vector<double> rand_accs;
    rand_accs.reserve(config.rand_repetitions * config.cv_repetitions);
    for (std::size_t r = 0; r < config.rand_repetitions; ++r) {
        const auto removed_rand = perturbation_subset(
            dataset, sorted_labeled, strategies::StrategyKind::Random, c,
            config.params, derive_seed(seed, 300 + r));
        const auto samples = evaluate_subset_samples(
            dataset, subset_minus(removed_rand), config.learner,
            config.cv_repetitions, config.holdout_fraction,
            derive_seed(seed, 400 + r));
        rand_accs.insert(rand_accs.end(), samples.begin(), samples.end());
    }
    const auto rand_stats = mean_and_se(rand_accs);

    decision.acc_low = low_stats.mean;
    decision.se_low = low_stats.se;
    decision.acc_high = high_stats.mean;
    decision.se_high = high_stats.se;
    decision.acc_rand = rand_stats.mean;
    decision.se_rand = rand_stats.se;
    decision.regime = regime_from_stats(decision, config.tie_margin);
    return decision;
}

strategies::StrategyKind select_strategy(const RegimeDecision& decision,
                                         const SelectALConfig& config) {
    switch (decision.regime) {
        case Regime::Low: return config.dispatch_low;
        case Regime::Rand: return config.dispatch_rand;
        case Regime::High: return config.dispatch_high;
    }
    throw std::logic_error("select_strategy: unhandled regime");
}

}  // namespace budgetal::selector
