#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "budgetal/dataset.hpp"
#include "budgetal/learner.hpp"
#include "budgetal/selector.hpp"
#include "budgetal/strategies.hpp"

namespace budgetal::harness {

/// Where the data comes from: a generator (seeded) or a CSV file.
struct DatasetSpec {
    enum class Kind { TwoRegime, Gaussian, Csv };
    Kind kind = Kind::TwoRegime;

    // two-regime generator
    double mix_p = 0.5;
    std::size_t n = 2000;
    double easy_separation = 10.0;
    double hard_separation = 0.5;

    // gaussian generator
    std::size_t num_classes = 2;
    std::size_t per_class = 500;
    double separation = 6.0;

    std::size_t dim = 2;
    std::uint64_t data_seed = 1;
    std::string csv_path;
};

Dataset make_dataset(const DatasetSpec& spec);

/// Either a fixed query strategy for every round, or the adaptive selector.
struct StrategySpec {
    bool use_selectal = false;
    strategies::StrategyKind kind = strategies::StrategyKind::Random;
    selector::SelectALConfig selectal;

    std::string name() const {
        return use_selectal ? "selectal" : strategies::kind_name(kind);
    }
};

struct ExperimentConfig {
    DatasetSpec dataset;
    std::size_t initial_labeled = 8;
    std::size_t rounds = 8;
    std::size_t batch = 40;
    StrategySpec strategy;
    learn::LearnerConfig learner;
    strategies::StrategyParams params;
    double test_fraction = 0.3;
    std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
};

/// One measurement: round 0 is the state after initial labeling, round k the
/// state after the k-th query batch, so budget = initial + k * batch.
struct RoundRecord {
    std::uint64_t seed = 0;
    std::size_t round = 0;
    std::size_t budget = 0;
    std::string strategy;                     // run-level strategy name
    std::string dispatched;                   // kind actually queried this round
    std::optional<selector::RegimeDecision> decision;  // selectal rounds only
    double accuracy = 0.0;
};

std::vector<RoundRecord> run_al_loop(const ExperimentConfig& config);

/// One budget on the removal curves: mean paired gains
///   gain_low  = acc(train \ restricted-low removal)  - acc(train \ random removal)
///   gain_high = acc(train \ restricted-high removal) - acc(train \ random removal)
/// over the seed set, with their standard errors.
struct RemovalPoint {
    std::size_t budget = 0;
    double gain_low = 0.0, se_low = 0.0;
    double gain_high = 0.0, se_high = 0.0;
};

std::vector<RemovalPoint> run_removal_experiment(const ExperimentConfig& config,
                                                 const std::vector<std::size_t>& budgets,
                                                 double epsilon);

struct AggregateRow {
    std::string strategy;
    std::size_t round = 0;
    double mean = 0.0;
    double se = 0.0;
    bool single_seed = false;
};

/// Per-(strategy, round) mean and standard error over seeds, sorted by
/// (strategy, round); permutation invariant in the record order.
std::vector<AggregateRow> aggregate(const std::vector<RoundRecord>& records);

/// A named (x, y) series, the plot-ready form of the theory curves.
struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

// All emitters write UTF-8 with '\n' newlines and enough digits for exact
// round trips; identical inputs produce byte-identical files.
void emit_records_csv(const std::vector<RoundRecord>& records,
                      const std::string& path);
void emit_records_json(const std::vector<RoundRecord>& records,
                       const ExperimentConfig& config, const std::string& path);
void emit_removal_csv(const std::vector<RemovalPoint>& points,
                      const std::string& path);
void emit_removal_json(const std::vector<RemovalPoint>& points,
                       const ExperimentConfig& config, const std::string& path);
void emit_series_csv(const std::vector<Series>& series, const std::string& path);
void emit_series_json(const std::vector<Series>& series,
                      const std::string& header_json, const std::string& path);

std::vector<RoundRecord> parse_records_csv(const std::string& path);

}  // namespace budgetal::harness
