#include "budgetal/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "budgetal/csv_io.hpp"
#include "budgetal/datagen.hpp"
#include "budgetal/numeric.hpp"
#include "budgetal/rng.hpp"

namespace budgetal::harness {

using nlohmann::json;

Dataset make_dataset(const DatasetSpec& spec) {
    switch (spec.kind) {
        case DatasetSpec::Kind::TwoRegime:
            return datagen::make_two_regime_mixture(spec.mix_p, spec.n, spec.dim,
                                                    spec.easy_separation,
                                                    spec.hard_separation,
                                                    spec.data_seed);
        case DatasetSpec::Kind::Gaussian:
            return datagen::make_gaussian_mixture(spec.num_classes, spec.per_class,
                                                  spec.dim, spec.separation,
                                                  spec.data_seed);
        case DatasetSpec::Kind::Csv:
            return datagen::load_csv(spec.csv_path);
    }
    throw std::logic_error("make_dataset: unhandled dataset kind");
}

namespace {

// Stratified split: roughly `fraction` of every class goes to the first set.
std::pair<IndexSet, IndexSet> stratified_split(const Dataset& dataset,
                                               double fraction,
                                               std::mt19937_64& rng) {
    std::vector<IndexSet> by_class(dataset.num_classes());
    for (std::size_t i = 0; i < dataset.size(); ++i)
        by_class[static_cast<std::size_t>(dataset.label(i))].push_back(i);
    IndexSet first, second;
    for (auto& members : by_class) {
        std::shuffle(members.begin(), members.end(), rng);
        const auto cut = static_cast<std::size_t>(
            std::ceil(fraction * static_cast<double>(members.size())));
        for (std::size_t i = 0; i < members.size(); ++i)
            (i < cut ? first : second).push_back(members[i]);
    }
    std::sort(first.begin(), first.end());
    std::sort(second.begin(), second.end());
    return {first, second};
}

// Class-balanced initial labels: count / C per class, remainder to the
// lowest class ids.
IndexSet initial_labels(const Dataset& dataset, const IndexSet& pool,
                        std::size_t count, std::mt19937_64& rng) {
    std::vector<IndexSet> by_class(dataset.num_classes());
    for (std::size_t idx : pool)
        by_class[static_cast<std::size_t>(dataset.label(idx))].push_back(idx);
    const std::size_t base = count / dataset.num_classes();
    std::size_t remainder = count % dataset.num_classes();
    IndexSet chosen;
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        std::size_t want = base + (remainder > 0 ? 1 : 0);
        if (remainder > 0) --remainder;
        if (want > by_class[c].size())
            throw std::invalid_argument(
                "run_al_loop: class " + std::to_string(c) +
                " is too small for the requested initial labeled set");
        std::shuffle(by_class[c].begin(), by_class[c].end(), rng);
        chosen.insert(chosen.end(), by_class[c].begin(),
                      by_class[c].begin() + static_cast<std::ptrdiff_t>(want));
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

IndexSet set_minus(const IndexSet& a, const IndexSet& b) {
    IndexSet out;
    out.reserve(a.size());
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
    return out;
}

IndexSet set_union(const IndexSet& a, const IndexSet& b) {
    IndexSet out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                   std::back_inserter(out));
    return out;
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::vector<RoundRecord> run_al_loop(const ExperimentConfig& config) {
    if (config.strategy.use_selectal) config.strategy.selectal.validate();
    const Dataset dataset = make_dataset(config.dataset);
    if (!(config.test_fraction > 0.0 && config.test_fraction < 1.0))
        throw std::invalid_argument("run_al_loop: test fraction must be in (0, 1)");

    std::vector<RoundRecord> records;
    for (std::uint64_t seed : config.seeds) {
        auto split_rng = make_engine(seed, 30);
        auto [test_set, pool] =
            stratified_split(dataset, config.test_fraction, split_rng);
        if (config.initial_labeled + config.rounds * config.batch > pool.size())
            throw std::invalid_argument(
                "run_al_loop: budget schedule exhausts the training pool");

        auto init_rng = make_engine(seed, 31);
        IndexSet labeled =
            initial_labels(dataset, pool, config.initial_labeled, init_rng);
        IndexSet unlabeled = set_minus(pool, labeled);

        auto model = learn::train(dataset, labeled, config.learner);
        RoundRecord base;
        base.seed = seed;
        base.round = 0;
        base.budget = labeled.size();
        base.strategy = config.strategy.name();
        base.dispatched = "";
        base.accuracy = learn::accuracy(model, dataset, test_set);
        records.push_back(base);

        for (std::size_t round = 1; round <= config.rounds; ++round) {
            RoundRecord rec;
            rec.seed = seed;
            rec.round = round;
            rec.strategy = config.strategy.name();

            strategies::StrategyKind kind = config.strategy.kind;
            if (config.strategy.use_selectal) {
                const auto decision = selector::decide_regime(
                    dataset, labeled, config.strategy.selectal,
                    derive_seed(seed, 1000 + round));
                kind = selector::select_strategy(decision,
                                                 config.strategy.selectal);
                rec.decision = decision;
            }
            rec.dispatched = strategies::kind_name(kind);

            strategies::StrategyParams params = config.params;
            params.seed = derive_seed(seed, 2000 + round);
            strategies::QueryContext ctx{dataset, PoolState{labeled, unlabeled},
                                         &model, params};
            const auto active = strategies::select(kind, ctx, config.batch);

            labeled = set_union(labeled, active);
            unlabeled = set_minus(unlabeled, active);
            model = learn::train(dataset, labeled, config.learner);

            rec.budget = labeled.size();
            rec.accuracy = learn::accuracy(model, dataset, test_set);
            records.push_back(std::move(rec));
        }
    }
    return records;
}

std::vector<RemovalPoint> run_removal_experiment(
    const ExperimentConfig& config, const std::vector<std::size_t>& budgets,
    double epsilon) {
    const auto& sel = config.strategy.selectal;
    sel.validate();
    const Dataset dataset = make_dataset(config.dataset);

    std::vector<RemovalPoint> points;
    for (std::size_t budget : budgets) {
        if (budget < 2 * dataset.num_classes())
            throw std::invalid_argument(
                "run_removal_experiment: budget must be >= 2 per class");
        std::vector<double> gains_low, gains_high;
        for (std::uint64_t seed : config.seeds) {
            auto split_rng = make_engine(seed, 30);
            auto [test_set, pool] =
                stratified_split(dataset, config.test_fraction, split_rng);
            if (budget > pool.size())
                throw std::invalid_argument(
                    "run_removal_experiment: budget exceeds the training pool");

            // First-round setting: L is drawn from the data distribution.
            // Draws missing a class are rejected so the removal arithmetic
            // stays defined at tiny budgets.
            IndexSet labeled;
            for (std::uint64_t attempt = 0;; ++attempt) {
                if (attempt == 100)
                    throw std::runtime_error(
                        "run_removal_experiment: could not draw a labeled set "
                        "containing every class");
                auto rng = make_engine(seed, 5000 + attempt);
                labeled = sample_without_replacement(pool, budget, rng);
                std::sort(labeled.begin(), labeled.end());
                std::vector<bool> seen(dataset.num_classes(), false);
                for (std::size_t idx : labeled)
                    seen[static_cast<std::size_t>(dataset.label(idx))] = true;
                if (std::all_of(seen.begin(), seen.end(),
                                [](bool b) { return b; }))
                    break;
            }

            const std::size_t c =
                selector::removal_count(epsilon, labeled.size(),
                                        dataset.num_classes());
            auto train_minus = [&](const IndexSet& removed) {
                return set_minus(labeled, removed);
            };
            auto test_acc = [&](const IndexSet& subset) {
                const auto model = learn::train(dataset, subset, config.learner);
                return learn::accuracy(model, dataset, test_set);
            };

            const double acc_low = test_acc(train_minus(selector::perturbation_subset(
                dataset, labeled, sel.restricted_low, c, sel.params,
                derive_seed(seed, 11))));
            const double acc_high = test_acc(train_minus(selector::perturbation_subset(
                dataset, labeled, sel.restricted_high, c, sel.params,
                derive_seed(seed, 12))));

            std::vector<double> rand_accs;
            for (std::size_t r = 0; r < sel.rand_repetitions; ++r)
                rand_accs.push_back(test_acc(train_minus(
                    selector::perturbation_subset(dataset, labeled,
                                                  strategies::StrategyKind::Random,
                                                  c, sel.params,
                                                  derive_seed(seed, 300 + r)))));
            const double acc_rand = mean_and_se(rand_accs).mean;

            gains_low.push_back(acc_low - acc_rand);
            gains_high.push_back(acc_high - acc_rand);
        }
        const auto low = mean_and_se(gains_low);
        const auto high = mean_and_se(gains_high);
        points.push_back(RemovalPoint{budget, low.mean, low.se, high.mean, high.se});
    }
    return points;
}

std::vector<AggregateRow> aggregate(const std::vector<RoundRecord>& records) {
    if (records.empty()) throw std::invalid_argument("aggregate: no records");
    std::map<std::pair<std::string, std::size_t>, std::vector<double>> groups;
    for (const auto& rec : records)
        groups[{rec.strategy, rec.round}].push_back(rec.accuracy);
    std::vector<AggregateRow> rows;
    rows.reserve(groups.size());
    for (auto& [key, accs] : groups) {
        std::sort(accs.begin(), accs.end());  // permutation invariance
        const auto stats = mean_and_se(accs);
        rows.push_back(AggregateRow{key.first, key.second, stats.mean, stats.se,
                                    accs.size() == 1});
    }
    return rows;
}

void emit_records_csv(const std::vector<RoundRecord>& records,
                      const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << "seed,round,budget,strategy,regime,accuracy\n";
    for (const auto& rec : records) {
        const std::string regime =
            rec.decision ? selector::regime_name(rec.decision->regime) : "";
        out << rec.seed << "," << rec.round << "," << rec.budget << ","
            << rec.strategy << "," << regime << "," << fmt_double(rec.accuracy)
            << "\n";
    }
    if (!out) throw std::runtime_error(path + ": write failed");
}

namespace {

json config_to_json(const ExperimentConfig& config) {
    json j;
    switch (config.dataset.kind) {
        case DatasetSpec::Kind::TwoRegime:
            j["dataset"] = {{"kind", "two-regime"},
                            {"p", config.dataset.mix_p},
                            {"n", config.dataset.n},
                            {"dim", config.dataset.dim},
                            {"easy_separation", config.dataset.easy_separation},
                            {"hard_separation", config.dataset.hard_separation},
                            {"data_seed", config.dataset.data_seed}};
            break;
        case DatasetSpec::Kind::Gaussian:
            j["dataset"] = {{"kind", "gaussian"},
                            {"classes", config.dataset.num_classes},
                            {"per_class", config.dataset.per_class},
                            {"dim", config.dataset.dim},
                            {"separation", config.dataset.separation},
                            {"data_seed", config.dataset.data_seed}};
            break;
        case DatasetSpec::Kind::Csv:
            j["dataset"] = {{"kind", "csv"}, {"path", config.dataset.csv_path}};
            break;
    }
    j["strategy"] = config.strategy.name();
    j["initial_labeled"] = config.initial_labeled;
    j["rounds"] = config.rounds;
    j["batch"] = config.batch;
    j["test_fraction"] = config.test_fraction;
    j["seeds"] = config.seeds;
    j["learner"] = {{"learning_rate", config.learner.learning_rate},
                    {"epochs", config.learner.epochs},
                    {"l2_penalty", config.learner.l2_penalty}};
    if (config.strategy.use_selectal) {
        const auto& sel = config.strategy.selectal;
        j["selectal"] = {
            {"epsilon", sel.epsilon},
            {"rand_repetitions", sel.rand_repetitions},
            {"cv_repetitions", sel.cv_repetitions},
            {"holdout_fraction", sel.holdout_fraction},
            {"tie_margin", sel.tie_margin},
            {"restricted_low", strategies::kind_name(sel.restricted_low)},
            {"restricted_high", strategies::kind_name(sel.restricted_high)},
            {"dispatch_low", strategies::kind_name(sel.dispatch_low)},
            {"dispatch_rand", strategies::kind_name(sel.dispatch_rand)},
            {"dispatch_high", strategies::kind_name(sel.dispatch_high)},
        };
    }
    return j;
}

json decision_to_json(const selector::RegimeDecision& d) {
    return json{{"regime", selector::regime_name(d.regime)},
                {"acc_low", d.acc_low},   {"se_low", d.se_low},
                {"acc_high", d.acc_high}, {"se_high", d.se_high},
                {"acc_rand", d.acc_rand}, {"se_rand", d.se_rand},
                {"c_per_class", d.c_per_class}};
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << text;
    if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace

void emit_records_json(const std::vector<RoundRecord>& records,
                       const ExperimentConfig& config, const std::string& path) {
    json j;
    j["config"] = config_to_json(config);
    j["records"] = json::array();
    for (const auto& rec : records) {
        json r = {{"seed", rec.seed},
                  {"round", rec.round},
                  {"budget", rec.budget},
                  {"strategy", rec.strategy},
                  {"regime", rec.decision
                                 ? selector::regime_name(rec.decision->regime)
                                 : ""},
                  {"accuracy", rec.accuracy}};
        if (!rec.dispatched.empty()) r["dispatched"] = rec.dispatched;
        if (rec.decision) r["decision"] = decision_to_json(*rec.decision);
        j["records"].push_back(std::move(r));
    }
    write_text(path, j.dump(2) + "\n");
}

void emit_removal_csv(const std::vector<RemovalPoint>& points,
                      const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << "budget,gain_low,se_low,gain_high,se_high\n";
    for (const auto& p : points)
        out << p.budget << "," << fmt_double(p.gain_low) << ","
            << fmt_double(p.se_low) << "," << fmt_double(p.gain_high) << ","
            << fmt_double(p.se_high) << "\n";
    if (!out) throw std::runtime_error(path + ": write failed");
}

void emit_removal_json(const std::vector<RemovalPoint>& points,
                       const ExperimentConfig& config, const std::string& path) {
    json j;
    j["config"] = config_to_json(config);
    j["points"] = json::array();
    for (const auto& p : points)
        j["points"].push_back({{"budget", p.budget},
                               {"gain_low", p.gain_low},
                               {"se_low", p.se_low},
                               {"gain_high", p.gain_high},
                               {"se_high", p.se_high}});
    write_text(path, j.dump(2) + "\n");
}

void emit_series_csv(const std::vector<Series>& series, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << "series,x,y\n";
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i)
            out << s.name << "," << fmt_double(s.x[i]) << "," << fmt_double(s.y[i])
                << "\n";
    if (!out) throw std::runtime_error(path + ": write failed");
}

void emit_series_json(const std::vector<Series>& series,
                      const std::string& header_json, const std::string& path) {
    json j = header_json.empty() ? json::object() : json::parse(header_json);
    j["series"] = json::array();
    for (const auto& s : series)
        j["series"].push_back({{"name", s.name}, {"x", s.x}, {"y", s.y}});
    write_text(path, j.dump(2) + "\n");
}

std::vector<RoundRecord> parse_records_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open for reading");
    std::string line;
    if (!std::getline(in, line) || line != "seed,round,budget,strategy,regime,accuracy")
        throw std::runtime_error(path + ": unexpected record header");
    std::vector<RoundRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        RoundRecord rec;
        std::getline(ss, cell, ',');
        rec.seed = std::stoull(cell);
        std::getline(ss, cell, ',');
        rec.round = std::stoul(cell);
        std::getline(ss, cell, ',');
        rec.budget = std::stoul(cell);
        std::getline(ss, rec.strategy, ',');
        std::getline(ss, cell, ',');  // regime column: not reconstructed
        std::getline(ss, cell, ',');
        rec.accuracy = std::stod(cell);
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace budgetal::harness
