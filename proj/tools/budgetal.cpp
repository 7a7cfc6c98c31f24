// Command line for the budget-aware active-learning toolkit: exact mixture
// solver (`theory`), pool-based AL simulation (`simulate`), the standalone
// regime decision on a labeled CSV (`decide`), and the removal-curve
// experiment (`removal`).

#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "budgetal/csv_io.hpp"
#include "budgetal/harness.hpp"
#include "budgetal/selector.hpp"
#include "budgetal/strategies.hpp"
#include "budgetal/theory.hpp"

namespace {

using namespace budgetal;

struct CommonFlags {
    std::uint64_t seed = 0;
    std::string out;
    std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--seed", flags.seed, "Base RNG seed")
        ->envname("BUDGETAL_SEED");
    cmd->add_option("--out", flags.out, "Output file path");
    cmd->add_option("--format", flags.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));
}

void add_dataset_flags(CLI::App* cmd, harness::DatasetSpec& spec,
                       std::string& dataset_name) {
    cmd->add_option("--dataset", dataset_name,
                    "two-regime, gaussian, or a path to a CSV file");
    cmd->add_option("--n", spec.n, "Two-regime sample count");
    cmd->add_option("--dim", spec.dim, "Feature dimension");
    cmd->add_option("--p-mix", spec.mix_p, "Easy-regime probability");
    cmd->add_option("--easy-sep", spec.easy_separation, "Easy cluster separation");
    cmd->add_option("--hard-sep", spec.hard_separation, "Hard cluster separation");
    cmd->add_option("--classes", spec.num_classes, "Gaussian mixture classes");
    cmd->add_option("--per-class", spec.per_class, "Gaussian points per class");
    cmd->add_option("--separation", spec.separation, "Gaussian mean radius");
    cmd->add_option("--data-seed", spec.data_seed, "Generator seed");
}

void resolve_dataset(harness::DatasetSpec& spec, const std::string& name) {
    if (name == "two-regime" || name.empty())
        spec.kind = harness::DatasetSpec::Kind::TwoRegime;
    else if (name == "gaussian")
        spec.kind = harness::DatasetSpec::Kind::Gaussian;
    else {
        spec.kind = harness::DatasetSpec::Kind::Csv;
        spec.csv_path = name;
    }
}

void add_learner_flags(CLI::App* cmd, learn::LearnerConfig& cfg) {
    cmd->add_option("--lr", cfg.learning_rate, "Learner step size");
    cmd->add_option("--epochs", cfg.epochs, "Gradient descent epochs");
    cmd->add_option("--l2", cfg.l2_penalty, "L2 penalty");
}

void add_selectal_flags(CLI::App* cmd, selector::SelectALConfig& cfg,
                        double* epsilon_target = nullptr) {
    cmd->add_option("--epsilon", epsilon_target ? *epsilon_target : cfg.epsilon,
                    "Removal fraction of |L|");
    cmd->add_option("--rand-reps", cfg.rand_repetitions, "Random removal repetitions");
    cmd->add_option("--cv-reps", cfg.cv_repetitions, "Holdout repetitions");
    cmd->add_option("--holdout", cfg.holdout_fraction, "Holdout fraction");
    cmd->add_option("--tie-margin", cfg.tie_margin, "Tie margin in standard errors");
    cmd->add_option("--s-prime-low", cfg.restricted_low,
                    "Restricted low-budget strategy")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, strategies::StrategyKind>{
                {"typicality", strategies::StrategyKind::Typicality},
                {"inverse-typicality", strategies::StrategyKind::InverseTypicality},
                {"probcover", strategies::StrategyKind::ProbCover},
                {"coreset", strategies::StrategyKind::CoreSet},
                {"random", strategies::StrategyKind::Random}}));
    cmd->add_option("--s-prime-high", cfg.restricted_high,
                    "Restricted high-budget strategy")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, strategies::StrategyKind>{
                {"typicality", strategies::StrategyKind::Typicality},
                {"inverse-typicality", strategies::StrategyKind::InverseTypicality},
                {"probcover", strategies::StrategyKind::ProbCover},
                {"coreset", strategies::StrategyKind::CoreSet},
                {"random", strategies::StrategyKind::Random}}));
    cmd->add_option_function<std::string>(
        "--s-low", [&cfg](const std::string& v) {
            cfg.dispatch_low = strategies::parse_kind(v);
        },
        "Dispatched low-budget strategy");
    cmd->add_option_function<std::string>(
        "--s-high", [&cfg](const std::string& v) {
            cfg.dispatch_high = strategies::parse_kind(v);
        },
        "Dispatched high-budget strategy");
    cmd->add_option("--knn-k", cfg.params.knn_k, "Typicality neighborhood size");
}

int run_theory(const CommonFlags& common, double a, double p, double alpha,
               double f, double b_min, double b_max, std::size_t points,
               const std::vector<double>& qs) {
    theory::MixtureProblem problem(p, alpha, theory::ErrorModel::exponential(a));
    const auto thresholds = theory::budget_thresholds(problem, f);
    std::printf("B_low = %.6f\n", thresholds.b_low);
    std::printf("B_eq = %.6f\n", thresholds.b_eq);
    std::printf("B_high = %.6f\n", thresholds.b_high);

    std::vector<double> budgets;
    budgets.reserve(points);
    const double log_lo = std::log(b_min), log_hi = std::log(b_max);
    for (std::size_t i = 0; i < points; ++i) {
        const double t = points == 1 ? 0.0
                                     : static_cast<double>(i) /
                                           static_cast<double>(points - 1);
        budgets.push_back(std::exp(log_lo + t * (log_hi - log_lo)));
    }

    std::vector<harness::Series> series;
    harness::Series qhat{"qhat", budgets, {}};
    for (double b : budgets) qhat.y.push_back(theory::optimal_q(problem, b));
    series.push_back(std::move(qhat));
    for (double q : qs) {
        char name[32];
        std::snprintf(name, sizeof(name), "gain_q=%g", q);
        harness::Series s{name, budgets, {}};
        for (const auto& [b, gain] : theory::gain_curve(problem, q, budgets))
            s.y.push_back(gain);
        series.push_back(std::move(s));
    }

    if (!common.out.empty()) {
        if (common.format == "csv") {
            harness::emit_series_csv(series, common.out);
        } else {
            char header[256];
            std::snprintf(header, sizeof(header),
                          "{\"thresholds\":{\"b_low\":%.17g,\"b_eq\":%.17g,"
                          "\"b_high\":%.17g,\"active_fraction\":%.17g}}",
                          thresholds.b_low, thresholds.b_eq, thresholds.b_high,
                          thresholds.active_fraction);
            harness::emit_series_json(series, header, common.out);
        }
    }
    return 0;
}

int run_simulate(const CommonFlags& common, const harness::ExperimentConfig& config) {
    const auto records = harness::run_al_loop(config);
    if (!common.out.empty()) {
        if (common.format == "csv")
            harness::emit_records_csv(records, common.out);
        else
            harness::emit_records_json(records, config, common.out);
        std::printf("wrote %zu records to %s\n", records.size(),
                    common.out.c_str());
    } else {
        for (const auto& row : harness::aggregate(records))
            std::printf("%s round %zu: accuracy %.4f +- %.4f\n",
                        row.strategy.c_str(), row.round, row.mean, row.se);
    }
    return 0;
}

int run_decide(const CommonFlags& common, const std::string& csv_path,
               selector::SelectALConfig config, double epsilon) {
    config.epsilon = epsilon;
    config.validate();
    const Dataset dataset = datagen::load_csv(csv_path);

    std::vector<std::size_t> per_class(dataset.num_classes(), 0);
    IndexSet labeled(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        labeled[i] = i;
        per_class[static_cast<std::size_t>(dataset.label(i))]++;
    }
    for (std::size_t c = 0; c < per_class.size(); ++c)
        if (per_class[c] < 2)
            throw std::runtime_error("class " + std::to_string(c) +
                                     " has fewer than 2 examples");

    const auto decision = selector::decide_regime(dataset, labeled, config,
                                                  common.seed);
    std::printf("%s\n", selector::regime_name(decision.regime).c_str());
    std::printf("acc_low = %.6f se_low = %.6f\n", decision.acc_low, decision.se_low);
    std::printf("acc_high = %.6f se_high = %.6f\n", decision.acc_high,
                decision.se_high);
    std::printf("acc_rand = %.6f se_rand = %.6f\n", decision.acc_rand,
                decision.se_rand);

    if (!common.out.empty()) {
        char buf[512];
        std::snprintf(buf, sizeof(buf),
                      "{\n  \"regime\": \"%s\",\n  \"acc_low\": %.17g,\n"
                      "  \"se_low\": %.17g,\n  \"acc_high\": %.17g,\n"
                      "  \"se_high\": %.17g,\n  \"acc_rand\": %.17g,\n"
                      "  \"se_rand\": %.17g,\n  \"c_per_class\": %zu\n}\n",
                      selector::regime_name(decision.regime).c_str(),
                      decision.acc_low, decision.se_low, decision.acc_high,
                      decision.se_high, decision.acc_rand, decision.se_rand,
                      decision.c_per_class);
        std::FILE* out = std::fopen(common.out.c_str(), "wb");
        if (!out) throw std::runtime_error(common.out + ": cannot open for writing");
        std::fputs(buf, out);
        std::fclose(out);
    }
    return 0;
}

int run_removal(const CommonFlags& common, const harness::ExperimentConfig& config,
                const std::vector<std::size_t>& budgets, double epsilon) {
    const auto points = harness::run_removal_experiment(config, budgets, epsilon);
    for (const auto& p : points)
        std::printf("budget %zu: gain_low %.4f +- %.4f, gain_high %.4f +- %.4f\n",
                    p.budget, p.gain_low, p.se_low, p.gain_high, p.se_high);
    if (!common.out.empty()) {
        if (common.format == "csv")
            harness::emit_removal_csv(points, common.out);
        else
            harness::emit_removal_json(points, config, common.out);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Budget-aware active learning: theory solver and simulations"};
    app.require_subcommand(1);

    // theory ----------------------------------------------------------------
    auto* theory_cmd = app.add_subcommand(
        "theory", "Solve the mixture model: thresholds and curves");
    CommonFlags theory_common;
    add_common(theory_cmd, theory_common);
    double a = 0.0, p = 0.0, alpha = 0.0, f = 0.01;
    double b_min = 1.0, b_max = 200.0;
    std::size_t points = 200;
    std::vector<double> qs;
    theory_cmd->add_option("--a", a, "Exponential error rate")->required();
    theory_cmd->add_option("--p", p, "Easy-population probability")->required();
    theory_cmd->add_option("--alpha", alpha, "Sample-efficiency ratio")->required();
    theory_cmd->add_option("--f", f, "Active-set fraction |A|/B");
    theory_cmd->add_option("--b-min", b_min, "Curve budget range start");
    theory_cmd->add_option("--b-max", b_max, "Curve budget range end");
    theory_cmd->add_option("--points", points, "Curve sample count");
    theory_cmd->add_option("--q", qs, "Mixture coefficients for gain curves");

    // simulate ----------------------------------------------------------------
    auto* sim_cmd = app.add_subcommand("simulate", "Run a pool-based AL loop");
    CommonFlags sim_common;
    add_common(sim_cmd, sim_common);
    harness::ExperimentConfig sim_config;
    std::string sim_dataset, sim_strategy;
    add_dataset_flags(sim_cmd, sim_config.dataset, sim_dataset);
    add_learner_flags(sim_cmd, sim_config.learner);
    add_selectal_flags(sim_cmd, sim_config.strategy.selectal);
    sim_cmd->add_option("--strategy", sim_strategy,
                        "Strategy kind or 'selectal'")->required();
    sim_cmd->add_option("--rounds", sim_config.rounds, "Query rounds");
    sim_cmd->add_option("--batch", sim_config.batch, "Labels per round");
    sim_cmd->add_option("--init", sim_config.initial_labeled,
                        "Initial labeled count");
    sim_cmd->add_option("--seeds", sim_config.seeds, "Experiment seeds")
        ->delimiter(',');
    sim_cmd->add_option("--test-fraction", sim_config.test_fraction,
                        "Held-out test fraction");

    // decide ----------------------------------------------------------------
    auto* decide_cmd = app.add_subcommand(
        "decide", "Regime decision for a labeled CSV without new labels");
    CommonFlags decide_common;
    add_common(decide_cmd, decide_common);
    std::string labeled_csv;
    selector::SelectALConfig decide_config;
    double decide_epsilon = decide_config.epsilon;
    decide_cmd->add_option("--labeled-csv", labeled_csv, "Labeled data CSV")
        ->required();
    add_learner_flags(decide_cmd, decide_config.learner);
    add_selectal_flags(decide_cmd, decide_config, &decide_epsilon);

    // removal ----------------------------------------------------------------
    auto* removal_cmd = app.add_subcommand(
        "removal", "Strategy-vs-random removal gains across budgets");
    CommonFlags removal_common;
    add_common(removal_cmd, removal_common);
    harness::ExperimentConfig removal_config;
    removal_config.strategy.use_selectal = true;
    std::string removal_dataset;
    std::vector<std::size_t> removal_budgets;
    double removal_epsilon = 0.05;
    add_dataset_flags(removal_cmd, removal_config.dataset, removal_dataset);
    add_learner_flags(removal_cmd, removal_config.learner);
    add_selectal_flags(removal_cmd, removal_config.strategy.selectal,
                       &removal_epsilon);
    removal_cmd->add_option("--budgets", removal_budgets, "Labeled-set sizes")
        ->required()
        ->delimiter(',');
    removal_cmd->add_option("--seeds", removal_config.seeds, "Experiment seeds")
        ->delimiter(',');
    removal_cmd->add_option("--test-fraction", removal_config.test_fraction,
                            "Held-out test fraction");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\nRun with --help for usage.\n";
        return 2;
    }

    try {
        if (theory_cmd->parsed())
            return run_theory(theory_common, a, p, alpha, f, b_min, b_max, points,
                              qs);
        if (sim_cmd->parsed()) {
            resolve_dataset(sim_config.dataset, sim_dataset);
            if (sim_strategy == "selectal") {
                sim_config.strategy.use_selectal = true;
                sim_config.strategy.selectal.learner = sim_config.learner;
            } else {
                sim_config.strategy.kind = strategies::parse_kind(sim_strategy);
            }
            if (!sim_cmd->count("--seeds")) {
                // keep the default 0..9
            }
            return run_simulate(sim_common, sim_config);
        }
        if (decide_cmd->parsed())
            return run_decide(decide_common, labeled_csv, decide_config,
                              decide_epsilon);
        if (removal_cmd->parsed()) {
            resolve_dataset(removal_config.dataset, removal_dataset);
            if (removal_budgets.empty())
                throw CLI::ValidationError("--budgets", "budget list is empty");
            removal_config.strategy.selectal.learner = removal_config.learner;
            return run_removal(removal_common, removal_config, removal_budgets,
                               removal_epsilon);
        }
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
