#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>

#include "budgetal/csv_io.hpp"
#include "budgetal/datagen.hpp"
#include "budgetal/learner.hpp"

using namespace budgetal;
using namespace budgetal::datagen;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

// Train on a class-balanced handful of labels and score on the rest.
double small_budget_accuracy(const Dataset& data, std::size_t per_class,
                             std::uint64_t seed) {
    IndexSet all(data.size());
    std::iota(all.begin(), all.end(), 0);
    const auto labeled =
        class_balanced_sample(data, all, per_class, std::nullopt, seed);
    IndexSet rest;
    std::set_difference(all.begin(), all.end(), labeled.begin(), labeled.end(),
                        std::back_inserter(rest));
    const auto model = learn::train(data, labeled, learn::LearnerConfig{});
    return learn::accuracy(model, data, rest);
}

}  // namespace

TEST_CASE("gaussian mixture generator") {
    SUBCASE("deterministic per seed") {
        const auto a = make_gaussian_mixture(3, 50, 4, 5.0, 7);
        const auto b = make_gaussian_mixture(3, 50, 4, 5.0, 7);
        CHECK(a.features() == b.features());
        CHECK(a.labels_unchecked() == b.labels_unchecked());
        const auto c = make_gaussian_mixture(3, 50, 4, 5.0, 8);
        CHECK(a.features() != c.features());
    }
    SUBCASE("shapes and classes") {
        const auto data = make_gaussian_mixture(3, 40, 5, 4.0, 0);
        CHECK(data.size() == 120);
        CHECK(data.dim() == 5);
        CHECK(data.num_classes() == 3);
    }
    SUBCASE("wide separation is learnable from two labels per class") {
        const auto data = make_gaussian_mixture(2, 100, 2, 10.0, 0);
        CHECK(small_budget_accuracy(data, 2, 1) > 0.95);
    }
    SUBCASE("near-zero separation is near chance") {
        const auto data = make_gaussian_mixture(2, 100, 2, 0.01, 0);
        const double acc = small_budget_accuracy(data, 2, 1);
        CHECK(acc >= 0.4);
        CHECK(acc <= 0.6);
    }
    CHECK_THROWS_AS(make_gaussian_mixture(1, 10, 2, 1.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(make_gaussian_mixture(2, 1, 2, 1.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(make_gaussian_mixture(2, 10, 0, 1.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(make_gaussian_mixture(2, 10, 2, 0.0, 0), std::invalid_argument);
}

TEST_CASE("two-regime mixture generator") {
    SUBCASE("degenerate mixture is all easy") {
        const auto data = make_two_regime_mixture(1.0, 500, 2, 8.0, 0.5, 3);
        for (int tag : data.regime_tags()) CHECK(tag == 0);
        // Per-class means sit at +-separation/2 on the first axis.
        double mean0 = 0.0, mean1 = 0.0;
        std::size_t n0 = 0, n1 = 0;
        for (std::size_t i = 0; i < data.size(); ++i) {
            if (data.label(i) == 0) {
                mean0 += data.row(i)[0];
                ++n0;
            } else {
                mean1 += data.row(i)[0];
                ++n1;
            }
        }
        CHECK(mean0 / static_cast<double>(n0) == doctest::Approx(-4.0).epsilon(0.2));
        CHECK(mean1 / static_cast<double>(n1) == doctest::Approx(4.0).epsilon(0.2));
    }
    SUBCASE("acceptance fixture has both regimes and both classes") {
        const auto data = make_two_regime_mixture(0.5, 2000, 2, 10.0, 0.5, 1);
        CHECK(data.size() == 2000);
        CHECK(data.num_classes() == 2);
        const auto& tags = data.regime_tags();
        const auto easy =
            static_cast<std::size_t>(std::count(tags.begin(), tags.end(), 0));
        CHECK(easy > 800);
        CHECK(easy < 1200);
    }
    SUBCASE("deterministic per seed") {
        const auto a = make_two_regime_mixture(0.5, 200, 2, 10.0, 0.5, 9);
        const auto b = make_two_regime_mixture(0.5, 200, 2, 10.0, 0.5, 9);
        CHECK(a.features() == b.features());
    }
    CHECK_THROWS_AS(make_two_regime_mixture(0.5, 200, 2, 0.5, 10.0, 0),
                    std::invalid_argument);  // easy must exceed hard
    CHECK_THROWS_AS(make_two_regime_mixture(0.0, 200, 2, 10.0, 0.5, 0),
                    std::invalid_argument);
}

TEST_CASE("class-balanced sampling") {
    const auto data = make_gaussian_mixture(2, 20, 2, 3.0, 0);
    IndexSet pool(data.size());
    std::iota(pool.begin(), pool.end(), 0);

    SUBCASE("one per class without ranking") {
        const auto picked = class_balanced_sample(data, pool, 1, std::nullopt, 5);
        REQUIRE(picked.size() == 2);
        CHECK(data.label(picked[0]) != data.label(picked[1]));
        CHECK(picked == class_balanced_sample(data, pool, 1, std::nullopt, 5));
    }
    SUBCASE("a class smaller than c contributes everything it has") {
        IndexSet small_pool;
        for (std::size_t i = 0; i < data.size(); ++i)
            if (data.label(i) == 1 || small_pool.size() < 3) small_pool.push_back(i);
        std::sort(small_pool.begin(), small_pool.end());
        const auto picked =
            class_balanced_sample(data, small_pool, 10, std::nullopt, 0);
        std::size_t from_class0 = 0;
        for (auto idx : picked)
            if (data.label(idx) == 0) ++from_class0;
        CHECK(from_class0 == 3);  // all of them, no error
    }
    SUBCASE("ranking takes the per-class top scores") {
        std::vector<double> scores(pool.size());
        for (std::size_t i = 0; i < pool.size(); ++i)
            scores[i] = static_cast<double>((7 * i) % 40);
        const auto picked = class_balanced_sample(data, pool, 2, scores, 0);
        REQUIRE(picked.size() == 4);
        // Brute force: per class, the two highest-scoring pool members.
        for (int cls = 0; cls < 2; ++cls) {
            std::vector<std::pair<double, std::size_t>> members;
            for (std::size_t i = 0; i < pool.size(); ++i)
                if (data.label(pool[i]) == cls)
                    members.emplace_back(-scores[i], pool[i]);
            std::sort(members.begin(), members.end());
            for (int k = 0; k < 2; ++k)
                CHECK(std::count(picked.begin(), picked.end(),
                                 members[static_cast<std::size_t>(k)].second) == 1);
        }
    }
    SUBCASE("output is a subset of the pool") {
        const auto picked = class_balanced_sample(data, pool, 5, std::nullopt, 3);
        for (auto idx : picked)
            CHECK(std::binary_search(pool.begin(), pool.end(), idx));
        CHECK(std::adjacent_find(picked.begin(), picked.end()) == picked.end());
    }
    CHECK_THROWS_AS(class_balanced_sample(data, {}, 1, std::nullopt, 0),
                    std::invalid_argument);
}

TEST_CASE("csv round trip and parse errors") {
    SUBCASE("tiny literal file") {
        const auto path = temp_path("budgetal_tiny.csv");
        std::ofstream(path) << "f0,f1,label\n0.0,1.0,0\n1.0,0.0,1\n";
        const auto data = load_csv(path);
        CHECK(data.size() == 2);
        CHECK(data.dim() == 2);
        CHECK(data.num_classes() == 2);
        CHECK(data.row(0)[1] == 1.0);
        CHECK(data.label(1) == 1);
        std::filesystem::remove(path);
    }
    SUBCASE("save then load is exact") {
        const auto data = make_two_regime_mixture(0.5, 300, 3, 9.0, 0.4, 11);
        const auto path = temp_path("budgetal_roundtrip.csv");
        save_csv(data, path);
        const auto back = load_csv(path);
        REQUIRE(back.size() == data.size());
        REQUIRE(back.dim() == data.dim());
        for (std::size_t i = 0; i < data.size(); ++i) {
            CHECK(back.label(i) == data.label(i));
            for (std::size_t j = 0; j < data.dim(); ++j)
                CHECK(std::abs(back.row(i)[j] - data.row(i)[j]) <= 1e-12);
        }
        std::filesystem::remove(path);
    }
    SUBCASE("malformed numeric cell names the line") {
        const auto path = temp_path("budgetal_bad.csv");
        std::ofstream(path) << "f0,label\n0.5,0\nbogus,1\n";
        try {
            load_csv(path);
            FAIL("expected a parse error");
        } catch (const std::runtime_error& e) {
            CHECK(std::string(e.what()).find(":3:") != std::string::npos);
        }
        std::filesystem::remove(path);
    }
    SUBCASE("missing label column") {
        const auto path = temp_path("budgetal_nolabel.csv");
        std::ofstream(path) << "f0,f1\n0.0,1.0\n";
        CHECK_THROWS_AS(load_csv(path), std::runtime_error);
        std::filesystem::remove(path);
    }
    SUBCASE("non-contiguous class indices are rejected") {
        const auto path = temp_path("budgetal_gap.csv");
        std::ofstream(path) << "f0,label\n0.0,0\n1.0,2\n";
        CHECK_THROWS_AS(load_csv(path), std::runtime_error);
        std::filesystem::remove(path);
    }
    SUBCASE("wrong cell count names the line") {
        const auto path = temp_path("budgetal_short.csv");
        std::ofstream(path) << "f0,f1,label\n0.0,0\n";
        try {
            load_csv(path);
            FAIL("expected a parse error");
        } catch (const std::runtime_error& e) {
            CHECK(std::string(e.what()).find(":2:") != std::string::npos);
        }
        std::filesystem::remove(path);
    }
}

TEST_CASE("dataset invariants") {
    CHECK_THROWS_AS(Dataset(2, 1, 2, {0.0, 1.0}, {0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(Dataset(2, 1, 2, {0.0, std::nan("")}, {0, 1}),
                    std::invalid_argument);
    CHECK_THROWS_AS(Dataset(2, 1, 2, {0.0, 1.0}, {0, 2}), std::invalid_argument);

    SUBCASE("label guard intercepts reads") {
        const Dataset data(2, 1, 2, {0.0, 1.0}, {0, 1});
        const auto guarded = data.with_label_guard([](std::size_t i) {
            if (i == 1) throw std::logic_error("forbidden label read");
        });
        CHECK(guarded.label(0) == 0);
        CHECK_THROWS_AS(guarded.label(1), std::logic_error);
        CHECK(data.label(1) == 1);  // the original stays unguarded
    }
    SUBCASE("pool state rejects overlap") {
        const Dataset data(3, 1, 2, {0.0, 1.0, 2.0}, {0, 1, 1});
        CHECK_THROWS_AS(PoolState::make(data, {0, 1}, {1, 2}),
                        std::invalid_argument);
        const auto pool = PoolState::make(data, {0}, {1, 2});
        CHECK(pool.labeled.size() == 1);
    }
}
