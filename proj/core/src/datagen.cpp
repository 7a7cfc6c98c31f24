#include "budgetal/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "budgetal/rng.hpp"

namespace budgetal::datagen {

namespace {

std::vector<double> sphere_point(std::size_t dim, double radius,
                                 std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> v(dim);
    double norm = 0.0;
    do {
        norm = 0.0;
        for (auto& x : v) {
            x = normal(rng);
            norm += x * x;
        }
        norm = std::sqrt(norm);
    } while (norm < 1e-12);
    for (auto& x : v) x *= radius / norm;
    return v;
}

}  // namespace

Dataset make_gaussian_mixture(std::size_t num_classes, std::size_t per_class,
                              std::size_t dim, double separation,
                              std::uint64_t seed) {
    if (num_classes < 2) throw std::invalid_argument("make_gaussian_mixture: C >= 2");
    if (per_class < 2)
        throw std::invalid_argument("make_gaussian_mixture: per_class >= 2");
    if (dim < 1) throw std::invalid_argument("make_gaussian_mixture: dim >= 1");
    if (!(separation > 0.0))
        throw std::invalid_argument("make_gaussian_mixture: separation > 0");

    auto rng = make_engine(seed, 0);
    std::vector<std::vector<double>> means;
    means.reserve(num_classes);
    for (std::size_t c = 0; c < num_classes; ++c)
        means.push_back(sphere_point(dim, separation, rng));

    const std::size_t n = num_classes * per_class;
    std::vector<double> features(n * dim);
    std::vector<int> labels(n);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::size_t row = 0;
    for (std::size_t c = 0; c < num_classes; ++c) {
        for (std::size_t k = 0; k < per_class; ++k, ++row) {
            labels[row] = static_cast<int>(c);
            for (std::size_t j = 0; j < dim; ++j)
                features[row * dim + j] = means[c][j] + noise(rng);
        }
    }
    return Dataset(n, dim, num_classes, std::move(features), std::move(labels));
}

Dataset make_two_regime_mixture(double p, std::size_t n, std::size_t dim,
                                double easy_separation, double hard_separation,
                                std::uint64_t seed) {
    if (!(p > 0.0 && p <= 1.0))
        throw std::invalid_argument("make_two_regime_mixture: p must be in (0, 1]");
    if (n < 4) throw std::invalid_argument("make_two_regime_mixture: n >= 4");
    if (dim < 1) throw std::invalid_argument("make_two_regime_mixture: dim >= 1");
    if (!(easy_separation > hard_separation && hard_separation > 0.0))
        throw std::invalid_argument(
            "make_two_regime_mixture: need easy_separation > hard_separation > 0");

    auto rng = make_engine(seed, 1);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_int_distribution<int> coin(0, 1);

    // Easy clusters straddle axis 0, hard clusters straddle axis 1 (falling
    // back to axis 0 when dim == 1). Class 0 takes the negative side.
    const std::size_t hard_axis = dim > 1 ? 1 : 0;

    std::vector<double> features(n * dim);
    std::vector<int> labels(n);
    std::vector<int> tags(n);
    for (std::size_t i = 0; i < n; ++i) {
        const bool easy = unif(rng) < p;
        const int y = coin(rng);
        const double side = (y == 0) ? -0.5 : 0.5;
        tags[i] = easy ? 0 : 1;
        labels[i] = y;
        const double sigma = easy ? 1.0 : kHardRegimeNoise;
        for (std::size_t j = 0; j < dim; ++j)
            features[i * dim + j] = sigma * noise(rng);
        if (easy)
            features[i * dim + 0] += side * easy_separation;
        else
            features[i * dim + hard_axis] += side * hard_separation;
    }
    return Dataset(n, dim, 2, std::move(features), std::move(labels),
                   std::move(tags));
}

IndexSet class_balanced_sample(const Dataset& dataset, const IndexSet& pool,
                               std::size_t c_per_class,
                               const std::optional<std::vector<double>>& ranking,
                               std::uint64_t seed) {
    if (pool.empty())
        throw std::invalid_argument("class_balanced_sample: pool is empty");
    if (ranking && ranking->size() != pool.size())
        throw std::invalid_argument(
            "class_balanced_sample: ranking size must match pool size");

    std::vector<IndexSet> by_class(dataset.num_classes());
    std::vector<std::vector<double>> scores(dataset.num_classes());
    for (std::size_t k = 0; k < pool.size(); ++k) {
        const auto cls = static_cast<std::size_t>(dataset.label(pool[k]));
        by_class[cls].push_back(pool[k]);
        if (ranking) scores[cls].push_back((*ranking)[k]);
    }

    IndexSet chosen;
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        auto& members = by_class[c];
        if (members.empty()) continue;
        const std::size_t take = std::min(c_per_class, members.size());
        if (ranking) {
            std::vector<std::size_t> order(members.size());
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t a, std::size_t b) {
                                 if (scores[c][a] != scores[c][b])
                                     return scores[c][a] > scores[c][b];
                                 return members[a] < members[b];
                             });
            for (std::size_t k = 0; k < take; ++k)
                chosen.push_back(members[order[k]]);
        } else {
            auto rng = make_engine(seed, 100 + c);
            auto picked = sample_without_replacement(members, take, rng);
            chosen.insert(chosen.end(), picked.begin(), picked.end());
        }
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

}  // namespace budgetal::datagen
