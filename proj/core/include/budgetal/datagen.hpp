#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "budgetal/dataset.hpp"

namespace budgetal::datagen {

/// Isotropic Gaussian blobs, one per class, means drawn on a sphere of the
/// given radius, unit noise. Deterministic per seed.
Dataset make_gaussian_mixture(std::size_t num_classes, std::size_t per_class,
                              std::size_t dim, double separation,
                              std::uint64_t seed);

/// Binary mixture of two regimes: a fraction ~p of the points comes from a
/// pair of well separated per-class clusters (easy), the rest from a pair of
/// heavily overlapping clusters (hard). The easy pair sits on the first
/// feature axis with unit noise; the hard pair sits on the second axis with
/// wider noise, so the informative direction differs between regimes and the
/// easy cores are the densest neighborhoods. Regime tags are kept as
/// metadata.
Dataset make_two_regime_mixture(double p, std::size_t n, std::size_t dim,
                                double easy_separation, double hard_separation,
                                std::uint64_t seed);

/// Noise width of the hard regime in make_two_regime_mixture.
inline constexpr double kHardRegimeNoise = 1.75;

/// Up to c indices per class drawn from `pool`. With a ranking, the top-c
/// per class by descending score (ties to the lower index); otherwise a
/// seeded uniform draw per class. Classes with fewer than c members in the
/// pool contribute everything they have.
IndexSet class_balanced_sample(const Dataset& dataset, const IndexSet& pool,
                               std::size_t c_per_class,
                               const std::optional<std::vector<double>>& ranking,
                               std::uint64_t seed);

}  // namespace budgetal::datagen
