#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace budgetal {

/// Minimum of a unimodal scalar function on [lo, hi] via Brent's method.
/// Returns (argmin, min value). The caller is responsible for comparing
/// against the interval endpoints when boundary minima are possible.
std::pair<double, double> brent_minimize(const std::function<double(double)>& f,
                                         double lo, double hi,
                                         double tol = 1e-10,
                                         int max_iter = 200);

/// Largest x in [lo, hi] with pred(x) true, assuming pred is true on a prefix
/// [lo, x*] and false after. Requires pred(lo); bisects to relative tolerance.
double bisect_last_true(const std::function<bool(double)>& pred,
                        double lo, double hi, double rel_tol = 1e-6);

/// Smallest x in [lo, hi] with pred(x) true, assuming pred is false on a
/// prefix and true on the suffix. Requires pred(hi).
double bisect_first_true(const std::function<bool(double)>& pred,
                         double lo, double hi, double rel_tol = 1e-6);

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;   // sample sd / sqrt(n); 0 when n < 2
    std::size_t n = 0;
};

MeanSe mean_and_se(const std::vector<double>& values);

}  // namespace budgetal
