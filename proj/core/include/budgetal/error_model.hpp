#pragma once

#include <utility>
#include <vector>

namespace budgetal::theory {

/// Generalization-error curve E(x): strictly decreasing, values in [0, 1],
/// defined for x >= 0. Either the exponential family e^{-a x} or a tabulated
/// curve interpolated piecewise-linearly between sample points.
class ErrorModel {
  public:
    static ErrorModel exponential(double a);

    // Points must be sorted by x, with x >= 0, values strictly decreasing
    // and inside [0, 1]. Evaluation outside [x_front, x_back] is an error.
    static ErrorModel tabulated(std::vector<std::pair<double, double>> points);

    double value(double x) const;
    double derivative(double x) const;

    bool is_exponential() const { return tabulated_.empty(); }
    double exponent_rate() const;  // the `a` of an exponential model

  private:
    ErrorModel() = default;

    double a_ = 0.0;
    std::vector<std::pair<double, double>> tabulated_;
};

}  // namespace budgetal::theory
