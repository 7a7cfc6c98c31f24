#include "budgetal/error_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace budgetal::theory {

ErrorModel ErrorModel::exponential(double a) {
    if (!(a > 0.0) || !std::isfinite(a))
        throw std::invalid_argument("ErrorModel::exponential: rate must be positive");
    ErrorModel m;
    m.a_ = a;
    return m;
}

ErrorModel ErrorModel::tabulated(std::vector<std::pair<double, double>> points) {
    if (points.size() < 2)
        throw std::invalid_argument("ErrorModel::tabulated: need at least 2 points");
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& [x, e] = points[i];
        if (!std::isfinite(x) || !std::isfinite(e))
            throw std::invalid_argument("ErrorModel::tabulated: non-finite sample");
        if (x < 0.0)
            throw std::invalid_argument("ErrorModel::tabulated: x must be >= 0");
        if (e < 0.0 || e > 1.0)
            throw std::invalid_argument("ErrorModel::tabulated: E(x) outside [0, 1]");
        if (i > 0) {
            if (points[i - 1].first >= x)
                throw std::invalid_argument("ErrorModel::tabulated: x not strictly increasing");
            if (points[i - 1].second <= e)
                throw std::invalid_argument(
                    "ErrorModel::tabulated: E must be strictly decreasing");
        }
    }
    ErrorModel m;
    m.tabulated_ = std::move(points);
    return m;
}

double ErrorModel::exponent_rate() const {
    if (!is_exponential())
        throw std::logic_error("ErrorModel::exponent_rate: not an exponential model");
    return a_;
}

double ErrorModel::value(double x) const {
    if (!std::isfinite(x) || x < 0.0)
        throw std::domain_error("ErrorModel::value: x must be finite and >= 0");
    if (is_exponential()) return std::exp(-a_ * x);

    if (x < tabulated_.front().first || x > tabulated_.back().first)
        throw std::domain_error("ErrorModel::value: x=" + std::to_string(x) +
                                " outside tabulated range");
    auto it = std::lower_bound(tabulated_.begin(), tabulated_.end(), x,
                               [](const auto& p, double v) { return p.first < v; });
    if (it == tabulated_.begin()) return it->second;
    const auto& [x1, e1] = *it;
    const auto& [x0, e0] = *(it - 1);
    const double t = (x - x0) / (x1 - x0);
    return e0 + t * (e1 - e0);
}

double ErrorModel::derivative(double x) const {
    if (is_exponential()) return -a_ * std::exp(-a_ * x);
    // Central difference on the interpolant, shrunk near the table edges.
    const double lo = tabulated_.front().first;
    const double hi = tabulated_.back().first;
    double h = std::max(1e-6 * (hi - lo), 1e-9);
    h = std::min({h, x - lo, hi - x});
    if (h <= 0.0) h = std::min(1e-9, hi - lo);
    return (value(std::min(x + h, hi)) - value(std::max(x - h, lo))) /
           (std::min(x + h, hi) - std::max(x - h, lo));
}

}  // namespace budgetal::theory
