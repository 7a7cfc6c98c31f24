#include "budgetal/numeric.hpp"

#include <algorithm>
#include <stdexcept>

namespace budgetal {

std::pair<double, double> brent_minimize(const std::function<double(double)>& f,
                                         double lo, double hi, double tol,
                                         int max_iter) {
    if (!(lo < hi)) throw std::invalid_argument("brent_minimize: empty interval");
    const double golden = 0.3819660112501051;  // (3 - sqrt(5)) / 2
    const double sqrt_eps = std::sqrt(2.220446049250313e-16);

    double a = lo, b = hi;
    double x = a + golden * (b - a);
    double w = x, v = x;
    double fx = f(x), fw = fx, fv = fx;
    double d = 0.0, e = 0.0;

    for (int iter = 0; iter < max_iter; ++iter) {
        const double m = 0.5 * (a + b);
        const double tol1 = sqrt_eps * std::abs(x) + tol;
        const double tol2 = 2.0 * tol1;
        if (std::abs(x - m) <= tol2 - 0.5 * (b - a)) break;

        bool use_golden = true;
        if (std::abs(e) > tol1) {
            // Parabolic fit through (v, fv), (w, fw), (x, fx).
            double r = (x - w) * (fx - fv);
            double q = (x - v) * (fx - fw);
            double p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if (q > 0.0) p = -p;
            q = std::abs(q);
            const double e_old = e;
            e = d;
            if (std::abs(p) < std::abs(0.5 * q * e_old) && p > q * (a - x) &&
                p < q * (b - x)) {
                d = p / q;
                const double u = x + d;
                if (u - a < tol2 || b - u < tol2) d = (x < m) ? tol1 : -tol1;
                use_golden = false;
            }
        }
        if (use_golden) {
            e = (x < m) ? b - x : a - x;
            d = golden * e;
        }

        const double u = (std::abs(d) >= tol1) ? x + d : x + (d > 0 ? tol1 : -tol1);
        const double fu = f(u);
        if (fu <= fx) {
            if (u < x) b = x; else a = x;
            v = w; fv = fw;
            w = x; fw = fx;
            x = u; fx = fu;
        } else {
            if (u < x) a = u; else b = u;
            if (fu <= fw || w == x) {
                v = w; fv = fw;
                w = u; fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u; fv = fu;
            }
        }
    }
    return {x, fx};
}

namespace {

double bisect_boundary(const std::function<bool(double)>& pred, double lo,
                       double hi, double rel_tol, bool last_true) {
    // Invariant: pred(t_true) is true, pred(t_false) is false.
    double t_true = last_true ? lo : hi;
    double t_false = last_true ? hi : lo;
    while (std::abs(t_false - t_true) >
           rel_tol * std::max(1.0, std::min(std::abs(t_true), std::abs(t_false)))) {
        const double mid = 0.5 * (t_true + t_false);
        if (mid == t_true || mid == t_false) break;
        if (pred(mid)) t_true = mid; else t_false = mid;
    }
    return t_true;
}

}  // namespace

double bisect_last_true(const std::function<bool(double)>& pred, double lo,
                        double hi, double rel_tol) {
    if (!pred(lo)) throw std::runtime_error("bisect_last_true: pred(lo) is false");
    if (pred(hi)) return hi;
    return bisect_boundary(pred, lo, hi, rel_tol, true);
}

double bisect_first_true(const std::function<bool(double)>& pred, double lo,
                         double hi, double rel_tol) {
    if (!pred(hi)) throw std::runtime_error("bisect_first_true: pred(hi) is false");
    if (pred(lo)) return lo;
    return bisect_boundary(pred, lo, hi, rel_tol, false);
}

MeanSe mean_and_se(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("mean_and_se: empty input");
    MeanSe out;
    out.n = values.size();
    double sum = 0.0;
    for (double v : values) sum += v;
    out.mean = sum / static_cast<double>(out.n);
    if (out.n >= 2) {
        double ss = 0.0;
        for (double v : values) ss += (v - out.mean) * (v - out.mean);
        const double var = ss / static_cast<double>(out.n - 1);
        out.se = std::sqrt(var / static_cast<double>(out.n));
    }
    return out;
}

}  // namespace budgetal
