#pragma once

#include "parti/core_math.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <queue>
#include <stdexcept>
#include <vector>

namespace parti {

struct IntegralResult {
    double value = 0.0;
    double abs_error_estimate = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
};

/// Throws NumericError unless the result met its tolerance.
inline double require(const IntegralResult& res, const char* what = "integral") {
    if (!res.converged) {
        throw NumericError(std::string(what) + ": quadrature did not converge");
    }
    return res.value;
}

namespace detail {

using gk21 = boost::math::quadrature::gauss_kronrod<double, 21>;

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk_panel(F& f, double a, double b, std::size_t& evals) {
    static const auto& x = gk21::abscissa();
    static const auto& wk = gk21::weights();
    static const auto& wg = boost::math::quadrature::gauss<double, 10>::weights();
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    // Kronrod abscissae: x[0] = 0, odd indices are the Gauss points of G10
    double fc = f(mid);
    double k = wk[0] * fc;
    double g = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) {
        const double f1 = f(mid - half * x[i]);
        const double f2 = f(mid + half * x[i]);
        k += wk[i] * (f1 + f2);
        if (i % 2 == 1) g += wg[(i - 1) / 2] * (f1 + f2);
    }
    evals += 2 * x.size() - 1;
    return {a, b, k * half, std::abs((k - g) * half)};
}

/// Global adaptive Gauss-Kronrod 21 on [a,b]; panels split in error order.
template <class F>
IntegralResult gk_adaptive(F&& f, double a, double b, double tol, std::size_t max_evals) {
    IntegralResult res;
    std::priority_queue<Panel> heap;
    Panel first = gk_panel(f, a, b, res.evaluations);
    double total = first.value, err = first.error;
    heap.push(first);
    while (err > tol * std::max(1.0, std::abs(total))) {
        if (res.evaluations + 42 > max_evals) {
            res.value = total;
            res.abs_error_estimate = err;
            res.converged = false;
            return res;
        }
        const Panel p = heap.top();
        heap.pop();
        const double mid = 0.5 * (p.a + p.b);
        const Panel l = gk_panel(f, p.a, mid, res.evaluations);
        const Panel r = gk_panel(f, mid, p.b, res.evaluations);
        total += l.value + r.value - p.value;
        err += l.error + r.error - p.error;
        heap.push(l);
        heap.push(r);
    }
    // re-sum in a fixed order to remove drift from incremental updates
    std::vector<Panel> panels;
    panels.reserve(heap.size());
    while (!heap.empty()) {
        panels.push_back(heap.top());
        heap.pop();
    }
    std::sort(panels.begin(), panels.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
    total = 0.0;
    err = 0.0;
    for (const auto& p : panels) {
        total += p.value;
        err += p.error;
    }
    res.value = total;
    res.abs_error_estimate = err;
    res.converged = true;
    return res;
}

}  // namespace detail

inline constexpr double default_tol = 1e-9;
inline constexpr double loose_tol = 1e-7;
inline constexpr std::size_t default_max_evals = 200000;

/// Integral of f over [a,b]. Uses t = a + u^2, so a 1/sqrt(t-a) endpoint is fine.
template <class F>
IntegralResult integrate_finite(F&& f, double a, double b, double tol = default_tol,
                                std::size_t max_evals = default_max_evals) {
    if (!(a < b)) throw std::domain_error("integrate_finite: requires a < b");
    auto g = [&](double u) { return 2.0 * u * f(a + u * u); };
    return detail::gk_adaptive(g, 0.0, std::sqrt(b - a), tol, max_evals);
}

/// Integral of f over [0,inf). tail_bound(T) must bound the integral of |f| over [T,inf).
template <class F, class B>
IntegralResult integrate_semi_infinite(F&& f, double tol, B&& tail_bound,
                                       std::size_t max_evals = default_max_evals) {
    double t_max = 1.0;
    while (tail_bound(t_max) >= 0.5 * tol) {
        t_max *= 1.25;
        if (t_max > 1e7) {
            IntegralResult bad;
            bad.converged = false;
            return bad;
        }
    }
    IntegralResult res = integrate_finite(f, 0.0, t_max, 0.5 * tol, max_evals);
    res.abs_error_estimate += tail_bound(t_max);
    return res;
}

}  // namespace parti
