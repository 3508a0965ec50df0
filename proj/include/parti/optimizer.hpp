#pragma once

#include "parti/bankruptcy_solver.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace parti {

/// Kernels keyed by (market, T, k); V-range grows on demand.
class KernelCache {
public:
    explicit KernelCache(double tol = default_tol) : tol_(tol) {}

    [[nodiscard]] const BarrierKernel& get(const Scenario& s) {
        for (const auto& k : kernels_) {
            if (k->matches(s)) return *k;
        }
        kernels_.push_back(std::make_unique<BarrierKernel>(s.market, s.contract.t_mat,
                                                           s.contract.k_threshold, s.v0, tol_));
        return *kernels_.back();
    }

    [[nodiscard]] BarrierSolution solve(const Scenario& s) {
        validate(s);
        if (s.contract.alpha == 0.0 || vb_closed_form_above_k(s)) return solve_vb(s, tol_);
        return solve_vb(s, get(s));
    }

private:
    double tol_;
    std::vector<std::unique_ptr<BarrierKernel>> kernels_;
};

struct OptimumResult {
    std::vector<double> arg;          // (alpha) or (g) or (alpha, g)
    double objective = 0.0;
    std::vector<double> foc_residual; // NaN when the optimum is on the boundary
    bool boundary_flag = false;
    double vb = 0.0;
    double bracket_lo = 0.0, bracket_hi = 0.0;
    double objective_lo = 0.0, objective_hi = 0.0;
    bool foc_ok = true;
    int rounds = 0;
    bool converged = true;
};

namespace detail {

inline bool immediate(const Scenario& s, double vb) { return vb >= s.v0; }

inline double lambda23(const MarketParams& m) {
    const LambdaSet l = lambdas(m);
    return l.lambda2 + l.lambda3;
}

}  // namespace detail

/// dV_B/dalpha by implicit differentiation of the smooth-pasting residual.
[[nodiscard]] inline double vb_prime_alpha(const Scenario& s, double vb, double tol = default_tol) {
    if (detail::immediate(s, vb)) return 0.0;
    const double den = residual_vb_derivative(s, vb, tol);
    if (!(std::abs(den) > 1e-14)) throw NumericError("vb_prime_alpha: degenerate denominator");
    const auto j = barrier_integrals(vb, s.contract.k_threshold, s.contract.t_mat, s.market, tol);
    return (j.int_0_T - s.frictions.tau2 * j.int_0_inf) / den;
}

/// dV_B/dg with g = G/T.
[[nodiscard]] inline double vb_prime_g(const Scenario& s, double vb, double tol = default_tol) {
    if (detail::immediate(s, vb)) return 0.0;
    const double den = residual_vb_derivative(s, vb, tol);
    if (!(std::abs(den) > 1e-14)) throw NumericError("vb_prime_g: degenerate denominator");
    const auto& m = s.market;
    const double T = s.contract.t_mat;
    const AConstants a = a_constants(m, T, s.frictions);
    const double num = T / (vb * m.r) *
                       (-2.0 * a.a1 / (m.r * T) + 2.0 * a.a2 - s.frictions.tau1 * detail::lambda23(m));
    return num / den;
}

/// Total derivative of firm value in alpha at V = v0.
[[nodiscard]] inline double dv_dalpha(const Scenario& s, double vb, double tol = default_tol) {
    if (detail::immediate(s, vb)) return 0.0;
    const auto& m = s.market;
    const auto& c = s.contract;
    const auto& f = s.frictions;
    const double l23 = detail::lambda23(m);
    const double vbp = vb_prime_alpha(s, vb, tol);
    const double pw = std::exp(l23 * std::log(vb / s.v0));
    double d = -vbp * pw * (f.tau1 * c.g_total / m.r * l23 / vb + f.rho * (l23 + 1.0));
    if (f.tau2 > 0.0) {
        d += f.tau2 * require(cdo_integral_perpetual(s.v0, c.k_threshold, vb, m, tol));
        if (c.alpha > 0.0) {
            d += c.alpha * f.tau2 * vbp * cdo_dvb_integral_perpetual(s.v0, c.k_threshold, vb, m, tol);
        }
    }
    return d;
}

/// Total derivative of firm value in g = G/T at V = v0.
[[nodiscard]] inline double dv_dg(const Scenario& s, double vb, double tol = default_tol) {
    if (detail::immediate(s, vb)) return 0.0;
    const auto& m = s.market;
    const auto& c = s.contract;
    const auto& f = s.frictions;
    const double T = c.t_mat;
    const double l23 = detail::lambda23(m);
    const double vbp = vb_prime_g(s, vb, tol);
    const double pw = std::exp(l23 * std::log(vb / s.v0));
    double d = f.tau1 * T / m.r * (1.0 - pw) - f.tau1 * c.g_total * l23 / (s.v0 * m.r) * pw * s.v0 / vb * vbp -
               f.rho * (l23 + 1.0) * pw * vbp;
    if (c.alpha > 0.0 && f.tau2 > 0.0) {
        d += c.alpha * f.tau2 * vbp * cdo_dvb_integral_perpetual(s.v0, c.k_threshold, vb, m, tol);
    }
    return d;
}

struct OptimizerOptions {
    std::size_t grid_points = 64;
    double alpha_tol = 1e-5;
    double g_tol = 1e-7;
    double margin = 1e-6;
    double inner_tol = loose_tol;
    double final_tol = default_tol;
    double foc_rel_tol = 1e-3;
};

/// Upper end of the alpha search interval; see README for why alpha-tilde is included.
[[nodiscard]] inline double alpha_upper_bound(const Scenario& s, double margin = 1e-6) {
    const AConstants a = a_constants(s.market, s.contract.t_mat, s.frictions);
    double hi = 1.0;
    if (!a.alpha_bar.unbounded) hi = std::min(hi, a.alpha_bar.value - margin);
    if (!a.alpha_tilde.unbounded) hi = std::min(hi, a.alpha_tilde.value - margin);
    return std::max(hi, 0.0);
}

namespace detail {

struct Argmax {
    double x, fx, lo_val, hi_val;
};

/// Coarse grid then golden-section refinement around the best grid point.
inline Argmax grid_golden(const std::function<double(double)>& f, double lo, double hi,
                          std::size_t n, double xtol) {
    if (!(hi > lo)) {
        const double v = f(lo);
        return {lo, v, v, v};
    }
    std::vector<double> xs(n), fs(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
        fs[i] = f(xs[i]);
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (fs[i] > fs[best]) best = i;
    }
    double a = xs[best > 0 ? best - 1 : 0];
    double b = xs[std::min(best + 1, n - 1)];
    double bx = xs[best], bf = fs[best];
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - invphi * (b - a), d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > xtol) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    if (fc > bf) { bx = c; bf = fc; }
    if (fd > bf) { bx = d; bf = fd; }
    return {bx, bf, fs.front(), fs.back()};
}

inline double objective(KernelCache& cache, const Scenario& s, double tol) {
    const BarrierSolution b = cache.solve(s);
    if (b.method == SolveMethod::immediate_bankruptcy) return s.v0 * (1.0 - s.frictions.rho);
    return firm_terms(s, b.vb, tol).firm_value;
}

}  // namespace detail

/// Optimal participation rate with G fixed.
[[nodiscard]] inline OptimumResult optimize_alpha(const Scenario& s, KernelCache& cache,
                                                  const OptimizerOptions& o = {}) {
    validate(s);
    const double hi = alpha_upper_bound(s, o.margin);
    auto f = [&](double a) {
        Scenario t = s;
        t.contract.alpha = a;
        return detail::objective(cache, t, o.inner_tol);
    };
    const auto am = detail::grid_golden(f, 0.0, hi, o.grid_points, o.alpha_tol);
    OptimumResult r;
    r.bracket_lo = 0.0;
    r.bracket_hi = hi;
    r.objective_lo = am.lo_val;
    r.objective_hi = am.hi_val;
    Scenario at = s;
    at.contract.alpha = am.x;
    const BarrierSolution b = cache.solve(at);
    r.arg = {am.x};
    r.vb = b.vb;
    r.objective = detail::objective(cache, at, o.final_tol);
    r.boundary_flag = am.x <= o.alpha_tol || am.x >= hi - o.alpha_tol;
    if (r.boundary_flag || b.method == SolveMethod::immediate_bankruptcy) {
        r.foc_residual = {std::nan("")};
    } else {
        const double foc = dv_dalpha(at, b.vb, o.final_tol);
        r.foc_residual = {foc};
        r.foc_ok = std::abs(foc) < o.foc_rel_tol * s.v0;
    }
    return r;
}

[[nodiscard]] inline OptimumResult optimize_alpha(const Scenario& s, const OptimizerOptions& o = {}) {
    KernelCache cache;
    return optimize_alpha(s, cache, o);
}

/// Smallest G at which the barrier reaches V0.
[[nodiscard]] inline double g_total_max(const Scenario& s, KernelCache& cache, double rel_tol = 1e-10) {
    auto immediate_at = [&](double G) {
        Scenario t = s;
        t.contract.g_total = G;
        return cache.solve(t).method == SolveMethod::immediate_bankruptcy;
    };
    if (immediate_at(0.0)) return 0.0;
    double lo = 0.0, hi = std::max(1.0, s.contract.p_lump * 0.05);
    int guard = 0;
    while (!immediate_at(hi)) {
        lo = hi;
        hi *= 2.0;
        if (++guard > 60) throw NumericError("g_total_max: barrier never reaches V0");
    }
    while (hi - lo > rel_tol * hi) {
        const double mid = 0.5 * (lo + hi);
        (immediate_at(mid) ? hi : lo) = mid;
    }
    return hi;
}

/// Optimal guarantee rate g = G/T with alpha fixed.
[[nodiscard]] inline OptimumResult optimize_g(const Scenario& s, KernelCache& cache,
                                              const OptimizerOptions& o = {}) {
    validate(s);
    const double T = s.contract.t_mat;
    const double gmax = g_total_max(s, cache) / T;
    auto f = [&](double g) {
        Scenario t = s;
        t.contract.g_total = g * T;
        return detail::objective(cache, t, o.inner_tol);
    };
    const auto am = detail::grid_golden(f, 0.0, gmax, o.grid_points, o.g_tol);
    OptimumResult r;
    r.bracket_lo = 0.0;
    r.bracket_hi = gmax;
    r.objective_lo = am.lo_val;
    r.objective_hi = am.hi_val;
    Scenario at = s;
    at.contract.g_total = am.x * T;
    const BarrierSolution b = cache.solve(at);
    r.arg = {am.x};
    r.vb = b.vb;
    r.objective = detail::objective(cache, at, o.final_tol);
    r.boundary_flag = am.x <= o.g_tol || am.x >= gmax - o.g_tol;
    if (r.boundary_flag || b.method == SolveMethod::immediate_bankruptcy) {
        r.foc_residual = {std::nan("")};
    } else {
        const double foc = dv_dg(at, b.vb, o.final_tol);
        r.foc_residual = {foc};
        // dv/dg is scaled by T/r relative to dv/dalpha
        r.foc_ok = std::abs(foc) < o.foc_rel_tol * s.v0 * T / s.market.r;
    }
    return r;
}

[[nodiscard]] inline OptimumResult optimize_g(const Scenario& s, const OptimizerOptions& o = {}) {
    KernelCache cache;
    return optimize_g(s, cache, o);
}

enum class JointOrder { alpha_first, g_first };

/// Coordinate ascent over (alpha, g).
[[nodiscard]] inline OptimumResult optimize_joint(const Scenario& s, KernelCache& cache,
                                                  const OptimizerOptions& o = {},
                                                  JointOrder order = JointOrder::alpha_first,
                                                  int max_rounds = 50) {
    validate(s);
    Scenario cur = s;
    const double T = s.contract.t_mat;
    double prev = -std::numeric_limits<double>::infinity();
    OptimumResult ra, rg;
    OptimumResult out;
    out.converged = false;
    for (int round = 1; round <= max_rounds; ++round) {
        if (order == JointOrder::alpha_first) {
            ra = optimize_alpha(cur, cache, o);
            cur.contract.alpha = ra.arg[0];
            rg = optimize_g(cur, cache, o);
            cur.contract.g_total = rg.arg[0] * T;
        } else {
            rg = optimize_g(cur, cache, o);
            cur.contract.g_total = rg.arg[0] * T;
            ra = optimize_alpha(cur, cache, o);
            cur.contract.alpha = ra.arg[0];
        }
        const double v = detail::objective(cache, cur, o.final_tol);
        out.rounds = round;
        if (std::abs(v - prev) < 1e-8 * s.v0) {
            out.converged = true;
            break;
        }
        prev = v;
    }
    const BarrierSolution b = cache.solve(cur);
    out.arg = {cur.contract.alpha, cur.contract.g_total / T};
    out.vb = b.vb;
    out.objective = detail::objective(cache, cur, o.final_tol);
    out.boundary_flag = ra.boundary_flag || rg.boundary_flag;
    const bool imm = b.method == SolveMethod::immediate_bankruptcy;
    out.foc_residual = {ra.boundary_flag || imm ? std::nan("") : dv_dalpha(cur, b.vb, o.final_tol),
                        rg.boundary_flag || imm ? std::nan("") : dv_dg(cur, b.vb, o.final_tol)};
    out.foc_ok = ra.foc_ok && rg.foc_ok;
    out.bracket_lo = ra.bracket_lo;
    out.bracket_hi = ra.bracket_hi;
    return out;
}

[[nodiscard]] inline OptimumResult optimize_joint(const Scenario& s, const OptimizerOptions& o = {}) {
    KernelCache cache;
    return optimize_joint(s, cache, o);
}

struct TauBarResult {
    double tau_bar = 1.0;
    bool found = false;  // false: the alpha = 0 derivative is never positive on [0,1]
};

/// Smallest tau2 at which dv/dalpha at alpha = 0 turns positive.
[[nodiscard]] inline TauBarResult find_tau_bar(const Scenario& s, double tol = 1e-4) {
    auto deriv = [&](double tau2) {
        Scenario t = s;
        t.contract.alpha = 0.0;
        t.frictions.tau2 = tau2;
        const BarrierSolution b = solve_vb(t);
        return dv_dalpha(t, b.vb);
    };
    if (!(deriv(1.0) > 0.0)) return {1.0, false};
    if (deriv(0.0) > 0.0) return {0.0, true};
    double lo = 0.0, hi = 1.0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (deriv(mid) > 0.0 ? hi : lo) = mid;
    }
    return {hi, true};
}

}  // namespace parti
