#pragma once

#include "parti/closed_forms.hpp"
#include "parti/core_math.hpp"
#include "parti/quadrature.hpp"
#include "parti/valuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace parti {

enum class SolveMethod { closed_form_alpha_zero, closed_form_above_k, numeric_smallest_root, immediate_bankruptcy };

[[nodiscard]] inline const char* to_string(SolveMethod m) noexcept {
    switch (m) {
        case SolveMethod::closed_form_alpha_zero: return "closed-form-alpha-zero";
        case SolveMethod::closed_form_above_k: return "closed-form-above-k";
        case SolveMethod::numeric_smallest_root: return "numeric-smallest-root";
        case SolveMethod::immediate_bankruptcy: return "immediate-bankruptcy";
    }
    return "unknown";
}

struct AssumptionReport {
    bool alpha_below_bar = false;
    bool alpha_below_tilde = false;
    bool guarantee_value_exceeds_tb = false;
    bool surplus_value_exceeds_tb = false;
    bool continuity_sufficient = false;
    bool g_star_positive_condition = false;
};

struct BarrierSolution {
    double vb = 0.0;
    double residual = 0.0;
    SolveMethod method = SolveMethod::numeric_smallest_root;
    std::optional<AssumptionReport> diagnostics;
};

/// The two vb-independent pieces of the smooth-pasting residual:
/// h(vb) = c0 - c1/vb + alpha*(tau2*J_inf(vb) - J_T(vb)).
struct ResidualConstants {
    double c0;
    double c1;
};

[[nodiscard]] inline ResidualConstants residual_constants(const Scenario& s) {
    const auto& m = s.market;
    const auto& c = s.contract;
    const auto& f = s.frictions;
    const LambdaSet l = lambdas(m);
    const AConstants a = a_constants(m, c.t_mat, f);
    const double Gr = c.g_total / m.r;
    const double l23 = l.lambda2 + l.lambda3;
    return {1.0 + f.rho * l23 + 2.0 * (1.0 - f.rho) * a.a2,
            2.0 * (c.p_lump - Gr) * a.a1 / (m.r * c.t_mat) + 2.0 * Gr * a.a2 - f.tau1 * Gr * l23};
}

/// Bound on the integral of |D| over [t,inf).
[[nodiscard]] inline double barrier_deriv_tail_bound(double vb, double k, double t,
                                                     const MarketParams& m) {
    const LambdaSet l = lambdas(m);
    const double s2 = m.sigma * m.sigma;
    const double inv_st = inv_sqrt_2pi / (m.sigma * std::sqrt(t));
    // for a negative lambda the Phi and phi factors add Gaussian decay
    auto piece = [&](double lam, double rate, double scale) {
        if (lam < 0.0) {
            const double kappa = rate + 0.5 * lam * lam * s2;
            return scale * (0.5 * std::abs(lam) + inv_st) * std::exp(-kappa * t) / kappa;
        }
        return scale * (lam + inv_st) * std::exp(-rate * t) / rate;
    };
    double b = piece(l.lambda1, m.nu, 2.0);
    if (k > 0.0) b += piece(l.lambda2, m.r, 2.0 * k / vb);
    return b;
}

/// Same bound for d/dvb of D.
[[nodiscard]] inline double barrier_curvature_tail_bound(double vb, double k, double t,
                                                         const MarketParams& m) {
    if (k == 0.0) return 0.0;
    const LambdaSet l = lambdas(m);
    const double s2 = m.sigma * m.sigma;
    const double inv_st = inv_sqrt_2pi / (m.sigma * std::sqrt(t));
    const double scale = 2.0 * k / (vb * vb);
    const double lam = l.lambda2;
    if (lam < 0.0) {
        const double kappa = m.r + 0.5 * lam * lam * s2;
        return scale * (0.5 * std::abs(lam) + inv_st) * std::exp(-kappa * t) / kappa;
    }
    return scale * (lam + inv_st) * std::exp(-m.r * t) / m.r;
}

namespace detail {

template <class F, class B>
BarrierDerivIntegrals split_integrals(F&& f, B&& bound, double T, double tol) {
    const double head = require(integrate_finite(f, 0.0, T, tol), "barrier integral on [0,T]");
    auto shifted = [&](double s) { return f(T + s); };
    auto shifted_bound = [&](double s) { return bound(T + s); };
    const double tail =
        require(integrate_semi_infinite(shifted, tol, shifted_bound), "barrier integral on [T,inf)");
    return {head, head + tail};
}

}  // namespace detail

/// Integrals of D(t) over [0,T] and [0,inf). Closed form when vb >= k.
[[nodiscard]] inline BarrierDerivIntegrals barrier_integrals(double vb, double k, double T,
                                                             const MarketParams& m,
                                                             double tol = default_tol) {
    if (vb >= k) return barrier_deriv_integrals_closed(vb, k, T, m);
    return detail::split_integrals([&](double t) { return dcdo_dv_at_barrier(vb, k, t, m); },
                                   [&](double t) { return barrier_deriv_tail_bound(vb, k, t, m); },
                                   T, tol);
}

/// Integrals of d/dvb D(t) over [0,T] and [0,inf).
[[nodiscard]] inline BarrierDerivIntegrals curvature_integrals(double vb, double k, double T,
                                                               const MarketParams& m,
                                                               double tol = default_tol) {
    if (k == 0.0) return {0.0, 0.0};
    if (vb >= k) {
        const AConstants a = a_constants(m, T, FrictionParams{});
        return {k / (vb * vb) * a.a6, k / (vb * vb) * a.a5};
    }
    return detail::split_integrals([&](double t) { return d2cdo_dvb_dv_at_barrier(vb, k, t, m); },
                                   [&](double t) { return barrier_curvature_tail_bound(vb, k, t, m); },
                                   T, tol);
}

/// Smooth-pasting residual h2(vb).
[[nodiscard]] inline double smooth_pasting_residual(const Scenario& s, double vb,
                                                    double tol = default_tol) {
    if (!(vb > 0.0)) throw std::domain_error("smooth_pasting_residual requires vb > 0");
    const ResidualConstants rc = residual_constants(s);
    double h = rc.c0 - rc.c1 / vb;
    const double a = s.contract.alpha;
    if (a > 0.0) {
        const auto j = barrier_integrals(vb, s.contract.k_threshold, s.contract.t_mat, s.market, tol);
        h += a * (s.frictions.tau2 * j.int_0_inf - j.int_0_T);
    }
    return h;
}

/// d h2 / d vb.
[[nodiscard]] inline double residual_vb_derivative(const Scenario& s, double vb,
                                                   double tol = default_tol) {
    const ResidualConstants rc = residual_constants(s);
    double d = rc.c1 / (vb * vb);
    const double a = s.contract.alpha;
    if (a > 0.0) {
        const auto kk = curvature_integrals(vb, s.contract.k_threshold, s.contract.t_mat, s.market, tol);
        d += a * (s.frictions.tau2 * kk.int_0_inf - kk.int_0_T);
    }
    return d;
}

[[nodiscard]] inline double vb_closed_form_alpha0(const Scenario& s) {
    if (s.contract.alpha != 0.0) {
        throw std::invalid_argument("vb_closed_form_alpha0 requires alpha = 0");
    }
    const ResidualConstants rc = residual_constants(s);
    return rc.c1 / rc.c0;
}

/// Closed-form root for the vb >= k regime; empty when it does not apply.
[[nodiscard]] inline std::optional<double> vb_closed_form_above_k(const Scenario& s) {
    const auto& c = s.contract;
    const auto& f = s.frictions;
    const AConstants a = a_constants(s.market, c.t_mat, f);
    if (!a.alpha_tilde.unbounded && !(c.alpha < a.alpha_tilde.value)) return std::nullopt;
    const ResidualConstants rc = residual_constants(s);
    const double k = c.k_threshold;
    const double den = rc.c0 + f.tau2 * c.alpha * a.a3 - c.alpha * a.a4;
    if (!(den > 0.0)) return std::nullopt;
    const double vb = (rc.c1 + f.tau2 * c.alpha * k * a.a5 - c.alpha * k * a.a6) / den;
    if (!(vb >= k) || !(vb > 0.0)) return std::nullopt;
    return vb;
}

/// Precomputed D-integrals on the scan grid for one (market, T, k, V-range).
/// Reused by every solve that shares those inputs.
class BarrierKernel {
public:
    static constexpr std::size_t grid_points = 2048;
    static constexpr double grid_floor = 1e-6;

    BarrierKernel(const MarketParams& m, double T, double k, double v_hi, double tol = default_tol)
        : m_(m), T_(T), k_(k), v_hi_(v_hi), tol_(tol) {
        grid_.resize(grid_points);
        j_.resize(grid_points);
        const double lo = std::log(grid_floor * v_hi), hi = std::log(v_hi);
        for (std::size_t i = 0; i < grid_points; ++i) {
            grid_[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / (grid_points - 1));
            j_[i] = barrier_integrals(grid_[i], k_, T_, m_, tol_);
        }
    }

    [[nodiscard]] bool matches(const Scenario& s) const noexcept {
        return s.market.r == m_.r && s.market.nu == m_.nu && s.market.sigma == m_.sigma &&
               s.contract.t_mat == T_ && s.contract.k_threshold == k_ && s.v0 <= v_hi_;
    }

    [[nodiscard]] BarrierDerivIntegrals integrals(double vb) const {
        return barrier_integrals(vb, k_, T_, m_, tol_);
    }

    [[nodiscard]] const std::vector<double>& grid() const noexcept { return grid_; }
    [[nodiscard]] const std::vector<BarrierDerivIntegrals>& values() const noexcept { return j_; }
    [[nodiscard]] double tol() const noexcept { return tol_; }

private:
    MarketParams m_;
    double T_, k_, v_hi_, tol_;
    std::vector<double> grid_;
    std::vector<BarrierDerivIntegrals> j_;
};

namespace detail {

inline BarrierSolution capped(double root, double h_at_root, const Scenario& s, SolveMethod m) {
    if (root >= s.v0) {
        return {s.v0, h_at_root, SolveMethod::immediate_bankruptcy, std::nullopt};
    }
    return {root, h_at_root, m, std::nullopt};
}

inline BarrierSolution numeric_solve(const Scenario& s, const BarrierKernel& kernel) {
    const ResidualConstants rc = residual_constants(s);
    const double a = s.contract.alpha, tau2 = s.frictions.tau2;
    auto h_of = [&](double vb, const BarrierDerivIntegrals& j) {
        return rc.c0 - rc.c1 / vb + a * (tau2 * j.int_0_inf - j.int_0_T);
    };
    auto h = [&](double vb) { return h_of(vb, kernel.integrals(vb)); };

    const auto& grid = kernel.grid();
    const auto& vals = kernel.values();
    // plateau values this close to zero are not treated as roots
    const double zero_band = 1e-10 * std::abs(rc.c0);
    std::size_t n = 0;
    while (n < grid.size() && grid[n] <= s.v0 * (1.0 + 1e-12)) ++n;
    if (n < 2) throw NumericError("solve_vb: scan grid does not cover (0, V0]");

    std::vector<double> hv(n);
    for (std::size_t i = 0; i < n; ++i) hv[i] = h_of(grid[i], vals[i]);
    if (!(hv[0] < 0.0)) {
        throw NumericError("solve_vb: residual is not negative near zero");
    }
    std::size_t cell = n;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (hv[i] < 0.0 && hv[i + 1] > zero_band) {
            cell = i;
            break;
        }
    }
    if (cell == n) {
        const double top = h(s.v0);
        if (top > zero_band) {
            // the last grid cell may end slightly below V0
            cell = n - 1;
        } else {
            return {s.v0, top, SolveMethod::immediate_bankruptcy, std::nullopt};
        }
    }
    double lo = grid[cell];
    double hi = cell + 1 < n ? grid[cell + 1] : s.v0;
    // refinement pass at 4x density over the cell and its predecessor
    {
        const double start = cell > 0 ? grid[cell - 1] : lo;
        std::vector<double> pts;
        const int sub = cell > 0 ? 8 : 4;
        for (int i = 0; i <= sub; ++i) {
            pts.push_back(std::exp(std::log(start) + (std::log(hi) - std::log(start)) * i / sub));
        }
        double prev = h(pts[0]);
        for (std::size_t i = 1; i < pts.size(); ++i) {
            const double cur = h(pts[i]);
            if (prev < 0.0 && cur > zero_band) {
                lo = pts[i - 1];
                hi = pts[i];
                break;
            }
            prev = cur;
        }
    }
    for (int it = 0; it < 200 && (hi - lo) > 1e-10 * hi; ++it) {
        const double mid = std::sqrt(lo * hi);
        (h(mid) < 0.0 ? lo : hi) = mid;
    }
    const double root = hi;
    return capped(root, h(root), s, SolveMethod::numeric_smallest_root);
}

}  // namespace detail

namespace detail {

inline std::optional<BarrierSolution> closed_form_solve(const Scenario& s, double tol) {
    if (s.contract.alpha == 0.0) {
        const double vb = vb_closed_form_alpha0(s);
        if (!(vb > 0.0)) throw NumericError("solve_vb: closed-form barrier is not positive");
        const ResidualConstants rc = residual_constants(s);
        const double root = std::min(vb, s.v0);
        return capped(vb, rc.c0 - rc.c1 / root, s, SolveMethod::closed_form_alpha_zero);
    }
    if (const auto cf = vb_closed_form_above_k(s)) {
        const double root = std::min(*cf, s.v0);
        return capped(*cf, smooth_pasting_residual(s, root, tol), s, SolveMethod::closed_form_above_k);
    }
    return std::nullopt;
}

}  // namespace detail

/// Endogenous barrier using a prebuilt kernel for the numeric branch.
[[nodiscard]] inline BarrierSolution solve_vb(const Scenario& s, const BarrierKernel& kernel) {
    validate(s);
    if (auto cf = detail::closed_form_solve(s, kernel.tol())) return *cf;
    if (!kernel.matches(s)) throw std::invalid_argument("solve_vb: kernel built for other inputs");
    return detail::numeric_solve(s, kernel);
}

/// Endogenous barrier: min(V0, smallest root of the smooth-pasting residual).
[[nodiscard]] inline BarrierSolution solve_vb(const Scenario& s, double tol = default_tol) {
    validate(s);
    if (auto cf = detail::closed_form_solve(s, tol)) return *cf;
    const BarrierKernel kernel(s.market, s.contract.t_mat, s.contract.k_threshold, s.v0, tol);
    return detail::numeric_solve(s, kernel);
}

/// Integral over t in [0,inf) of dc_do/dvb at V = v.
[[nodiscard]] inline double cdo_dvb_integral_perpetual(double v, double k, double vb,
                                                       const MarketParams& m,
                                                       double tol = default_tol) {
    if (v <= vb || vb <= 0.0) return 0.0;
    const LambdaSet l = lambdas(m);
    const double lr = std::log(vb / v);
    const double p1 = std::max(1.0, std::exp(2.0 * l.lambda1 * lr));
    const double p2 = std::max(1.0, std::exp((2.0 * l.lambda1 - 2.0) * lr));
    auto bound = [&](double t) {
        const double inv_st = 1.0 / (m.sigma * std::sqrt(t));
        double b = v / vb * 4.0 * (std::abs(l.lambda1) + inv_st) * p1 * std::exp(-m.nu * t) / m.nu;
        b += k / vb * 4.0 * (std::abs(l.lambda1 - 1.0) + inv_st) * p2 * std::exp(-m.r * t) / m.r;
        return b;
    };
    auto f = [&](double t) { return t > 0.0 ? dcdo_dvb({v, k, vb, t}, m) : 0.0; };
    return require(integrate_semi_infinite(f, tol, bound), "perpetual dc_do/dvb integral");
}

/// Left side of the g* > 0 condition: dv/dg at G = 0 with the scenario's alpha.
/// -inf when V_B(0) already means immediate bankruptcy, NaN when the barrier derivative is singular.
[[nodiscard]] inline double dv_dg_at_zero(const Scenario& s, double tol = default_tol) {
    const auto& m = s.market;
    const auto& c = s.contract;
    const auto& f = s.frictions;
    Scenario s0 = s;
    s0.contract.g_total = 0.0;
    const BarrierSolution b0 = solve_vb(s0, tol);
    if (b0.method == SolveMethod::immediate_bankruptcy) return -std::numeric_limits<double>::infinity();
    const AConstants a = a_constants(m, c.t_mat, f);
    const LambdaSet l = lambdas(m);
    const double l23 = l.lambda2 + l.lambda3;
    const double vb0 = b0.vb;
    const double T = c.t_mat;
    double rvb = 2.0 * c.p_lump * a.a1 / (vb0 * vb0 * m.r * T);
    if (c.alpha > 0.0) {
        const auto kk = curvature_integrals(vb0, c.k_threshold, T, m, tol);
        rvb += c.alpha * (f.tau2 * kk.int_0_inf - kk.int_0_T);
    }
    if (!(std::abs(rvb) > 1e-14)) return std::numeric_limits<double>::quiet_NaN();
    const double vbp = T / (vb0 * m.r) * (-2.0 * a.a1 / (m.r * T) + 2.0 * a.a2 - f.tau1 * l23) / rvb;
    const double pw = std::exp(l23 * std::log(vb0 / s.v0));
    double d = f.tau1 * T / m.r * (1.0 - pw) - f.rho * (l23 + 1.0) * pw * vbp;
    if (c.alpha > 0.0 && f.tau2 > 0.0) {
        d += c.alpha * f.tau2 * vbp * cdo_dvb_integral_perpetual(s.v0, c.k_threshold, vb0, m, tol);
    }
    return d;
}

/// Evaluates each assumption and sufficient condition at the barrier vb.
[[nodiscard]] inline AssumptionReport check_assumptions(const Scenario& s, double vb,
                                                        double tol = default_tol) {
    AssumptionReport rep;
    const auto& m = s.market;
    const auto& c = s.contract;
    const auto& f = s.frictions;
    const AConstants a = a_constants(m, c.t_mat, f);
    rep.alpha_below_bar = a.alpha_bar.unbounded || c.alpha < a.alpha_bar.value;
    rep.alpha_below_tilde = a.alpha_tilde.unbounded || c.alpha < a.alpha_tilde.value;

    const ExcessChecks ex = excess_checks(s, vb, tol);
    rep.guarantee_value_exceeds_tb = ex.guarantee_value_exceeds_tb;
    rep.surplus_value_exceeds_tb = ex.surplus_value_exceeds_tb;

    const ResidualConstants rc = residual_constants(s);
    if (vb >= c.k_threshold) {
        rep.continuity_sufficient = true;
    } else {
        const auto kk = curvature_integrals(vb, c.k_threshold, c.t_mat, m, tol);
        rep.continuity_sufficient =
            rc.c1 + vb * vb * c.alpha * (f.tau2 * kk.int_0_inf - kk.int_0_T) > 0.0;
    }

    rep.g_star_positive_condition = dv_dg_at_zero(s, tol) > 0.0;
    return rep;
}

/// The two excess assumptions in their local form, differentiated in V at V = vb.
/// These are what the monotonicity of V_B in alpha and G rests on.
struct LocalExcess {
    bool guarantee;
    bool surplus;
};

[[nodiscard]] inline LocalExcess local_excess_at_barrier(const Scenario& s, double vb, double tol = default_tol) {
    const auto& m = s.market;
    const auto& c = s.contract;
    const AConstants a = a_constants(m, c.t_mat, s.frictions);
    const LambdaSet l = lambdas(m);
    const double Gr = c.g_total / m.r;
    const double lhs = -2.0 * Gr * a.a1 / (m.r * c.t_mat) + 2.0 * Gr * a.a2;
    LocalExcess out{lhs >= s.frictions.tau1 * Gr * (l.lambda2 + l.lambda3), true};
    if (vb > 0.0 && c.k_threshold > 0.0) {
        const BarrierDerivIntegrals j = barrier_integrals(vb, c.k_threshold, c.t_mat, m, tol);
        out.surplus = j.int_0_T >= s.frictions.tau2 * j.int_0_inf;
    }
    return out;
}

/// solve_vb followed by check_assumptions.
[[nodiscard]] inline BarrierSolution solve_vb_diagnosed(const Scenario& s, double tol = default_tol) {
    BarrierSolution b = solve_vb(s, tol);
    b.diagnostics = check_assumptions(s, b.vb, tol);
    return b;
}

}  // namespace parti
