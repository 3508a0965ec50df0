#pragma once

#include "parti/closed_forms.hpp"
#include "parti/core_math.hpp"
#include "parti/quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace parti {

/// Portfolio terms: maturity T, aggregate lump sum P, aggregate guarantee G,
/// participation threshold k and participation rate alpha.
struct ContractParams {
    double t_mat = 30.0;
    double p_lump = 95.0;
    double g_total = 1.9;
    double k_threshold = 150.0;
    double alpha = 0.05;

    [[nodiscard]] double g_rate() const noexcept { return g_total / t_mat; }
    [[nodiscard]] double p_rate() const noexcept { return p_lump / t_mat; }
};

struct Scenario {
    double v0 = 100.0;
    MarketParams market{};
    ContractParams contract{};
    FrictionParams frictions{};

    /// True when the threshold sits below the initial asset value.
    [[nodiscard]] bool k_below_v0() const noexcept { return contract.k_threshold < v0; }
};

/// The base parametrization used throughout the numerical study.
[[nodiscard]] inline Scenario base_scenario() { return Scenario{}; }

inline void validate(const Scenario& s) {
    if (!(s.v0 > 0.0) || !std::isfinite(s.v0)) throw std::invalid_argument("v0 must be positive");
    if (!s.market.valid()) throw std::invalid_argument("r, nu, sigma must be positive");
    if (!s.frictions.valid()) throw std::invalid_argument("tau1, tau2, rho must lie in [0,1]");
    const auto& c = s.contract;
    if (!(c.t_mat > 0.0)) throw std::invalid_argument("t_mat must be positive");
    if (!(c.p_lump > 0.0)) throw std::invalid_argument("p_lump must be positive");
    if (!(c.g_total >= 0.0)) throw std::invalid_argument("g_total must be nonnegative");
    if (!(c.k_threshold >= 0.0)) throw std::invalid_argument("k_threshold must be nonnegative");
    if (!(c.alpha >= 0.0 && c.alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0,1]");
}

struct ValuationBreakdown {
    double firm_value = 0.0;
    double equity = 0.0;
    double equity_raw = 0.0;  ///< v - L before the absolute-priority floor
    double l_total = 0.0;
    double tb1 = 0.0;
    double tb2 = 0.0;
    double bc = 0.0;
    double vb = 0.0;
};

/// Bound on the integral of c_do over [t,inf).
[[nodiscard]] inline double cdo_tail_bound(double v, double nu, double t) noexcept {
    return v / nu * std::exp(-nu * t);
}

/// Integral of c_do(v,k,vb,t) over t in [0,T].
[[nodiscard]] inline IntegralResult cdo_integral_finite(double v, double k, double vb, double T,
                                                        const MarketParams& m,
                                                        double tol = default_tol) {
    if (v <= vb) return {0.0, 0.0, 0, true};
    auto f = [&](double t) { return t > 0.0 ? down_and_out_call({v, k, vb, t}, m) : 0.0; };
    return integrate_finite(f, 0.0, T, tol);
}

/// Integral of c_do(v,k,vb,t) over t in [0,inf).
[[nodiscard]] inline IntegralResult cdo_integral_perpetual(double v, double k, double vb,
                                                           const MarketParams& m,
                                                           double tol = default_tol) {
    if (v <= vb) return {0.0, 0.0, 0, true};
    auto f = [&](double t) { return t > 0.0 ? down_and_out_call({v, k, vb, t}, m) : 0.0; };
    return integrate_semi_infinite(f, tol, [&](double t) { return cdo_tail_bound(v, m.nu, t); });
}

/// Liability of the cohort maturing at t.
[[nodiscard]] inline double cohort_liability(const Scenario& s, double vb, double t) {
    const double v = s.v0;
    if (!(v >= vb) || !(vb >= 0.0) || !(t > 0.0) || t > s.contract.t_mat) {
        throw std::domain_error("cohort_liability requires v0 >= vb >= 0 and t in (0,T]");
    }
    const auto& m = s.market;
    const double g = s.contract.g_rate();
    const double p = s.contract.p_rate();
    double f = 0.0, gd = 0.0;
    if (vb > 0.0) {
        f = first_passage_cdf(v, vb, t, m);
        gd = discounted_passage(v, vb, t, m);
    }
    const double part =
        s.contract.alpha > 0.0 ? down_and_out_call({v, s.contract.k_threshold, vb, t}, m) : 0.0;
    return g / m.r + std::exp(-m.r * t) * (p - g / m.r) * (1.0 - f) +
           ((1.0 - s.frictions.rho) * vb - g / m.r) * gd + s.contract.alpha * part;
}

/// Total liability L of the stationary portfolio.
[[nodiscard]] inline double total_liability(const Scenario& s, double vb, double tol = default_tol) {
    const double v = s.v0;
    if (!(v >= vb) || !(vb >= 0.0)) throw std::domain_error("total_liability requires v0 >= vb >= 0");
    const auto& m = s.market;
    const auto& c = s.contract;
    const double T = c.t_mat;
    const double Gr = c.g_total / m.r;
    double i1 = 0.0, i2 = 0.0;
    if (vb > 0.0) {
        const I12 ii = i1_i2(v, vb, T, m);
        i1 = ii.i1;
        i2 = ii.i2;
    }
    double part = 0.0;
    if (c.alpha > 0.0) {
        part = require(cdo_integral_finite(v, c.k_threshold, vb, T, m, tol), "participation integral");
    }
    return Gr + (c.p_lump - Gr) * ((1.0 - std::exp(-m.r * T)) / (m.r * T) - i1) +
           ((1.0 - s.frictions.rho) * vb - Gr) * i2 + c.alpha * part;
}

/// TB1, TB2 and BC at barrier vb, without the liability.
struct FirmTerms {
    double tb1, tb2, bc, firm_value;
};

[[nodiscard]] inline FirmTerms firm_terms(const Scenario& s, double vb, double tol = default_tol) {
    const double v = s.v0;
    const auto& m = s.market;
    const auto& c = s.contract;
    const auto& f = s.frictions;
    const LambdaSet l = lambdas(m);
    const double pw = vb > 0.0 ? std::exp((l.lambda2 + l.lambda3) * std::log(vb / v)) : 0.0;
    FirmTerms out{};
    out.tb1 = f.tau1 * c.g_total / m.r * (1.0 - pw);
    out.tb2 = 0.0;
    if (c.alpha > 0.0 && f.tau2 > 0.0) {
        out.tb2 = f.tau2 * c.alpha *
                  require(cdo_integral_perpetual(v, c.k_threshold, vb, m, tol), "perpetual participation");
    }
    out.bc = f.rho * vb * pw;
    out.firm_value = v + out.tb1 + out.tb2 - out.bc;
    return out;
}

/// Firm value, equity and their components at barrier vb.
/// At or below the barrier the firm is liquidated: v = V(1-rho) and E = 0.
[[nodiscard]] inline ValuationBreakdown firm_value(const Scenario& s, double vb,
                                                   double tol = default_tol) {
    if (!(vb >= 0.0)) throw std::domain_error("firm_value requires vb >= 0");
    ValuationBreakdown out;
    out.vb = vb;
    if (s.v0 <= vb) {
        out.bc = s.frictions.rho * s.v0;
        out.firm_value = s.v0 - out.bc;
        out.l_total = out.firm_value;
        return out;
    }
    const FirmTerms ft = firm_terms(s, vb, tol);
    out.tb1 = ft.tb1;
    out.tb2 = ft.tb2;
    out.bc = ft.bc;
    out.firm_value = ft.firm_value;
    out.l_total = total_liability(s, vb, tol);
    out.equity_raw = out.firm_value - out.l_total;
    out.equity = out.equity_raw;
    return out;
}

/// Equity at each V of the grid for a fixed barrier; zero at or below vb.
[[nodiscard]] inline std::vector<std::pair<double, double>> equity_curve(
    const Scenario& s, double vb, const std::vector<double>& v_grid, double tol = default_tol) {
    std::vector<std::pair<double, double>> out;
    out.reserve(v_grid.size());
    Scenario at = s;
    for (double v : v_grid) {
        at.v0 = v;
        out.emplace_back(v, v <= vb ? 0.0 : firm_value(at, vb, tol).equity);
    }
    return out;
}

/// Value of the guaranteed stream over all cohorts, before tax.
[[nodiscard]] inline double guarantee_stream_value(const Scenario& s, double vb) {
    const auto& m = s.market;
    const double T = s.contract.t_mat;
    double i1 = 0.0, i2 = 0.0;
    if (vb > 0.0 && s.v0 > vb) {
        const I12 ii = i1_i2(s.v0, vb, T, m);
        i1 = ii.i1;
        i2 = ii.i2;
    } else if (s.v0 <= vb) {
        return 0.0;
    }
    return s.contract.g_total / m.r * (1.0 - (1.0 - std::exp(-m.r * T)) / (m.r * T) + i1 - i2);
}

struct ExcessChecks {
    bool guarantee_value_exceeds_tb;
    bool surplus_value_exceeds_tb;
};

/// The two liability-versus-tax-benefit inequalities at V = v0.
[[nodiscard]] inline ExcessChecks excess_checks(const Scenario& s, double vb, double tol = default_tol) {
    if (s.v0 <= vb) return {true, true};
    const FirmTerms ft = firm_terms(s, vb, tol);
    const double lhs_g = guarantee_stream_value(s, vb);
    const auto& c = s.contract;
    const double fin = require(cdo_integral_finite(s.v0, c.k_threshold, vb, c.t_mat, s.market, tol));
    const double inf = require(cdo_integral_perpetual(s.v0, c.k_threshold, vb, s.market, tol));
    const double slack = 1e-12 * std::max(1.0, s.v0);
    return {lhs_g + slack >= ft.tb1, fin + slack >= s.frictions.tau2 * inf};
}

}  // namespace parti
