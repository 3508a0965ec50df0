#pragma once

#include "parti/bankruptcy_solver.hpp"
#include "parti/mc_oracle.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace parti {

enum class CheckStatus { pass, fail, info };

struct CheckLine {
    std::string name;
    CheckStatus status;
    std::string detail;
};

[[nodiscard]] inline const char* to_string(CheckStatus s) noexcept {
    return s == CheckStatus::pass ? "PASS" : s == CheckStatus::fail ? "FAIL" : "INFO";
}

[[nodiscard]] inline double rel_err(double a, double b) {
    return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

/// Lemma integrals by double-exponential quadrature, independent of the GK driver.
[[nodiscard]] inline LemmaIntegrals lemma_integrals_numeric(double lambda, double sigma, double rate, double T) {
    boost::math::quadrature::tanh_sinh<double> ts;
    boost::math::quadrature::exp_sinh<double> es;
    const double ls = lambda * sigma;
    // t = u^2 removes the 1/sqrt(t) endpoint singularity
    auto phi_u = [&](double u) { return 2.0 * std::exp(-rate * u * u) * std_normal_pdf(ls * u); };
    auto cdf_t = [&](double t) { return std::exp(-rate * t) * std_normal_cdf(ls * std::sqrt(t)); };
    LemmaIntegrals out{};
    out.phi_finite = ts.integrate(phi_u, 0.0, std::sqrt(T), 1e-13);
    out.phi_infinite = es.integrate(phi_u, 1e-13);
    out.cdf_finite = ts.integrate(cdf_t, 0.0, T, 1e-13);
    out.cdf_infinite = es.integrate(cdf_t, 1e-13);
    return out;
}

[[nodiscard]] inline double lemma_max_rel_err(double lambda, double sigma, double rate, double T) {
    const LemmaIntegrals a = lemma_integrals(lambda, sigma, rate, T);
    const LemmaIntegrals b = lemma_integrals_numeric(lambda, sigma, rate, T);
    return std::max({rel_err(a.phi_finite, b.phi_finite), rel_err(a.phi_infinite, b.phi_infinite),
                     rel_err(a.cdf_finite, b.cdf_finite), rel_err(a.cdf_infinite, b.cdf_infinite)});
}

/// E(vb) and the one-sided slope of E just above vb.
struct SmoothPasting {
    double equity_at_vb;
    double slope_above_vb;
};

[[nodiscard]] inline SmoothPasting smooth_pasting_check(const Scenario& s, double vb, double tol = default_tol) {
    Scenario q = s;
    q.v0 = vb;
    const double e0 = firm_value(q, vb * (1.0 - 1e-15), tol).equity;
    const double h = 1e-4 * vb;
    q.v0 = vb + h;
    const double e1 = firm_value(q, vb, tol).equity;
    q.v0 = vb + 2.0 * h;
    const double e2 = firm_value(q, vb, tol).equity;
    // second-order one-sided difference, E(vb) = 0 by construction
    return {e0, (-3.0 * 0.0 + 4.0 * e1 - e2) / (2.0 * h)};
}

struct McCheck {
    std::string name;
    double closed_form;
    Estimate mc;
    [[nodiscard]] double z() const { return mc.z_score(closed_form); }
};

/// c_do, F, G and the four liability parts on one set of paths.
[[nodiscard]] inline std::vector<McCheck> mc_agreement(const Scenario& s, double vb, double t, const McConfig& cfg) {
    const auto& m = s.market;
    std::vector<McCheck> out;
    const double k = s.contract.k_threshold;
    detail::Accumulator cdo, f, g;
    const double disc = std::exp(-m.r * t);
    detail::simulate_paths(s.v0, vb, t, m, cfg, [&](const PathOutcome& o) {
        cdo.add(o.killed ? 0.0 : disc * std::max(o.v_t - k, 0.0));
        f.add(o.killed ? 1.0 : 0.0);
        g.add(o.killed ? std::exp(-m.r * o.tau) : 0.0);
    });
    out.push_back({"c_do", down_and_out_call({s.v0, k, vb, t}, m), cdo.estimate()});
    out.push_back({"F", first_passage_cdf(s.v0, vb, t, m), f.estimate()});
    out.push_back({"G", discounted_passage(s.v0, vb, t, m), g.estimate()});
    McConfig c2 = cfg;
    c2.seed = cfg.seed ^ 0x9e3779b97f4a7c15ULL;
    const LiabilityComponents lc = mc_liability_components(s, vb, t, c2);
    const LiabilityParts lp = liability_parts(s, vb, t);
    out.push_back({"annuity", lp.annuity, lc.annuity});
    out.push_back({"lump_sum", lp.lump_sum, lc.lump_sum});
    out.push_back({"recovery", lp.recovery, lc.recovery});
    out.push_back({"participation", lp.participation, lc.participation});
    return out;
}

struct ValidationOptions {
    McConfig mc;
    double z_gate = 3.0;
    double mc_horizon = 5.0;
    bool run_mc = true;
};

[[nodiscard]] inline std::string fmt_detail(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

[[nodiscard]] inline std::vector<CheckLine> run_validation(const Scenario& s, const ValidationOptions& o) {
    std::vector<CheckLine> lines;
    auto add = [&](std::string name, bool ok, std::string detail) {
        lines.push_back({std::move(name), ok ? CheckStatus::pass : CheckStatus::fail, std::move(detail)});
    };
    const BarrierSolution b = solve_vb(s);
    lines.push_back({"solve_vb", CheckStatus::info,
                     fmt_detail("vb=%.8g residual=%.3g", b.vb, b.residual) + " method=" + to_string(b.method)});
    const AssumptionReport ar = check_assumptions(s, b.vb);
    add("assumption.alpha_below_alpha_bar", ar.alpha_below_bar, "");
    add("assumption.alpha_below_alpha_tilde", ar.alpha_below_tilde, "");
    add("assumption.guarantee_value_exceeds_tb1", ar.guarantee_value_exceeds_tb, "");
    add("assumption.surplus_value_exceeds_tb2", ar.surplus_value_exceeds_tb, "");
    lines.push_back({"assumption.continuity_sufficient", ar.continuity_sufficient ? CheckStatus::pass : CheckStatus::info,
                     ar.continuity_sufficient ? "" : "sufficient condition not met (not an error)"});
    add("assumption.g_star_positive", ar.g_star_positive_condition, "");

    const LambdaSet l = lambdas(s.market);
    const double T = s.contract.t_mat;
    const double e1 = lemma_max_rel_err(l.lambda1, s.market.sigma, s.market.nu, T);
    const double e2 = lemma_max_rel_err(l.lambda2, s.market.sigma, s.market.r, T);
    add("lemma_integrals", std::max(e1, e2) < 1e-8, fmt_detail("max_rel_err=%.3g", std::max(e1, e2)));

    const double k = s.contract.k_threshold;
    if (k > 0.0) {
        const double vb_hi = 1.25 * k;
        const BarrierDerivIntegrals cf = barrier_deriv_integrals_closed(vb_hi, k, T, s.market);
        auto f = [&](double t) { return dcdo_dv_at_barrier(vb_hi, k, t, s.market); };
        const double fin = require(integrate_finite(f, 0.0, T, 1e-11));
        const double inf = require(integrate_semi_infinite(
            f, 1e-11, [&](double t) { return barrier_deriv_tail_bound(vb_hi, k, t, s.market); }));
        const double e = std::max(rel_err(cf.int_0_T, fin), rel_err(cf.int_0_inf, inf));
        add("barrier_integrals_closed_form", e < 1e-8, fmt_detail("max_rel_err=%.3g", e));
    }

    if (b.method != SolveMethod::immediate_bankruptcy) {
        const SmoothPasting sp = smooth_pasting_check(s, b.vb);
        add("smooth_pasting.equity_at_vb", std::abs(sp.equity_at_vb) < 1e-8 * s.v0,
            fmt_detail("E(vb)=%.3g", sp.equity_at_vb));
        add("smooth_pasting.slope", std::abs(sp.slope_above_vb) < 1e-4, fmt_detail("dE/dV=%.3g", sp.slope_above_vb));
    }

    if (o.run_mc) {
        const double t = std::min(o.mc_horizon, T);
        const double vb = std::min(b.vb, s.v0);
        for (const McCheck& c : mc_agreement(s, vb, t, o.mc)) {
            add("mc." + c.name, std::abs(c.z()) <= o.z_gate,
                fmt_detail("closed=%.8g mc=%.8g z=%.2f", c.closed_form, c.mc.mean, c.z()));
        }
    }
    return lines;
}

}  // namespace parti
