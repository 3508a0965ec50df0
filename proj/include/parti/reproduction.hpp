#pragma once

#include "parti/analysis.hpp"

#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace parti {

/// dv/dalpha at alpha = 0, other inputs unchanged.
[[nodiscard]] inline double dv_dalpha_at_zero(const Scenario& s, double tol = default_tol) {
    Scenario q = s;
    q.contract.alpha = 0.0;
    const BarrierSolution b = solve_vb(q, tol);
    return dv_dalpha(q, b.vb, tol);
}

/// Boundary of a predicate that holds at lo and fails at hi, by bisection.
[[nodiscard]] inline double predicate_boundary(const std::function<bool(double)>& holds, double lo, double hi,
                                               double tol) {
    if (!holds(lo)) throw NumericError("predicate_boundary: predicate fails at the lower end");
    if (holds(hi)) throw NumericError("predicate_boundary: predicate holds at the upper end");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (holds(mid) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// P/V0 above which dv/dalpha at alpha = 0 is no longer positive (G/P held).
[[nodiscard]] inline double alpha_threshold_p_over_v0(const Scenario& s, double lo = 0.5, double hi = 3.0,
                                                      double tol = 1e-4) {
    return predicate_boundary(
        [&](double x) {
            Scenario q = s;
            detail::set_p_over_v0(q, x);
            return dv_dalpha_at_zero(q) > 0.0;
        },
        lo, hi, tol);
}

/// G/P above which dv/dalpha at alpha = 0 is no longer positive.
[[nodiscard]] inline double alpha_threshold_g_over_p(const Scenario& s, double lo = 0.0, double hi = 0.11,
                                                     double tol = 1e-5) {
    return predicate_boundary(
        [&](double x) {
            Scenario q = s;
            detail::set_g_over_p(q, x);
            return dv_dalpha_at_zero(q) > 0.0;
        },
        lo, hi, tol);
}

/// P/V0 above which the g* > 0 condition fails.
[[nodiscard]] inline double g_threshold_p_over_v0(const Scenario& s, double lo = 0.5, double hi = 3.0,
                                                  double tol = 1e-4) {
    return predicate_boundary(
        [&](double x) {
            Scenario q = s;
            detail::set_p_over_v0(q, x);
            return dv_dg_at_zero(q) > 0.0;
        },
        lo, hi, tol);
}

/// tau1 below which the g* > 0 condition fails.
[[nodiscard]] inline double g_threshold_tau1(const Scenario& s, double lo = 0.0, double hi = 1.0,
                                             double tol = 1e-5) {
    // predicate is "fails", which holds at tau1 = 0
    return predicate_boundary(
        [&](double x) {
            Scenario q = s;
            q.frictions.tau1 = x;
            return !(dv_dg_at_zero(q) > 0.0);
        },
        lo, hi, tol);
}

/// alpha* with G at its base value, g* with alpha at its base value, and V_B at the pair.
struct SeparableOptimum {
    OptimumResult alpha;
    OptimumResult g;
    double alpha_star = 0.0, g_star = 0.0, vb = 0.0, firm_value = 0.0;
};

[[nodiscard]] inline SeparableOptimum separable_optimum(const Scenario& s, KernelCache& cache,
                                                        const OptimizerOptions& o = {}) {
    SeparableOptimum out;
    out.alpha = optimize_alpha(s, cache, o);
    out.g = optimize_g(s, cache, o);
    out.alpha_star = out.alpha.arg[0];
    out.g_star = out.g.arg[0];
    Scenario at = s;
    at.contract.alpha = out.alpha_star;
    at.contract.g_total = out.g_star * s.contract.t_mat;
    out.vb = cache.solve(at).vb;
    out.firm_value = detail::objective(cache, at, o.final_tol);
    return out;
}

/// One quoted number, its reproduction and the tolerance band.
struct PaperRow {
    std::string name;
    double value;
    double paper;
    double lo, hi;
    bool known_deviation = false;

    [[nodiscard]] bool pass() const { return value >= lo && value <= hi; }
};

struct ReproductionOptions {
    bool fast = false;
};

[[nodiscard]] inline std::vector<PaperRow> reproduce_paper_rows(const Scenario& base,
                                                                const ReproductionOptions& ro = {}) {
    std::vector<PaperRow> rows;
    KernelCache cache;
    const SeparableOptimum so = separable_optimum(base, cache);
    const double T = base.contract.t_mat;
    rows.push_back({"alpha_star", so.alpha_star, 0.099, 0.094, 0.104});
    rows.push_back({"g_star_over_p", so.g_star * T / base.contract.p_lump, 0.0191, 0.0186, 0.0196});
    rows.push_back({"vb_star_over_v0", so.vb / base.v0, 0.4536, 0.4486, 0.4586});
    const AConstants a = a_constants(base.market, T, base.frictions);
    rows.push_back({"alpha_bar", a.alpha_bar.value, 0.12, 0.115, 0.125});
    rows.push_back({"g_over_p_immediate_bankruptcy", g_total_max(base, cache) / base.contract.p_lump, 0.111,
                    0.108, 0.114});
    rows.push_back({"tau_bar", find_tau_bar(base).tau_bar, 0.08, 0.07, 0.09});
    rows.push_back({"alpha_zero_p_over_v0", alpha_threshold_p_over_v0(base), 1.50, 1.45, 1.55});
    rows.push_back({"alpha_zero_g_over_p", alpha_threshold_g_over_p(base), 0.07, 0.065, 0.075, true});
    rows.push_back({"g_zero_p_over_v0", g_threshold_p_over_v0(base), 2.60, 2.50, 2.70, true});
    rows.push_back({"g_zero_tau1", g_threshold_tau1(base), 0.001, 0.0, 0.002, true});

    std::vector<double> grid;
    const int step = ro.fast ? 5 : 1;
    for (int i = 50; i <= 200; i += step) grid.push_back(base.v0 * i / 100.0);
    const SubstitutionReport r0 = asset_substitution(base, grid, {0.0}, {T});
    rows.push_back({"substitution_onset_alpha0", r0.onset(0.0, T) / base.v0, 0.75, 0.70, 0.80});
    for (double tm : {10.0, 30.0, 50.0}) {
        Scenario q = base;
        q.contract.t_mat = tm;
        const double astar = optimize_alpha(q, cache).arg[0];
        const SubstitutionReport rs = asset_substitution(base, grid, {astar}, {tm});
        rows.push_back({"substitution_points_alpha_star_T" + std::to_string(static_cast<int>(tm)),
                        static_cast<double>(rs.flagged(astar, tm)), 0.0, 0.0, 0.0});
    }
    return rows;
}

}  // namespace parti
