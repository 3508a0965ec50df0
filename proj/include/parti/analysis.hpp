#pragma once

#include "parti/optimizer.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <string>
#include <vector>

namespace parti {

/// Rows of numbers with a shared header; a failed row keeps its grid values and an error text.
struct SweepTable {
    std::vector<std::string> axis_names;
    std::vector<std::string> output_names;
    struct Row {
        std::vector<double> axis;
        std::vector<double> out;
        std::string error;
    };
    std::vector<Row> rows;

    [[nodiscard]] std::size_t failures() const {
        std::size_t n = 0;
        for (const auto& r : rows) n += r.error.empty() ? 0 : 1;
        return n;
    }
    [[nodiscard]] std::vector<double> column(const std::string& name) const {
        std::vector<double> c;
        for (std::size_t j = 0; j < output_names.size(); ++j) {
            if (output_names[j] != name) continue;
            for (const auto& r : rows) c.push_back(r.error.empty() ? r.out[j] : std::nan(""));
            return c;
        }
        for (std::size_t j = 0; j < axis_names.size(); ++j) {
            if (axis_names[j] != name) continue;
            for (const auto& r : rows) c.push_back(r.axis[j]);
            return c;
        }
        throw std::out_of_range("SweepTable: no column " + name);
    }
};

namespace detail {

template <class F>
void add_row(SweepTable& t, std::vector<double> axis, F&& f) {
    SweepTable::Row row;
    row.axis = std::move(axis);
    try {
        row.out = f();
    } catch (const std::exception& e) {
        row.out.assign(t.output_names.size(), std::nan(""));
        row.error = e.what();
    }
    t.rows.push_back(std::move(row));
}

inline void set_g_over_p(Scenario& s, double gp) { s.contract.g_total = gp * s.contract.p_lump; }

/// Changes P and keeps G/P.
inline void set_p_over_v0(Scenario& s, double pv) {
    const double gp = s.contract.g_total / s.contract.p_lump;
    s.contract.p_lump = pv * s.v0;
    s.contract.g_total = gp * s.contract.p_lump;
}

}  // namespace detail

enum class SweepAxis { alpha, g_over_p };

[[nodiscard]] inline SweepTable sweep_vb(const Scenario& s, SweepAxis axis, const std::vector<double>& grid,
                                         KernelCache& cache) {
    SweepTable t;
    t.axis_names = {axis == SweepAxis::alpha ? "alpha" : "g_over_p"};
    t.output_names = {"vb", "vb_over_v0", "immediate"};
    for (double x : grid) {
        detail::add_row(t, {x}, [&] {
            Scenario q = s;
            if (axis == SweepAxis::alpha) {
                q.contract.alpha = x;
            } else {
                detail::set_g_over_p(q, x);
            }
            const BarrierSolution b = cache.solve(q);
            return std::vector<double>{b.vb, b.vb / q.v0,
                                       b.method == SolveMethod::immediate_bankruptcy ? 1.0 : 0.0};
        });
    }
    return t;
}

[[nodiscard]] inline SweepTable curves_vs_guarantee(const Scenario& s, const std::vector<double>& g_over_p,
                                                    KernelCache& cache, double tol = default_tol) {
    SweepTable t;
    t.axis_names = {"g_over_p"};
    t.output_names = {"vb", "v", "equity", "liability", "tb1", "tb2", "bc"};
    for (double x : g_over_p) {
        detail::add_row(t, {x}, [&] {
            Scenario q = s;
            detail::set_g_over_p(q, x);
            const BarrierSolution b = cache.solve(q);
            const ValuationBreakdown fv = firm_value(q, b.vb, tol);
            return std::vector<double>{b.vb, fv.firm_value, fv.equity, fv.l_total, fv.tb1, fv.tb2, fv.bc};
        });
    }
    return t;
}

/// v, E, L over V with the barrier solved once at the scenario's V0.
[[nodiscard]] inline SweepTable curves_vs_asset(const Scenario& s, const std::vector<double>& v_grid,
                                                KernelCache& cache, double tol = default_tol) {
    SweepTable t;
    t.axis_names = {"v"};
    t.output_names = {"vb", "firm_value", "equity", "liability"};
    const double vb = cache.solve(s).vb;
    for (double v : v_grid) {
        detail::add_row(t, {v}, [&] {
            Scenario q = s;
            q.v0 = v;
            if (v <= vb) {
                const double fv = v * (1.0 - s.frictions.rho);
                return std::vector<double>{vb, fv, 0.0, fv};
            }
            const ValuationBreakdown b = firm_value(q, vb, tol);
            return std::vector<double>{vb, b.firm_value, b.equity, b.l_total};
        });
    }
    return t;
}

enum class SensitivityAxis { nu, t_mat, tau2 };

[[nodiscard]] inline SweepTable sensitivity_alpha_star(const Scenario& s, SensitivityAxis axis,
                                                       const std::vector<double>& grid,
                                                       const OptimizerOptions& o = {}) {
    SweepTable t;
    t.axis_names = {axis == SensitivityAxis::nu ? "nu" : axis == SensitivityAxis::t_mat ? "t_mat" : "tau2"};
    t.output_names = {"alpha_star", "v", "vb", "boundary"};
    KernelCache cache;
    for (double x : grid) {
        detail::add_row(t, {x}, [&] {
            Scenario q = s;
            if (axis == SensitivityAxis::nu) q.market.nu = x;
            if (axis == SensitivityAxis::t_mat) q.contract.t_mat = x;
            if (axis == SensitivityAxis::tau2) q.frictions.tau2 = x;
            const OptimumResult r = optimize_alpha(q, cache, o);
            return std::vector<double>{r.arg[0], r.objective, r.vb, r.boundary_flag ? 1.0 : 0.0};
        });
    }
    return t;
}

enum class RegionY { tau, g_over_p };
enum class RegionTarget { alpha, g };

inline constexpr double positivity_threshold = 1e-4;

/// Positivity of alpha* or g* over (P/V0, y). G/P is held when P moves; tau sets tau1 = tau2.
[[nodiscard]] inline SweepTable region_scan(const Scenario& s, RegionY y_axis, RegionTarget target,
                                            const std::vector<double>& p_over_v0,
                                            const std::vector<double>& y_grid,
                                            const OptimizerOptions& o = {}) {
    if (y_axis == RegionY::g_over_p && target == RegionTarget::g) {
        throw std::invalid_argument("region_scan: g* positivity is not defined on a G/P axis");
    }
    SweepTable t;
    t.axis_names = {"p_over_v0", y_axis == RegionY::tau ? "tau" : "g_over_p"};
    t.output_names = {target == RegionTarget::alpha ? "alpha_star" : "g_star", "positive"};
    KernelCache cache;
    for (double y : y_grid) {
        for (double x : p_over_v0) {
            detail::add_row(t, {x, y}, [&] {
                Scenario q = s;
                detail::set_p_over_v0(q, x);
                if (y_axis == RegionY::tau) {
                    q.frictions.tau1 = y;
                    q.frictions.tau2 = y;
                } else {
                    detail::set_g_over_p(q, y);
                }
                const OptimumResult r =
                    target == RegionTarget::alpha ? optimize_alpha(q, cache, o) : optimize_g(q, cache, o);
                return std::vector<double>{r.arg[0], r.arg[0] > positivity_threshold ? 1.0 : 0.0};
            });
        }
    }
    return t;
}

struct SubstitutionEntry {
    double v = 0.0, alpha = 0.0, t_mat = 0.0;
    double vb_up = 0.0, vb_down = 0.0;
    double de_dsigma = 0.0, dl_dsigma = 0.0;
    bool substitution = false;
    std::string error;
};

struct SubstitutionReport {
    double sigma_step = 1e-4;
    bool barrier_resolved = true;
    std::vector<SubstitutionEntry> entries;

    /// Smallest flagged V for the given (alpha, T); NaN if none.
    [[nodiscard]] double onset(double alpha, double t_mat) const {
        double best = std::numeric_limits<double>::quiet_NaN();
        for (const auto& e : entries) {
            if (e.alpha == alpha && e.t_mat == t_mat && e.substitution && !(e.v >= best)) best = e.v;
        }
        return best;
    }
    [[nodiscard]] std::size_t flagged(double alpha, double t_mat) const {
        std::size_t n = 0;
        for (const auto& e : entries) n += (e.alpha == alpha && e.t_mat == t_mat && e.substitution) ? 1 : 0;
        return n;
    }
};

[[nodiscard]] inline std::vector<double> default_asset_grid(double v0) {
    std::vector<double> g;
    for (int i = 50; i <= 200; ++i) g.push_back(v0 * i / 100.0);
    return g;
}

/// Central differences of E and L in sigma, barrier re-solved at each bump.
[[nodiscard]] inline SubstitutionReport asset_substitution(const Scenario& s, const std::vector<double>& v_grid,
                                                           const std::vector<double>& alphas,
                                                           const std::vector<double>& t_mats,
                                                           double sigma_step = 1e-4,
                                                           double tol = default_tol) {
    SubstitutionReport rep;
    rep.sigma_step = sigma_step;
    double v_max = s.v0;
    for (double v : v_grid) v_max = std::max(v_max, v);
    for (double T : t_mats) {
        for (double a : alphas) {
            Scenario base = s;
            base.contract.t_mat = T;
            base.contract.alpha = a;
            Scenario up = base, down = base;
            up.market.sigma += sigma_step;
            down.market.sigma -= sigma_step;
            double root_up = 0.0, root_down = 0.0;
            std::string err;
            try {
                // the smallest root only depends on V through the cap at V
                Scenario hu = up, hd = down;
                hu.v0 = v_max;
                hd.v0 = v_max;
                root_up = solve_vb(hu, tol).vb;
                root_down = solve_vb(hd, tol).vb;
            } catch (const std::exception& e) {
                err = e.what();
            }
            auto e_and_l = [&](const Scenario& sc, double v, double root) {
                const double vb = std::min(root, v);
                if (v <= vb) return std::pair{0.0, v * (1.0 - sc.frictions.rho)};
                Scenario q = sc;
                q.v0 = v;
                const ValuationBreakdown b = firm_value(q, vb, tol);
                return std::pair{b.equity, b.l_total};
            };
            for (double v : v_grid) {
                SubstitutionEntry e;
                e.v = v;
                e.alpha = a;
                e.t_mat = T;
                e.error = err;
                if (err.empty()) {
                    try {
                        e.vb_up = std::min(root_up, v);
                        e.vb_down = std::min(root_down, v);
                        const auto pu = e_and_l(up, v, root_up);
                        const auto pd = e_and_l(down, v, root_down);
                        e.de_dsigma = (pu.first - pd.first) / (2.0 * sigma_step);
                        e.dl_dsigma = (pu.second - pd.second) / (2.0 * sigma_step);
                        e.substitution = e.de_dsigma > 0.0 && e.dl_dsigma < 0.0;
                    } catch (const std::exception& ex) {
                        e.error = ex.what();
                    }
                }
                rep.entries.push_back(std::move(e));
            }
        }
    }
    return rep;
}

}  // namespace parti
