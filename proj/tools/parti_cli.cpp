// Command-line driver: parti <subcommand> [--config PATH] [--set k=v]... [--out PATH] [--seed N] [--fast]
#include "parti/parti.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace parti;

constexpr int exit_ok = 0;
constexpr int exit_check_failed = 1;
constexpr int exit_config = 2;
constexpr int exit_numeric = 3;

struct Common {
    std::string config_path;
    std::string out_path;
    std::vector<std::string> sets;
    std::uint64_t seed = 12345;
    bool fast = false;
};

RawConfig load(const Common& c) {
    RawConfig cfg = c.config_path.empty() ? RawConfig{} : load_config_file(c.config_path);
    for (const auto& s : c.sets) apply_override(cfg, s);
    return cfg;
}

void emit(const Common& c, const std::string& text) {
    if (c.out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(c.out_path, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + c.out_path + "'");
    f << text;
}

std::string to_text(const CsvTable& t) {
    std::ostringstream os;
    t.write(os);
    return os.str();
}

std::string num(double x) { return format_number(x); }
std::string flag(bool b) { return b ? "1" : "0"; }

std::vector<double> grid_or(const RawConfig& cfg, const char* key, const std::string& fallback) {
    return parse_grid(cfg.has(key) ? cfg.get(key) : fallback);
}

int table_exit(const SweepTable& t) {
    if (t.rows.empty()) return exit_ok;
    return t.failures() * 10 <= t.rows.size() ? exit_ok : exit_numeric;
}

std::string sweep_csv(const SweepTable& t) {
    std::vector<std::string> header = t.axis_names;
    header.insert(header.end(), t.output_names.begin(), t.output_names.end());
    header.push_back("error");
    CsvTable csv(header);
    for (const auto& r : t.rows) {
        std::vector<std::string> row;
        for (double x : r.axis) row.push_back(num(x));
        for (double x : r.out) row.push_back(num(x));
        row.push_back(r.error);
        csv.add(row);
    }
    return to_text(csv);
}

int cmd_price(const Common& c) {
    const RawConfig cfg = load(c);
    const Scenario s = scenario_from(cfg);
    std::string method = "given";
    double vb = 0.0;
    if (cfg.has("vb")) {
        vb = parse_number(cfg.get("vb"));
    } else {
        const BarrierSolution b = solve_vb(s);
        vb = b.vb;
        method = to_string(b.method);
    }
    const ValuationBreakdown fv = firm_value(s, vb);
    auto six = [](double x) { return format_number(x, 6); };
    CsvTable t({"v0", "vb", "vb_over_v0", "firm_value", "equity", "liability", "tb1", "tb2", "bc", "method"});
    t.add({six(s.v0), six(vb), six(vb / s.v0), six(fv.firm_value), six(fv.equity), six(fv.l_total), six(fv.tb1),
           six(fv.tb2), six(fv.bc), method});
    emit(c, to_text(t));
    return exit_ok;
}

int cmd_solve_vb(const Common& c) {
    const Scenario s = scenario_from(load(c));
    const BarrierSolution b = solve_vb_diagnosed(s);
    const AssumptionReport& a = *b.diagnostics;
    CsvTable t({"vb", "vb_over_v0", "residual", "method", "alpha_below_bar", "alpha_below_tilde",
                "guarantee_exceeds_tb1", "surplus_exceeds_tb2", "continuity_sufficient", "g_star_positive"});
    t.add({num(b.vb), num(b.vb / s.v0), num(b.residual), to_string(b.method), flag(a.alpha_below_bar),
           flag(a.alpha_below_tilde), flag(a.guarantee_value_exceeds_tb), flag(a.surplus_value_exceeds_tb),
           flag(a.continuity_sufficient), flag(a.g_star_positive_condition)});
    emit(c, to_text(t));
    return exit_ok;
}

int cmd_optimize(const Common& c) {
    const RawConfig cfg = load(c);
    const Scenario s = scenario_from(cfg);
    std::vector<std::string> modes;
    {
        std::stringstream ss(cfg.get("mode", "separable,joint"));
        std::string m;
        while (std::getline(ss, m, ',')) modes.push_back(m);
    }
    KernelCache cache;
    const double T = s.contract.t_mat;
    CsvTable t({"mode", "alpha_star", "g_star", "g_total", "g_over_p", "vb", "vb_over_v0", "firm_value",
                "foc_alpha", "foc_g", "boundary", "converged"});
    auto row = [&](const std::string& mode, double a, double g, double vb, double v, double fa, double fg,
                   bool bnd, bool conv) {
        t.add({mode, num(a), num(g), num(g * T), num(g * T / s.contract.p_lump), num(vb), num(vb / s.v0), num(v),
               num(fa), num(fg), flag(bnd), flag(conv)});
    };
    const double nan = std::nan("");
    for (const auto& m : modes) {
        if (m == "separable") {
            const SeparableOptimum so = separable_optimum(s, cache);
            row(m, so.alpha_star, so.g_star, so.vb, so.firm_value, so.alpha.foc_residual[0], so.g.foc_residual[0],
                so.alpha.boundary_flag || so.g.boundary_flag, true);
        } else if (m == "joint" || m == "joint-g-first") {
            const OptimumResult r = optimize_joint(
                s, cache, {}, m == "joint" ? JointOrder::alpha_first : JointOrder::g_first);
            row(m, r.arg[0], r.arg[1], r.vb, r.objective, r.foc_residual[0], r.foc_residual[1], r.boundary_flag,
                r.converged);
        } else if (m == "alpha") {
            const OptimumResult r = optimize_alpha(s, cache);
            row(m, r.arg[0], s.contract.g_rate(), r.vb, r.objective, r.foc_residual[0], nan, r.boundary_flag, true);
        } else if (m == "g") {
            const OptimumResult r = optimize_g(s, cache);
            row(m, s.contract.alpha, r.arg[0], r.vb, r.objective, nan, r.foc_residual[0], r.boundary_flag, true);
        } else {
            throw ConfigError("unknown optimize mode '" + m + "'");
        }
    }
    emit(c, to_text(t));
    return exit_ok;
}

int cmd_sweep(const Common& c) {
    const RawConfig cfg = load(c);
    const Scenario s = scenario_from(cfg);
    const std::string kind = cfg.get("sweep", "vb-gp");
    KernelCache cache;
    SweepTable t;
    if (kind == "vb-alpha") {
        t = sweep_vb(s, SweepAxis::alpha, grid_or(cfg, "grid", "0:0.115:0.005"), cache);
    } else if (kind == "vb-gp") {
        t = sweep_vb(s, SweepAxis::g_over_p, grid_or(cfg, "grid", "0:0.12:0.0025"), cache);
    } else if (kind == "curves-g") {
        t = curves_vs_guarantee(s, grid_or(cfg, "grid", "0:0.1:0.0025"), cache);
    } else if (kind == "curves-v") {
        std::vector<double> g = grid_or(cfg, "grid", "0.3:2:0.01");
        for (double& v : g) v *= s.v0;
        t = curves_vs_asset(s, g, cache);
    } else if (kind == "sensi-nu") {
        t = sensitivity_alpha_star(s, SensitivityAxis::nu, grid_or(cfg, "grid", "0.01:0.1:0.01"));
    } else if (kind == "sensi-t") {
        t = sensitivity_alpha_star(s, SensitivityAxis::t_mat, grid_or(cfg, "grid", "5:60:5"));
    } else if (kind == "sensi-tau2") {
        t = sensitivity_alpha_star(s, SensitivityAxis::tau2, grid_or(cfg, "grid", "0.1:0.5:0.05"));
    } else {
        throw ConfigError("unknown sweep '" + kind + "'");
    }
    emit(c, sweep_csv(t));
    return table_exit(t);
}

int cmd_regions(const Common& c) {
    const RawConfig cfg = load(c);
    const Scenario s = scenario_from(cfg);
    const std::string kind = cfg.get("region", "alpha-tau");
    const std::string step = c.fast ? "0.25" : "0.05";
    const std::vector<double> px = grid_or(cfg, "p_grid", "0.5:3:" + step);
    SweepTable t;
    if (kind == "alpha-tau") {
        t = region_scan(s, RegionY::tau, RegionTarget::alpha, px, grid_or(cfg, "y_grid", "0.05:0.5:" + step));
    } else if (kind == "g-tau") {
        t = region_scan(s, RegionY::tau, RegionTarget::g, px, grid_or(cfg, "y_grid", "0.05:0.5:" + step));
    } else if (kind == "alpha-gp") {
        t = region_scan(s, RegionY::g_over_p, RegionTarget::alpha, px,
                        grid_or(cfg, "y_grid", c.fast ? "0.01:0.1:0.03" : "0.01:0.1:0.01"));
    } else {
        throw ConfigError("unknown region '" + kind + "'");
    }
    emit(c, sweep_csv(t));
    return table_exit(t);
}

int cmd_asset_sub(const Common& c) {
    const RawConfig cfg = load(c);
    const Scenario s = scenario_from(cfg);
    std::vector<double> vg = grid_or(cfg, "v_grid", c.fast ? "0.5:2:0.05" : "0.5:2:0.01");
    for (double& v : vg) v *= s.v0;
    const std::vector<double> tms = grid_or(cfg, "t_mats", std::to_string(s.contract.t_mat));
    std::vector<std::string> alpha_tokens;
    {
        std::stringstream ss(cfg.get("alphas", "0,opt"));
        std::string a;
        while (std::getline(ss, a, ',')) alpha_tokens.push_back(a);
    }
    KernelCache cache;
    CsvTable t({"t_mat", "alpha", "v", "vb_up", "vb_down", "de_dsigma", "dl_dsigma", "substitution", "sigma_step",
                "barrier_resolved", "error"});
    for (double T : tms) {
        Scenario q = s;
        q.contract.t_mat = T;
        std::vector<double> alphas;
        for (const auto& tok : alpha_tokens) {
            alphas.push_back(tok == "opt" ? optimize_alpha(q, cache).arg[0] : parse_number(tok));
        }
        const SubstitutionReport rep = asset_substitution(q, vg, alphas, {T});
        for (const auto& e : rep.entries) {
            t.add({num(e.t_mat), num(e.alpha), num(e.v), num(e.vb_up), num(e.vb_down), num(e.de_dsigma),
                   num(e.dl_dsigma), flag(e.substitution), num(rep.sigma_step), flag(rep.barrier_resolved), e.error});
        }
    }
    emit(c, to_text(t));
    return exit_ok;
}

int cmd_validate(const Common& c) {
    const RawConfig cfg = load(c);
    const Scenario s = scenario_from(cfg);
    ValidationOptions o;
    o.mc.seed = c.seed;
    o.mc.paths = static_cast<std::uint64_t>(parse_number(cfg.get("mc_paths", c.fast ? "10000" : "1000000")));
    o.mc.steps_per_year = static_cast<std::uint32_t>(parse_number(cfg.get("mc_steps_per_year", "52")));
    o.z_gate = c.fast ? 10.0 : 3.0;
    const auto lines = run_validation(s, o);
    std::ostringstream os;
    bool ok = true;
    for (const auto& l : lines) {
        os << to_string(l.status) << ' ' << l.name;
        if (!l.detail.empty()) os << ' ' << l.detail;
        os << '\n';
        ok = ok && l.status != CheckStatus::fail;
    }
    emit(c, os.str());
    return ok ? exit_ok : exit_check_failed;
}

int cmd_reproduce(const Common& c) {
    const Scenario s = scenario_from(load(c));
    ReproductionOptions ro;
    ro.fast = c.fast;
    const auto rows = reproduce_paper_rows(s, ro);
    CsvTable t({"quantity", "value", "paper", "lo", "hi", "status", "known_deviation"});
    bool ok = true;
    for (const auto& r : rows) {
        t.add({r.name, num(r.value), num(r.paper), num(r.lo), num(r.hi), r.pass() ? "PASS" : "FAIL",
               flag(r.known_deviation)});
        ok = ok && r.pass();
    }
    emit(c, to_text(t));
    return ok ? exit_ok : exit_check_failed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Participating life insurance capital structure model"};
    app.require_subcommand(1);
    Common common;
    app.add_option("--config", common.config_path, "key = value scenario file");
    app.add_option("--out", common.out_path, "output file (default stdout)");
    app.add_option("--set", common.sets, "override, key=value (repeatable)")->take_all();
    app.add_option("--seed", common.seed, "Monte Carlo seed");
    app.add_flag("--fast", common.fast, "coarse grids, small Monte Carlo");
    app.fallthrough();

    struct Sub {
        const char* name;
        const char* help;
        int (*run)(const Common&);
    };
    const Sub subs[] = {
        {"price", "value the firm at a solved or given barrier", cmd_price},
        {"solve-vb", "endogenous barrier with assumption diagnostics", cmd_solve_vb},
        {"optimize", "optimal participation and guarantee rates", cmd_optimize},
        {"sweep", "barrier, value and sensitivity sweeps", cmd_sweep},
        {"regions", "positivity regions of the optimal rates", cmd_regions},
        {"asset-sub", "asset substitution derivatives in sigma", cmd_asset_sub},
        {"validate", "closed forms against quadrature and Monte Carlo", cmd_validate},
        {"reproduce-paper", "reference numbers side by side with the model", cmd_reproduce},
    };
    std::vector<std::pair<CLI::App*, const Sub*>> handles;
    for (const auto& s : subs) handles.emplace_back(app.add_subcommand(s.name, s.help), &s);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_config;
    }
    try {
        for (const auto& [h, s] : handles) {
            if (h->parsed()) return s->run(common);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return exit_numeric;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return exit_numeric;
    }
    return exit_config;
}
