#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace parti;
using parti::test::rel;

namespace {

double solved_value(Scenario s) {
    const BarrierSolution b = solve_vb(s);
    return firm_terms(s, b.vb).firm_value;
}

}  // namespace

TEST(Derivatives, BarrierSlopesMatchFiniteDifferences) {
    for (double a : {0.02, 0.05, 0.08}) {
        Scenario s;
        s.contract.alpha = a;
        const double vb = solve_vb(s).vb;
        Scenario up = s, dn = s;
        const double h = 1e-5;
        up.contract.alpha += h;
        dn.contract.alpha -= h;
        const double fd_a = (solve_vb(up).vb - solve_vb(dn).vb) / (2 * h);
        EXPECT_LT(rel(vb_prime_alpha(s, vb), fd_a), 1e-4) << a;

        const double hg = 1e-5, T = s.contract.t_mat;
        up = s;
        dn = s;
        up.contract.g_total += hg * T;
        dn.contract.g_total -= hg * T;
        const double fd_g = (solve_vb(up).vb - solve_vb(dn).vb) / (2 * hg);
        EXPECT_LT(rel(vb_prime_g(s, vb), fd_g), 1e-4) << a;
    }
}

TEST(Derivatives, FirmValueSlopesMatchFiniteDifferences) {
    for (double a : {0.0, 0.03, 0.07}) {
        Scenario s;
        s.contract.alpha = a;
        const double vb = solve_vb(s).vb;
        Scenario up = s, dn = s;
        const double h = 1e-5;
        up.contract.alpha += h;
        dn.contract.alpha = std::max(0.0, a - h);
        const double fd_a = (solved_value(up) - solved_value(dn)) / (up.contract.alpha - dn.contract.alpha);
        EXPECT_NEAR(dv_dalpha(s, vb), fd_a, 2e-3 * std::max(1.0, std::abs(fd_a))) << a;

        const double hg = 1e-6, T = s.contract.t_mat;
        up = s;
        dn = s;
        up.contract.g_total += hg * T;
        dn.contract.g_total -= hg * T;
        const double fd_g = (solved_value(up) - solved_value(dn)) / (2 * hg);
        EXPECT_NEAR(dv_dg(s, vb), fd_g, 2e-3 + 1e-4 * std::abs(fd_g)) << a;
    }
}

TEST(Derivatives, NoSurplusTaxMakesParticipationCostly) {
    Scenario s;
    s.frictions.tau2 = 0.0;
    for (double a : {0.0, 0.05}) {
        s.contract.alpha = a;
        EXPECT_LT(dv_dalpha(s, solve_vb(s).vb), 0.0) << a;
    }
}

TEST(AlphaBound, BracketCappedByUniquenessBound) {
    const Scenario s;
    EXPECT_NEAR(alpha_upper_bound(s), 0.0998826392176382 - 1e-6, 1e-12);
    Scenario t;
    t.frictions.tau2 = 1.0;
    EXPECT_LE(alpha_upper_bound(t), 1.0);
}

TEST(OptimizeAlpha, BaseHitsUpperBound) {
    Scenario s;
    s.contract.g_total = 0.02 * s.contract.p_lump;
    const OptimumResult r = optimize_alpha(s);
    EXPECT_NEAR(r.arg[0], 0.099, 0.005);
    EXPECT_TRUE(r.boundary_flag);
    EXPECT_GE(r.objective, r.objective_lo - 1e-9);
    EXPECT_GE(r.objective, r.objective_hi - 1e-9);
}

TEST(OptimizeAlpha, ArgmaxAgainstDenseScan) {
    Scenario s;
    s.frictions.tau2 = 0.2;
    KernelCache cache;
    const OptimumResult r = optimize_alpha(s, cache);
    const double hi = alpha_upper_bound(s);
    double best = -1e300;
    for (int i = 0; i < 1024; ++i) {
        Scenario t = s;
        t.contract.alpha = hi * i / 1023.0;
        best = std::max(best, detail::objective(cache, t, loose_tol));
    }
    EXPECT_GE(r.objective, best - 1e-6);
}

TEST(OptimizeAlpha, LowSurplusTaxGivesZero) {
    Scenario s;
    s.frictions.tau2 = 0.07;
    s.frictions.tau1 = 0.35;
    const OptimumResult r = optimize_alpha(s);
    EXPECT_LT(r.arg[0], 1e-4);
}

TEST(OptimizeAlpha, LargeLumpSumGivesZero) {
    Scenario s;
    s.contract.p_lump = 150.0;
    s.contract.g_total = 0.02 * 150.0;
    EXPECT_LT(optimize_alpha(s).arg[0], 1e-4);
}

TEST(TauBar, NearEightPercent) {
    const TauBarResult t = find_tau_bar(base_scenario());
    ASSERT_TRUE(t.found);
    EXPECT_NEAR(t.tau_bar, 0.08, 0.01);
}

TEST(OptimizeG, BaseNearPaperRate) {
    const OptimumResult r = optimize_g(base_scenario());
    const Scenario s;
    EXPECT_NEAR(r.arg[0] * s.contract.t_mat / s.contract.p_lump, 0.0191, 0.001);
    EXPECT_FALSE(r.boundary_flag);
    EXPECT_TRUE(r.foc_ok);
}

TEST(OptimizeG, ZeroWhenGuaranteeTaxTiny) {
    Scenario s;
    s.frictions.tau1 = 0.0005;
    EXPECT_LT(optimize_g(s).arg[0] * s.contract.t_mat / s.contract.p_lump, 1e-4);
}

TEST(OptimizeG, ZeroWhenLumpSumHuge) {
    Scenario s;
    s.contract.p_lump = 260.0;
    EXPECT_EQ(optimize_g(s).arg[0], 0.0);
}

TEST(OptimizeG, GuaranteeCeiling) {
    KernelCache cache;
    const Scenario s;
    const double gmax = g_total_max(s, cache);
    EXPECT_NEAR(gmax / s.contract.p_lump, 0.11168, 2e-4);
}

TEST(OptimizeJoint, OrderInsensitive) {
    KernelCache cache;
    const Scenario s;
    const OptimumResult a = optimize_joint(s, cache, {}, JointOrder::alpha_first);
    const OptimumResult g = optimize_joint(s, cache, {}, JointOrder::g_first);
    ASSERT_TRUE(a.converged);
    ASSERT_TRUE(g.converged);
    EXPECT_NEAR(a.arg[0], g.arg[0], 1e-4);
    EXPECT_NEAR(a.arg[1], g.arg[1], 1e-5);
    EXPECT_NEAR(a.objective, g.objective, 1e-6);
    Scenario lo = s;
    lo.contract.alpha = 0.0;
    EXPECT_GE(a.objective, solved_value(lo));
}
