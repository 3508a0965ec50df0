#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace parti;
using parti::test::rel;

namespace {

/// Numeric smallest root even where a closed form would be picked.
double numeric_root(const Scenario& s) {
    const BarrierKernel kernel(s.market, s.contract.t_mat, s.contract.k_threshold, s.v0);
    return detail::numeric_solve(s, kernel).vb;
}

Scenario with_alpha(double a) {
    Scenario s;
    s.contract.alpha = a;
    return s;
}

}  // namespace

TEST(Barrier, AlphaZeroFrozen) {
    const BarrierSolution b = solve_vb(with_alpha(0.0));
    EXPECT_EQ(b.method, SolveMethod::closed_form_alpha_zero);
    EXPECT_NEAR(b.vb, 45.635093983661464, 1e-10);
    EXPECT_NEAR(b.residual, 0.0, 1e-12);
}

TEST(Barrier, BaseScenario) {
    const BarrierSolution b = solve_vb(base_scenario());
    EXPECT_EQ(b.method, SolveMethod::numeric_smallest_root);
    EXPECT_NEAR(b.vb, 45.87818, 1e-4);
    EXPECT_LT(std::abs(smooth_pasting_residual(base_scenario(), b.vb)), 1e-8);
}

TEST(Barrier, NearPaperOptimumPair) {
    Scenario s;
    s.contract.g_total = 0.0191 * s.contract.p_lump;
    EXPECT_NEAR(solve_vb(s).vb, 45.36, 0.5);
    s.contract.alpha = 0.099;
    EXPECT_NEAR(solve_vb(s).vb, 45.62277, 1e-4);
}

TEST(Barrier, AlphaZeroClosedFormMatchesNumeric) {
    test::Draws d(41);
    int checked = 0;
    for (int i = 0; i < 40; ++i) {
        Scenario s = d.scenario();
        s.contract.alpha = 0.0;
        const BarrierSolution cf = solve_vb(s);
        if (cf.method == SolveMethod::immediate_bankruptcy) continue;
        EXPECT_LT(rel(numeric_root(s), cf.vb), 1e-8) << i;
        ++checked;
    }
    EXPECT_GT(checked, 20);
}

TEST(Barrier, AboveStrikeClosedFormMatchesNumeric) {
    test::Draws d(42);
    int checked = 0;
    for (int i = 0; i < 20; ++i) {
        Scenario s = d.scenario();
        s.contract.k_threshold = d.uniform(0.05, 0.3) * s.v0;
        s.contract.alpha = d.uniform(0.0, 0.05);
        const auto cf = vb_closed_form_above_k(s);
        if (!cf || *cf >= s.v0) continue;
        EXPECT_LT(rel(numeric_root(s), *cf), 1e-8) << i;
        EXPECT_EQ(solve_vb(s).method, SolveMethod::closed_form_above_k);
        ++checked;
    }
    EXPECT_GT(checked, 5);
}

TEST(Barrier, SmallestRootAndSingleSignChange) {
    test::Draws d(43);
    for (int i = 0; i < 10; ++i) {
        Scenario s;
        s.contract.alpha = d.uniform(0.01, 0.095);
        s.contract.g_total = d.uniform(0.0, 0.04) * s.contract.p_lump;
        const BarrierSolution b = solve_vb(s);
        ASSERT_LT(b.vb, s.v0);
        int changes = 0;
        double prev = smooth_pasting_residual(s, 0.5);
        EXPECT_LT(prev, 0.0);
        for (double vb = 0.5 * 1.02; vb < s.v0; vb *= 1.02) {
            const double h = smooth_pasting_residual(s, vb);
            if ((prev < 0) != (h < 0)) ++changes;
            if (vb < b.vb * (1 - 1e-6)) {
                EXPECT_LT(h, 0.0) << vb;
            }
            prev = h;
        }
        EXPECT_EQ(changes, 1) << i;
    }
}

TEST(Barrier, ImmediateBankruptcy) {
    Scenario s;
    s.contract.g_total = 0.2 * s.contract.p_lump;
    const BarrierSolution b = solve_vb(s);
    EXPECT_EQ(b.method, SolveMethod::immediate_bankruptcy);
    EXPECT_EQ(b.vb, s.v0);
}

TEST(Barrier, LargeBarrierLimit) {
    // far above V0 and k the residual approaches its constant part
    const Scenario s;
    const AConstants a = a_constants(s.market, s.contract.t_mat, s.frictions);
    const ResidualConstants rc = residual_constants(s);
    const double lim = rc.c0 + s.contract.alpha * (s.frictions.tau2 * a.a3 - a.a4);
    EXPECT_NEAR(smooth_pasting_residual(s, 1e6 * s.v0), lim, 1e-6);
}

TEST(Barrier, ResidualSlope) {
    const Scenario s;
    for (double vb : {20.0, 45.0, 120.0, 160.0}) {
        const double h = 1e-4 * vb;
        const double fd = (smooth_pasting_residual(s, vb + h) - smooth_pasting_residual(s, vb - h)) / (2 * h);
        EXPECT_NEAR(residual_vb_derivative(s, vb), fd, 1e-6 * std::max(1.0, std::abs(fd))) << vb;
    }
}

TEST(Barrier, Monotonicity) {
    const double base = solve_vb(base_scenario()).vb;
    auto vb_with = [](auto&& edit) {
        Scenario s;
        edit(s);
        return solve_vb(s).vb;
    };
    EXPECT_LT(vb_with([](Scenario& s) { s.frictions.tau1 = 0.45; }), base);
    EXPECT_GT(vb_with([](Scenario& s) { s.frictions.tau1 = 0.25; }), base);
    EXPECT_LT(vb_with([](Scenario& s) { s.frictions.tau2 = 0.45; }), base);
    EXPECT_GT(vb_with([](Scenario& s) { s.contract.alpha = 0.08; }), base);
    EXPECT_LT(vb_with([](Scenario& s) { s.contract.alpha = 0.02; }), base);
    EXPECT_GT(vb_with([](Scenario& s) { s.contract.g_total = 2.5; }), base);
    EXPECT_LT(vb_with([](Scenario& s) { s.contract.g_total = 1.0; }), base);
    // longer maturity lowers vb while P - G/r <= 0
    Scenario s;
    s.contract.g_total = 1.2 * s.market.r * s.contract.p_lump;
    double prev = solve_vb(s).vb;
    for (double T : {35.0, 40.0, 50.0}) {
        s.contract.t_mat = T;
        const double vb = solve_vb(s).vb;
        EXPECT_LT(vb, prev) << T;
        prev = vb;
    }
}

TEST(Barrier, KernelReuseMatchesFreshSolve) {
    Scenario s;
    const BarrierKernel kernel(s.market, s.contract.t_mat, s.contract.k_threshold, s.v0);
    for (double a : {0.02, 0.05, 0.09}) {
        s.contract.alpha = a;
        EXPECT_DOUBLE_EQ(solve_vb(s, kernel).vb, solve_vb(s).vb);
    }
    Scenario other = s;
    other.market.sigma = 0.25;
    EXPECT_THROW((void)solve_vb(other, kernel), std::invalid_argument);
}

TEST(Assumptions, BaseAllHold) {
    const BarrierSolution b = solve_vb_diagnosed(base_scenario());
    ASSERT_TRUE(b.diagnostics.has_value());
    const AssumptionReport& r = *b.diagnostics;
    EXPECT_TRUE(r.alpha_below_bar);
    EXPECT_TRUE(r.alpha_below_tilde);
    EXPECT_TRUE(r.guarantee_value_exceeds_tb);
    EXPECT_TRUE(r.surplus_value_exceeds_tb);
    EXPECT_TRUE(r.continuity_sufficient);
    EXPECT_TRUE(r.g_star_positive_condition);
}

TEST(Assumptions, HighSurplusTaxKeepsContinuity) {
    Scenario s;
    s.frictions.tau2 = 0.99;
    EXPECT_TRUE(solve_vb_diagnosed(s).diagnostics->continuity_sufficient);
}

TEST(Assumptions, TinyGuaranteeTaxFailsGCondition) {
    Scenario s;
    s.frictions.tau1 = 0.0005;
    EXPECT_FALSE(solve_vb_diagnosed(s).diagnostics->g_star_positive_condition);
}

TEST(Assumptions, AlphaBounds) {
    Scenario s;
    s.contract.alpha = 0.11;
    auto r = *solve_vb_diagnosed(s).diagnostics;
    EXPECT_TRUE(r.alpha_below_bar);
    EXPECT_FALSE(r.alpha_below_tilde);
    s.contract.alpha = 0.2;
    EXPECT_FALSE(check_assumptions(s, 45.0).alpha_below_bar);
}

TEST(Assumptions, GConditionUnderImmediateBankruptcy) {
    Scenario s;
    s.contract.p_lump = 300.0;
    EXPECT_EQ(dv_dg_at_zero(s), -std::numeric_limits<double>::infinity());
}
