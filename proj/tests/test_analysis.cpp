#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace parti;

namespace {

std::vector<double> range(double a, double b, double step) {
    std::vector<double> g;
    for (int i = 0; a + i * step <= b + 1e-12; ++i) g.push_back(a + i * step);
    return g;
}

}  // namespace

TEST(Sweep, ImmediateBankruptcyCrossing) {
    KernelCache cache;
    const SweepTable t = sweep_vb(base_scenario(), SweepAxis::g_over_p, {0.111, 0.112}, cache);
    ASSERT_EQ(t.failures(), 0u);
    const auto imm = t.column("immediate");
    EXPECT_EQ(imm[0], 0.0);
    EXPECT_EQ(imm[1], 1.0);
    EXPECT_EQ(t.column("vb_over_v0")[1], 1.0);
}

TEST(Sweep, BarrierIncreasesWithGuaranteeAndParticipation) {
    KernelCache cache;
    const Scenario s;
    for (SweepAxis axis : {SweepAxis::g_over_p, SweepAxis::alpha}) {
        const auto grid = axis == SweepAxis::alpha ? range(0.0, 0.09, 0.01) : range(0.0, 0.11, 0.01);
        const auto vb = sweep_vb(s, axis, grid, cache).column("vb");
        for (std::size_t i = 1; i < vb.size(); ++i) EXPECT_GT(vb[i], vb[i - 1]) << i;
    }
}

TEST(Sweep, FailedRowsKeepGrid) {
    KernelCache cache;
    const SweepTable t = sweep_vb(base_scenario(), SweepAxis::alpha, {0.05, 1.5}, cache);
    EXPECT_EQ(t.failures(), 1u);
    EXPECT_EQ(t.rows[1].axis[0], 1.5);
    EXPECT_TRUE(std::isnan(t.column("vb")[1]));
    EXPECT_THROW((void)t.column("nope"), std::out_of_range);
}

TEST(Curves, GuaranteeSweepIdentities) {
    KernelCache cache;
    const SweepTable t = curves_vs_guarantee(base_scenario(), range(0.0, 0.06, 0.01), cache);
    ASSERT_EQ(t.failures(), 0u);
    for (const auto& r : t.rows) {
        // v, E, L, TB1, TB2, BC
        EXPECT_NEAR(r.out[1], 100.0 + r.out[4] + r.out[5] - r.out[6], 1e-9);
        EXPECT_NEAR(r.out[2], r.out[1] - r.out[3], 1e-9);
    }
    // TB1 rises at first, then the higher barrier erodes it
    const auto tb1 = t.column("tb1");
    EXPECT_GT(tb1[1], tb1[0]);
    EXPECT_GT(tb1[2], tb1[1]);
    const auto bc = t.column("bc");
    for (std::size_t i = 1; i < bc.size(); ++i) EXPECT_GT(bc[i], bc[i - 1]);
}

TEST(Curves, AssetSweep) {
    KernelCache cache;
    std::vector<double> grid = range(20.0, 300.0, 5.0);
    const SweepTable t = curves_vs_asset(base_scenario(), grid, cache);
    ASSERT_EQ(t.failures(), 0u);
    const double vb = t.rows[0].out[0];
    const auto v = t.column("firm_value");
    const auto e = t.column("equity");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] <= vb) {
            EXPECT_EQ(e[i], 0.0);
        } else {
            EXPECT_GE(e[i], -1e-6);
        }
        if (i > 0) {
            EXPECT_GE(v[i], v[i - 1]);
        }
    }
    // smooth pasting: equity vanishes at the barrier
    Scenario at = base_scenario();
    at.v0 = vb * (1 + 1e-9);
    EXPECT_NEAR(firm_value(at, vb).equity, 0.0, 1e-6);
}

TEST(Sensitivity, AlphaStarDirections) {
    const Scenario s;
    const auto tau = sensitivity_alpha_star(s, SensitivityAxis::tau2, {0.05, 0.2, 0.35, 0.5});
    const auto a = tau.column("alpha_star");
    EXPECT_LT(a[0], 1e-4);
    for (std::size_t i = 1; i < a.size(); ++i) EXPECT_GE(a[i], a[i - 1] - 1e-6);
    EXPECT_GT(a[2], 0.05);

    const auto tm = sensitivity_alpha_star(s, SensitivityAxis::t_mat, {10.0, 30.0, 50.0}).column("alpha_star");
    EXPECT_GT(tm[0], tm[1]);
    EXPECT_GT(tm[1], tm[2]);
    EXPECT_NEAR(tm[1], 0.0998826, 1e-4);
}

TEST(Regions, AlphaPositivityAndDeterminism) {
    const Scenario s;
    const auto t1 = region_scan(s, RegionY::tau, RegionTarget::alpha, {0.95, 1.6}, {0.05, 0.35});
    const auto t2 = region_scan(s, RegionY::tau, RegionTarget::alpha, {0.95, 1.6}, {0.05, 0.35});
    ASSERT_EQ(t1.rows.size(), 4u);
    const auto pos = t1.column("positive");
    // rows are y-major: (0.95,0.05), (1.6,0.05), (0.95,0.35), (1.6,0.35)
    EXPECT_EQ(pos[0], 0.0);
    EXPECT_EQ(pos[1], 0.0);
    EXPECT_EQ(pos[2], 1.0);
    EXPECT_EQ(pos[3], 0.0);
    for (std::size_t i = 0; i < t1.rows.size(); ++i) EXPECT_EQ(t1.rows[i].out, t2.rows[i].out);
}

TEST(Regions, GuaranteeOnGuaranteeAxisRejected) {
    EXPECT_THROW((void)region_scan(base_scenario(), RegionY::g_over_p, RegionTarget::g, {1.0}, {0.02}),
                 std::invalid_argument);
}

TEST(Regions, GuaranteePositivity) {
    const auto t = region_scan(base_scenario(), RegionY::tau, RegionTarget::g, {0.95, 2.0}, {0.35});
    const auto pos = t.column("positive");
    EXPECT_EQ(pos[0], 1.0);
    EXPECT_EQ(pos[1], 0.0);
}

TEST(Substitution, OnsetWithoutParticipation) {
    const auto rep = asset_substitution(base_scenario(), default_asset_grid(100.0), {0.0}, {30.0});
    ASSERT_TRUE(rep.barrier_resolved);
    EXPECT_NEAR(rep.onset(0.0, 30.0), 74.0, 1.0);
    // flagged set is an interval starting at the onset
    bool seen = false, gap = false;
    for (const auto& e : rep.entries) {
        ASSERT_TRUE(e.error.empty());
        if (e.substitution && gap) FAIL() << "second flagged interval at " << e.v;
        if (e.substitution) seen = true;
        if (seen && !e.substitution) gap = true;
    }
}

TEST(Substitution, NoneAtOptimalParticipation) {
    const Scenario s;
    const double a = alpha_upper_bound(s);
    const auto rep = asset_substitution(s, default_asset_grid(100.0), {a}, {30.0});
    EXPECT_EQ(rep.flagged(a, 30.0), 0u);
    EXPECT_TRUE(std::isnan(rep.onset(a, 30.0)));
}
