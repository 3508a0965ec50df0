#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace parti;

TEST(NormalCdf, FixedPoints) {
    EXPECT_EQ(std_normal_cdf(0.0), 0.5);
    EXPECT_EQ(std_normal_cdf(40.0), 1.0);
    EXPECT_NEAR(std_normal_cdf(1.0), 0.8413447460685429, 1e-16);
}

TEST(NormalCdf, LogTailIsFiniteAndContinuous) {
    EXPECT_TRUE(std::isfinite(log_normal_cdf(-200.0)));
    EXPECT_NEAR(log_normal_cdf(-30.0 + 1e-9), log_normal_cdf(-30.0 - 1e-9), 1e-6);
    EXPECT_NEAR(log_normal_cdf(-5.0), std::log(std_normal_cdf(-5.0)), 1e-14);
}

TEST(NormalCdf, PowFormsMatchDirectProduct) {
    const double lr = std::log(0.45);
    EXPECT_NEAR(pow_cdf(-3.0, lr, 0.3), std::pow(0.45, -3.0) * std_normal_cdf(0.3), 1e-12);
    EXPECT_NEAR(pow_pdf(2.5, lr, -1.2), std::pow(0.45, 2.5) * std_normal_pdf(-1.2), 1e-14);
}

TEST(Lambdas, BaseMarket) {
    const LambdaSet l = lambdas(MarketParams{});
    EXPECT_NEAR(l.lambda1, -0.5, 1e-15);
    EXPECT_NEAR(l.lambda2, -1.5, 1e-15);
    EXPECT_NEAR(l.lambda3, 1.6583123951776999, 1e-14);
}

TEST(Lambdas, EqualRateAndPayout) {
    const LambdaSet l = lambdas({0.05, 0.05, 0.20});
    EXPECT_NEAR(l.lambda1, 0.5, 1e-15);
    EXPECT_NEAR(l.lambda2, -0.5, 1e-15);
    EXPECT_NEAR(l.lambda3, std::sqrt(0.25 * 0.04 * 0.04 + 2 * 0.05 * 0.04) / 0.04, 1e-14);
}

TEST(Lambdas, Properties) {
    test::Draws d(1);
    for (int i = 0; i < 10000; ++i) {
        const LambdaSet l = lambdas(d.market());
        EXPECT_NEAR(l.lambda2, l.lambda1 - 1.0, 1e-12);
        EXPECT_GT(l.lambda3, std::abs(l.lambda2));
        EXPECT_GT(l.lambda2 + l.lambda3, 0.0);
    }
}

TEST(DFactor, AtUnitRatio) {
    const MarketParams m;
    const LambdaSet l = lambdas(m);
    const double t = 7.0, st = m.sigma * std::sqrt(t);
    EXPECT_NEAR(d_factor(1, 1.0, t, m), l.lambda1 * st, 1e-14);
    EXPECT_NEAR(d_factor(3, 1.0, t, m), l.lambda2 * st, 1e-14);
    EXPECT_NEAR(d_factor(4, 1.0, t, m), -l.lambda2 * st, 1e-14);
    EXPECT_NEAR(d_factor(5, 1.0, t, m), l.lambda3 * st, 1e-14);
    EXPECT_NEAR(d_factor(6, 1.0, t, m), -l.lambda3 * st, 1e-14);
}

TEST(DFactor, FrozenValue) {
    EXPECT_NEAR(d_factor(2, 100.0 / 150.0, 30.0, MarketParams{}), -2.0133049825023524, 1e-13);
}

TEST(DFactor, RejectsBadInput) {
    EXPECT_THROW((void)d_factor(0, 1.0, 1.0, MarketParams{}), std::domain_error);
    EXPECT_THROW((void)d_factor(1, 0.0, 1.0, MarketParams{}), std::domain_error);
    EXPECT_THROW((void)d_factor(1, 1.0, 0.0, MarketParams{}), std::domain_error);
}

TEST(AConstants, BaseFrozen) {
    // reference values from 40-digit quadrature of the defining integrals
    const AConstants a = a_constants(MarketParams{}, 30.0, FrictionParams{});
    EXPECT_NEAR(a.a1, 0.07746721009230209, 1e-14);
    EXPECT_NEAR(a.a2, 0.3255058566637014, 1e-14);
    EXPECT_NEAR(a.a3, 23.166247903553998, 1e-11);
    EXPECT_NEAR(a.a4, 22.171311902453787, 1e-11);
    EXPECT_NEAR(a.a5, 15.831239517769992, 1e-11);
    EXPECT_NEAR(a.a6, 15.493442018460419, 1e-11);
    ASSERT_FALSE(a.alpha_bar.unbounded);
    EXPECT_NEAR(a.alpha_bar.value, 0.05 / (0.65 - std::exp(-1.5)), 1e-15);
    EXPECT_NEAR(a.alpha_bar.value, 0.1171317233782219, 1e-15);
    EXPECT_NEAR(std::round(a.alpha_bar.value * 100) / 100, 0.12, 1e-15);
    ASSERT_FALSE(a.alpha_tilde.unbounded);
    EXPECT_NEAR(a.alpha_tilde.value, 0.0998826392176382, 1e-12);
}

TEST(AConstants, AlphaBarUnboundedForFullTax) {
    FrictionParams f;
    f.tau2 = 1.0;
    const AConstants a = a_constants(MarketParams{}, 30.0, f);
    EXPECT_TRUE(a.alpha_bar.unbounded);
    EXPECT_TRUE(std::isinf(a.alpha_bar.value));
}

TEST(AConstants, PositivityOverRandomDraws) {
    test::Draws d(2);
    for (int i = 0; i < 10000; ++i) {
        const MarketParams m = d.market();
        const double T = d.uniform(0.5, 100.0);
        const double rho = d.uniform(0.0, 1.0);
        const AConstants a = a_constants(m, T, FrictionParams{0.3, 0.3, rho});
        const LambdaSet l = lambdas(m);
        ASSERT_GT(a.a1, 0.0) << i;
        ASSERT_GT(a.a2, 0.0) << i;
        ASSERT_GT(a.a4, 0.0) << i;
        ASSERT_GE(a.a3, a.a4 * (1 - 1e-14)) << i;
        ASSERT_GT(1.0 + rho * (l.lambda2 + l.lambda3) + 2.0 * (1.0 - rho) * a.a2, 0.0) << i;
    }
}

TEST(AConstants, RejectsNonPositiveMaturity) {
    EXPECT_THROW((void)a_constants(MarketParams{}, 0.0, FrictionParams{}), std::domain_error);
}
