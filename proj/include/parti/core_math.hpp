#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace parti {

/// Raised when an integral or root search cannot reach its tolerance.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Risk-neutral market: rate r, payout fraction nu, volatility sigma.
struct MarketParams {
    double r = 0.01;
    double nu = 0.05;
    double sigma = 0.20;

    [[nodiscard]] bool valid() const noexcept {
        return r > 0.0 && nu > 0.0 && sigma > 0.0 && std::isfinite(r) &&
               std::isfinite(nu) && std::isfinite(sigma);
    }
};

/// Tax rates on the guarantee (tau1) and on the participation (tau2),
/// and the fraction rho of assets lost at bankruptcy.
struct FrictionParams {
    double tau1 = 0.35;
    double tau2 = 0.35;
    double rho = 0.50;

    [[nodiscard]] bool valid() const noexcept {
        auto unit = [](double x) { return x >= 0.0 && x <= 1.0; };
        return unit(tau1) && unit(tau2) && unit(rho);
    }
};

struct LambdaSet {
    double lambda1;
    double lambda2;
    double lambda3;
};

/// A participation-rate bound that may be infinite.
struct RateBound {
    double value = std::numeric_limits<double>::infinity();
    bool unbounded = true;

    [[nodiscard]] static RateBound finite(double v) noexcept { return {v, false}; }
    [[nodiscard]] static RateBound infinite() noexcept { return {}; }
};

struct AConstants {
    double a1, a2, a3, a4, a5, a6;
    RateBound alpha_bar;
    RateBound alpha_tilde;
};

inline constexpr double inv_sqrt_2pi = 0.39894228040143267793994605993438;

[[nodiscard]] inline double std_normal_pdf(double x) noexcept {
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

/// Standard normal CDF through erfc, accurate in both tails.
[[nodiscard]] inline double std_normal_cdf(double x) noexcept {
    return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0);
}

/// log Phi(x), kept finite far into the lower tail.
[[nodiscard]] inline double log_normal_cdf(double x) noexcept {
    if (x > -30.0) {
        return std::log(std_normal_cdf(x));
    }
    // Mills ratio asymptotic series
    const double z2 = 1.0 / (x * x);
    const double series = 1.0 - z2 + 3.0 * z2 * z2 - 15.0 * z2 * z2 * z2;
    return -0.5 * x * x - std::log(-x) - 0.5 * std::log(2.0 * std::numbers::pi) +
           std::log(series);
}

[[nodiscard]] inline double log_normal_pdf(double x) noexcept {
    return -0.5 * x * x - 0.5 * std::log(2.0 * std::numbers::pi);
}

/// exp(p*log_ratio) * Phi(x), evaluated in log space.
[[nodiscard]] inline double pow_cdf(double p, double log_ratio, double x) noexcept {
    if (p * log_ratio == 0.0) return std_normal_cdf(x);
    return std::exp(p * log_ratio + log_normal_cdf(x));
}

/// exp(p*log_ratio) * phi(x), evaluated in log space.
[[nodiscard]] inline double pow_pdf(double p, double log_ratio, double x) noexcept {
    return std::exp(p * log_ratio + log_normal_pdf(x));
}

[[nodiscard]] inline LambdaSet lambdas(const MarketParams& m) noexcept {
    const double s2 = m.sigma * m.sigma;
    const double l1 = (m.r - m.nu + 0.5 * s2) / s2;
    const double l2 = (m.r - m.nu - 0.5 * s2) / s2;
    const double l3 = std::sqrt(l2 * s2 * l2 * s2 + 2.0 * m.r * s2) / s2;
    return {l1, l2, l3};
}

/// d_i evaluated from ln x rather than x.
[[nodiscard]] inline double d_factor_log(int index, double log_x, double t,
                                         const MarketParams& m) {
    const double s2 = m.sigma * m.sigma;
    const double st = m.sigma * std::sqrt(t);
    const LambdaSet l = lambdas(m);
    double drift = 0.0;
    switch (index) {
        case 1: drift = m.r - m.nu + 0.5 * s2; break;
        case 2: drift = m.r - m.nu - 0.5 * s2; break;
        case 3: drift = l.lambda2 * s2; break;
        case 4: drift = -l.lambda2 * s2; break;
        case 5: drift = l.lambda3 * s2; break;
        case 6: drift = -l.lambda3 * s2; break;
        default: throw std::domain_error("d_factor: index must be 1..6");
    }
    return (log_x + drift * t) / st;
}

/// d_i(x,t) for i = 1..6.
[[nodiscard]] inline double d_factor(int index, double x, double t, const MarketParams& m) {
    if (!(x > 0.0) || !(t > 0.0)) {
        throw std::domain_error("d_factor: requires x > 0 and t > 0");
    }
    return d_factor_log(index, std::log(x), t, m);
}

/// A1..A6 and the two participation-rate bounds for maturity T.
[[nodiscard]] inline AConstants a_constants(const MarketParams& m, double T,
                                            const FrictionParams& f) {
    if (!(T > 0.0)) throw std::domain_error("a_constants: T must be positive");
    const LambdaSet l = lambdas(m);
    const double s = m.sigma;
    const double sT = s * std::sqrt(T);
    const double l2 = l.lambda2, l3 = l.lambda3, l1 = l.lambda1;
    const double Phi = std_normal_cdf(l3 * sT);

    AConstants a{};
    a.a1 = 0.5 * (l2 - l3) + l3 * Phi - l2 * std::exp(-m.r * T) * std_normal_cdf(l2 * sT);
    a.a2 = 0.5 * (l2 - l3) - 1.0 / (2.0 * l3 * s * s * T) +
           (l3 + 1.0 / (l3 * s * s * T)) * Phi + std_normal_pdf(l3 * sT) / sT;

    const double k1 = std::sqrt(l1 * l1 * s * s + 2.0 * m.nu);
    a.a3 = l1 / m.nu + k1 / (s * m.nu);
    a.a4 = l1 / m.nu * (1.0 - 2.0 * std::exp(-m.nu * T) * std_normal_cdf(l1 * sT)) +
           k1 / (s * m.nu) * (2.0 * std_normal_cdf(k1 * std::sqrt(T)) - 1.0);

    const double k2 = std::sqrt(l2 * l2 * s * s + 2.0 * m.r);
    a.a5 = l2 / m.r + k2 / (s * m.r);
    a.a6 = l2 / m.r * (1.0 - 2.0 * std::exp(-m.r * T) * std_normal_cdf(l2 * sT)) +
           k2 / (s * m.r) * (2.0 * std_normal_cdf(k2 * std::sqrt(T)) - 1.0);

    const double bar_den = 1.0 - f.tau2 - std::exp(-m.nu * T);
    a.alpha_bar = bar_den > 0.0 ? RateBound::finite(m.nu / bar_den) : RateBound::infinite();

    const double tilde_den = a.a4 - f.tau2 * a.a3;
    const double tilde_num = 1.0 + f.rho * (l2 + l3) + 2.0 * (1.0 - f.rho) * a.a2;
    a.alpha_tilde = tilde_den > 0.0 ? RateBound::finite(tilde_num / tilde_den)
                                    : RateBound::infinite();
    return a;
}

}  // namespace parti
