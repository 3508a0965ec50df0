#pragma once

#include "parti/core_math.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace parti {

/// Inputs of a down-and-out call: asset v, strike k, barrier vb, maturity t.
struct BarrierCallInputs {
    double v;
    double k;
    double vb;
    double t;
};

struct PassageFunctions {
    double f_cdf;
    double g_disc;
    double i1;
    double i2;
};

struct BarrierDerivIntegrals {
    double int_0_T;
    double int_0_inf;
};

namespace detail {

inline void require_passage_domain(double v, double vb, double t) {
    if (!(vb > 0.0) || !(v >= vb) || !(t > 0.0)) {
        throw std::domain_error("passage functions require v >= vb > 0 and t > 0");
    }
}

inline void require_call_domain(const BarrierCallInputs& in) {
    if (!(in.v > 0.0) || !(in.t > 0.0) || !(in.k >= 0.0) || !(in.vb >= 0.0) ||
        !(in.v >= in.vb)) {
        throw std::domain_error("barrier call requires v >= vb >= 0, k >= 0, v > 0, t > 0");
    }
}

}  // namespace detail

/// F^V(t): probability that the barrier vb is reached before t.
[[nodiscard]] inline double first_passage_cdf(double v, double vb, double t,
                                              const MarketParams& m) {
    detail::require_passage_domain(v, vb, t);
    const LambdaSet l = lambdas(m);
    const double lr = std::log(vb / v);
    const double d3 = d_factor_log(3, -lr, t, m);
    const double d4 = d_factor_log(4, -lr, t, m);
    return std::min(1.0, std_normal_cdf(-d3) + pow_cdf(2.0 * l.lambda2, lr, -d4));
}

/// G^V(t) = E[exp(-r tau) 1{tau <= t}].
[[nodiscard]] inline double discounted_passage(double v, double vb, double t,
                                               const MarketParams& m) {
    detail::require_passage_domain(v, vb, t);
    const LambdaSet l = lambdas(m);
    const double lr = std::log(vb / v);
    const double d5 = d_factor_log(5, -lr, t, m);
    const double d6 = d_factor_log(6, -lr, t, m);
    return pow_cdf(l.lambda2 - l.lambda3, lr, -d5) + pow_cdf(l.lambda2 + l.lambda3, lr, -d6);
}

[[nodiscard]] inline PassageFunctions passage_functions(double v, double vb, double T,
                                                        const MarketParams& m) {
    detail::require_passage_domain(v, vb, T);
    const LambdaSet l = lambdas(m);
    const double lr = std::log(vb / v);
    const double d5 = d_factor_log(5, -lr, T, m);
    const double d6 = d_factor_log(6, -lr, T, m);
    PassageFunctions p{};
    p.f_cdf = first_passage_cdf(v, vb, T, m);
    p.g_disc = discounted_passage(v, vb, T, m);
    p.i1 = (p.g_disc - std::exp(-m.r * T) * p.f_cdf) / (m.r * T);
    p.i2 = (pow_cdf(l.lambda2 - l.lambda3, lr, -d5) * d5 -
            pow_cdf(l.lambda2 + l.lambda3, lr, -d6) * d6) /
           (l.lambda3 * m.sigma * std::sqrt(T));
    return p;
}

struct I12 {
    double i1;
    double i2;
};

[[nodiscard]] inline I12 i1_i2(double v, double vb, double T, const MarketParams& m) {
    const PassageFunctions p = passage_functions(v, vb, T, m);
    return {p.i1, p.i2};
}

/// dI1/dV and dI2/dV at V = vb.
[[nodiscard]] inline I12 i1_i2_dv_at_barrier(double vb, double T, const MarketParams& m) {
    if (!(vb > 0.0)) throw std::domain_error("i1_i2_dv_at_barrier: vb must be positive");
    const AConstants a = a_constants(m, T, FrictionParams{});
    return {-2.0 * a.a1 / (m.r * T * vb), -2.0 * a.a2 / vb};
}

[[nodiscard]] inline double vanilla_call(double v, double k, double t, const MarketParams& m) {
    if (!(v > 0.0) || !(t > 0.0) || !(k >= 0.0)) {
        throw std::domain_error("vanilla_call requires v > 0, t > 0, k >= 0");
    }
    if (k == 0.0) return v * std::exp(-m.nu * t);
    const double lx = std::log(v / k);
    const double c = v * std::exp(-m.nu * t) * std_normal_cdf(d_factor_log(1, lx, t, m)) -
                     k * std::exp(-m.r * t) * std_normal_cdf(d_factor_log(2, lx, t, m));
    return std::max(0.0, c);
}

/// Down-and-out call; the branch is picked by vb <= k or vb > k.
[[nodiscard]] inline double down_and_out_call(const BarrierCallInputs& in,
                                              const MarketParams& m) {
    detail::require_call_domain(in);
    const auto [v, k, vb, t] = in;
    if (vb == 0.0) return vanilla_call(v, k, t, m);
    if (v == vb) return 0.0;
    const LambdaSet l = lambdas(m);
    const double lr = std::log(vb / v);
    const double ev = v * std::exp(-m.nu * t);
    const double ek = k * std::exp(-m.r * t);
    double c = 0.0;
    if (vb <= k) {
        const double ly = 2.0 * std::log(vb) - std::log(v) - std::log(k);
        c = vanilla_call(v, k, t, m) - ev * pow_cdf(2.0 * l.lambda1, lr, d_factor_log(1, ly, t, m)) +
            ek * pow_cdf(2.0 * l.lambda1 - 2.0, lr, d_factor_log(2, ly, t, m));
    } else {
        c = ev * std_normal_cdf(d_factor_log(1, -lr, t, m)) -
            ek * std_normal_cdf(d_factor_log(2, -lr, t, m)) -
            ev * pow_cdf(2.0 * l.lambda1, lr, d_factor_log(1, lr, t, m)) +
            ek * pow_cdf(2.0 * l.lambda1 - 2.0, lr, d_factor_log(2, lr, t, m));
    }
    return std::max(0.0, c);
}

/// dc_do/dV, both branches as displayed.
[[nodiscard]] inline double dcdo_dv(const BarrierCallInputs& in, const MarketParams& m) {
    detail::require_call_domain(in);
    const auto [v, k, vb, t] = in;
    const double st = m.sigma * std::sqrt(t);
    const double env = std::exp(-m.nu * t);
    const double ekr = k * std::exp(-m.r * t);
    if (vb == 0.0) {
        if (k == 0.0) return env;
        return env * std_normal_cdf(d_factor_log(1, std::log(v / k), t, m));
    }
    const LambdaSet l = lambdas(m);
    const double lr = std::log(vb / v);
    const double l1 = l.lambda1;
    // the ratio under the plain terms and under the reflected terms
    double lx = 0.0, ly = 0.0;
    if (vb <= k) {
        lx = std::log(v / k);
        ly = 2.0 * std::log(vb) - std::log(v) - std::log(k);
    } else {
        lx = -lr;
        ly = lr;
    }
    const double d1x = d_factor_log(1, lx, t, m), d2x = d_factor_log(2, lx, t, m);
    const double d1y = d_factor_log(1, ly, t, m), d2y = d_factor_log(2, ly, t, m);
    double out = env * std_normal_cdf(d1x) + env * std_normal_pdf(d1x) / st -
                 ekr * std_normal_pdf(d2x) / (st * v);
    out += -(1.0 - 2.0 * l1) * env * pow_cdf(2.0 * l1, lr, d1y) +
           env * pow_pdf(2.0 * l1, lr, d1y) / st;
    out += (2.0 - 2.0 * l1) * ekr / v * pow_cdf(2.0 * l1 - 2.0, lr, d2y) -
           ekr * pow_pdf(2.0 * l1 - 2.0, lr, d2y) / (st * v);
    return out;
}

/// dc_do/dvb with V held fixed.
[[nodiscard]] inline double dcdo_dvb(const BarrierCallInputs& in, const MarketParams& m) {
    detail::require_call_domain(in);
    const auto [v, k, vb, t] = in;
    if (vb == 0.0) return 0.0;
    const LambdaSet l = lambdas(m);
    const double l1 = l.lambda1;
    const double st = m.sigma * std::sqrt(t);
    const double ev = v * std::exp(-m.nu * t);
    const double ekr = k * std::exp(-m.r * t);
    const double lr = std::log(vb / v);
    if (vb <= k) {
        const double ly = 2.0 * std::log(vb) - std::log(v) - std::log(k);
        const double d1 = d_factor_log(1, ly, t, m), d2 = d_factor_log(2, ly, t, m);
        return (-ev * (2.0 * l1 * pow_cdf(2.0 * l1, lr, d1) + 2.0 * pow_pdf(2.0 * l1, lr, d1) / st) +
                ekr * ((2.0 * l1 - 2.0) * pow_cdf(2.0 * l1 - 2.0, lr, d2) +
                       2.0 * pow_pdf(2.0 * l1 - 2.0, lr, d2) / st)) /
               vb;
    }
    const double d1x = d_factor_log(1, -lr, t, m), d2x = d_factor_log(2, -lr, t, m);
    const double d1y = d_factor_log(1, lr, t, m), d2y = d_factor_log(2, lr, t, m);
    return (-ev * std_normal_pdf(d1x) / st + ekr * std_normal_pdf(d2x) / st -
            ev * (2.0 * l1 * pow_cdf(2.0 * l1, lr, d1y) + pow_pdf(2.0 * l1, lr, d1y) / st) +
            ekr * ((2.0 * l1 - 2.0) * pow_cdf(2.0 * l1 - 2.0, lr, d2y) +
                   pow_pdf(2.0 * l1 - 2.0, lr, d2y) / st)) /
           vb;
}

/// D(t): dc_do/dV evaluated at V = vb.
[[nodiscard]] inline double dcdo_dv_at_barrier(double vb, double k, double t,
                                               const MarketParams& m) {
    if (!(vb > 0.0) || !(t > 0.0) || !(k >= 0.0)) {
        throw std::domain_error("dcdo_dv_at_barrier requires vb > 0, t > 0, k >= 0");
    }
    const LambdaSet l = lambdas(m);
    const double lm = k == 0.0 ? 0.0 : std::min(std::log(vb / k), 0.0);
    if (t < 1e-12 && lm < 0.0) return 0.0;
    const double st = m.sigma * std::sqrt(t);
    const double d1 = d_factor_log(1, lm, t, m), d2 = d_factor_log(2, lm, t, m);
    const double first = 2.0 * std::exp(-m.nu * t) *
                         (l.lambda1 * std_normal_cdf(d1) + std_normal_pdf(d1) / st);
    if (k == 0.0) return first;
    return first - 2.0 * k * std::exp(-m.r * t) / vb *
                       (l.lambda2 * std_normal_cdf(d2) + std_normal_pdf(d2) / st);
}

/// d/dvb of D(t); nonnegative.
[[nodiscard]] inline double d2cdo_dvb_dv_at_barrier(double vb, double k, double t,
                                                    const MarketParams& m) {
    if (!(vb > 0.0) || !(t > 0.0) || !(k >= 0.0)) {
        throw std::domain_error("d2cdo_dvb_dv_at_barrier requires vb > 0, t > 0, k >= 0");
    }
    if (k == 0.0) return 0.0;
    const LambdaSet l = lambdas(m);
    const double lm = std::min(std::log(vb / k), 0.0);
    if (t < 1e-12 && lm < 0.0) return 0.0;
    const double st = m.sigma * std::sqrt(t);
    const double d2 = d_factor_log(2, lm, t, m);
    return 2.0 * k * std::exp(-m.r * t) / (vb * vb) *
           (l.lambda2 * std_normal_cdf(d2) + std_normal_pdf(d2) / st);
}

/// Closed forms of the D(t) integrals over [0,T] and [0,inf) when vb >= k.
[[nodiscard]] inline BarrierDerivIntegrals barrier_deriv_integrals_closed(
    double vb, double k, double T, const MarketParams& m) {
    if (!(vb > 0.0) || !(vb >= k)) {
        throw std::domain_error("barrier_deriv_integrals_closed requires vb >= k, vb > 0");
    }
    const AConstants a = a_constants(m, T, FrictionParams{});
    return {a.a4 - k / vb * a.a6, a.a3 - k / vb * a.a5};
}

struct LemmaIntegrals {
    double phi_finite;  // int_0^T e^{-rate t} phi(lambda sigma sqrt t) / sqrt t
    double phi_infinite;
    double cdf_finite;  // int_0^T e^{-rate t} Phi(lambda sigma sqrt t)
    double cdf_infinite;
};

/// The four erf-type integrals behind the A constants.
[[nodiscard]] inline LemmaIntegrals lemma_integrals(double lambda, double sigma, double rate, double T) {
    if (!(rate > 0.0) || !(sigma > 0.0) || !(T > 0.0)) {
        throw std::domain_error("lemma_integrals requires rate, sigma, T > 0");
    }
    const double q = lambda * lambda * sigma * sigma + 2.0 * rate;
    const double root = std::sqrt(q);
    const double erf_part = 2.0 * std_normal_cdf(root * std::sqrt(T)) - 1.0;
    LemmaIntegrals out{};
    out.phi_finite = erf_part / root;
    out.phi_infinite = 1.0 / root;
    out.cdf_finite = 0.5 / rate - std::exp(-rate * T) * std_normal_cdf(lambda * sigma * std::sqrt(T)) / rate +
                     lambda * sigma / (2.0 * rate) * erf_part / root;
    out.cdf_infinite = 0.5 / rate + lambda * sigma / (2.0 * rate) / root;
    return out;
}

}  // namespace parti
