#pragma once

#include "parti/core_math.hpp"
#include "parti/valuation.hpp"

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>

namespace parti {

struct McConfig {
    std::uint64_t paths = 1'000'000;
    std::uint32_t steps_per_year = 252;
    std::uint64_t seed = 12345;
    double horizon = 1.0;
    std::uint64_t batch_size = 4096;

    void validate() const {
        if (paths < 1 || steps_per_year < 1 || batch_size < 1) {
            throw std::invalid_argument("McConfig: paths, steps_per_year and batch_size must be >= 1");
        }
    }
};

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;

    [[nodiscard]] double z_score(double reference) const {
        if (std_error == 0.0) return mean == reference ? 0.0 : std::numeric_limits<double>::infinity();
        return (mean - reference) / std_error;
    }
};

/// One simulated path: survival to t, terminal value, and the recorded passage time.
struct PathOutcome {
    bool killed;
    double tau;
    double v_t;
};

namespace detail {

class Accumulator {
public:
    void add(double x) {
        ++n_;
        sum_ += x;
        sum_sq_ += static_cast<long double>(x) * x;
    }
    [[nodiscard]] Estimate estimate() const {
        if (n_ == 0) return {};
        const long double mean = sum_ / n_;
        long double var = n_ > 1 ? (sum_sq_ - n_ * mean * mean) / (n_ - 1) : 0.0L;
        if (var < 0.0L) var = 0.0L;
        return {static_cast<double>(mean), static_cast<double>(std::sqrt(var / n_))};
    }

private:
    std::uint64_t n_ = 0;
    long double sum_ = 0.0L, sum_sq_ = 0.0L;
};

/// Calls visit(PathOutcome) for every path. Batches have their own seeded generator
/// and are visited in batch order, so results do not depend on scheduling.
template <class Visit>
void simulate_paths(double v, double vb, double t, const MarketParams& m, const McConfig& cfg,
                    Visit&& visit) {
    cfg.validate();
    if (!(v > 0.0) || !(t > 0.0) || !(vb >= 0.0)) {
        throw std::domain_error("simulate_paths requires v > 0, t > 0, vb >= 0");
    }
    if (vb >= v) {
        for (std::uint64_t i = 0; i < cfg.paths; ++i) visit(PathOutcome{true, 0.0, v});
        return;
    }
    const auto steps = static_cast<std::uint64_t>(
        std::max<double>(1.0, std::ceil(t * cfg.steps_per_year - 1e-9)));
    const double dt = t / static_cast<double>(steps);
    const double drift = (m.r - m.nu - 0.5 * m.sigma * m.sigma) * dt;
    const double vol = m.sigma * std::sqrt(dt);
    const double bridge_scale = 2.0 / (m.sigma * m.sigma * dt);
    const bool has_barrier = vb > 0.0;
    const double lb = has_barrier ? std::log(vb) : 0.0;
    const double x0 = std::log(v);

    const std::uint64_t batches = (cfg.paths + cfg.batch_size - 1) / cfg.batch_size;
    for (std::uint64_t b = 0; b < batches; ++b) {
        std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                          static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
        std::mt19937_64 rng(seq);
        boost::random::normal_distribution<double> normal;
        boost::random::uniform_01<double> unif;
        const std::uint64_t n = std::min(cfg.batch_size, cfg.paths - b * cfg.batch_size);
        for (std::uint64_t p = 0; p < n; ++p) {
            double x = x0;
            bool killed = false;
            double tau = 0.0;
            for (std::uint64_t i = 0; i < steps; ++i) {
                const double xn = x + drift + vol * normal(rng);
                if (has_barrier) {
                    bool cross = xn <= lb;
                    if (!cross) {
                        // below e^-40 the crossing probability is under the uniform's resolution
                        const double expo = bridge_scale * (x - lb) * (xn - lb);
                        if (expo < 40.0) cross = unif(rng) < std::exp(-expo);
                    }
                    if (cross) {
                        killed = true;
                        tau = (static_cast<double>(i) + 0.5) * dt;
                        break;
                    }
                }
                x = xn;
            }
            visit(PathOutcome{killed, tau, std::exp(x)});
        }
    }
}

}  // namespace detail

/// Down-and-out call by simulation.
[[nodiscard]] inline Estimate mc_barrier_call(double v, double k, double vb, double t, const MarketParams& m,
                                              const McConfig& cfg) {
    detail::Accumulator acc;
    const double disc = std::exp(-m.r * t);
    detail::simulate_paths(v, vb, t, m, cfg, [&](const PathOutcome& o) {
        acc.add(o.killed ? 0.0 : disc * std::max(o.v_t - k, 0.0));
    });
    return acc.estimate();
}

struct PassageEstimates {
    Estimate cdf;         // P(tau <= t)
    Estimate discounted;  // E[e^{-r tau} 1{tau <= t}]
};

[[nodiscard]] inline PassageEstimates mc_first_passage(double v, double vb, double t, const MarketParams& m,
                                                       const McConfig& cfg) {
    detail::Accumulator f, g;
    detail::simulate_paths(v, vb, t, m, cfg, [&](const PathOutcome& o) {
        f.add(o.killed ? 1.0 : 0.0);
        g.add(o.killed ? std::exp(-m.r * o.tau) : 0.0);
    });
    return {f.estimate(), g.estimate()};
}

struct LiabilityComponents {
    Estimate annuity;        // guarantee paid until t or default
    Estimate lump_sum;       // P/T at t on survival
    Estimate recovery;       // (1-rho) vb at default
    Estimate participation;  // alpha (V_t - k)+ on survival
    Estimate total;
};

/// The four parts of the cohort liability maturing at t, on one set of paths.
[[nodiscard]] inline LiabilityComponents mc_liability_components(const Scenario& s, double vb, double t,
                                                                 const McConfig& cfg) {
    const auto& m = s.market;
    const double g = s.contract.g_rate();
    const double p = s.contract.p_rate();
    const double k = s.contract.k_threshold;
    const double a = s.contract.alpha;
    const double rec = (1.0 - s.frictions.rho) * vb;
    const double disc = std::exp(-m.r * t);
    detail::Accumulator ann, lump, recv, part, tot;
    detail::simulate_paths(s.v0, vb, t, m, cfg, [&](const PathOutcome& o) {
        const double stop = o.killed ? o.tau : t;
        const double x1 = g / m.r * (1.0 - std::exp(-m.r * stop));
        const double x2 = o.killed ? 0.0 : p * disc;
        const double x3 = o.killed ? rec * std::exp(-m.r * o.tau) : 0.0;
        const double x4 = o.killed || a == 0.0 ? 0.0 : a * disc * std::max(o.v_t - k, 0.0);
        ann.add(x1);
        lump.add(x2);
        recv.add(x3);
        part.add(x4);
        tot.add(x1 + x2 + x3 + x4);
    });
    return {ann.estimate(), lump.estimate(), recv.estimate(), part.estimate(), tot.estimate()};
}

/// Closed-form counterparts of the four liability parts.
struct LiabilityParts {
    double annuity, lump_sum, recovery, participation, total;
};

[[nodiscard]] inline LiabilityParts liability_parts(const Scenario& s, double vb, double t) {
    const auto& m = s.market;
    const double g = s.contract.g_rate();
    const double p = s.contract.p_rate();
    double f = 0.0, gd = 0.0;
    if (vb >= s.v0) {
        f = 1.0;
        gd = 1.0;
    } else if (vb > 0.0) {
        f = first_passage_cdf(s.v0, vb, t, m);
        gd = discounted_passage(s.v0, vb, t, m);
    }
    const double disc = std::exp(-m.r * t);
    LiabilityParts out{};
    out.annuity = g / m.r * (1.0 - disc * (1.0 - f) - gd);
    out.lump_sum = p * disc * (1.0 - f);
    out.recovery = (1.0 - s.frictions.rho) * vb * gd;
    out.participation = s.contract.alpha > 0.0 && vb < s.v0
                            ? s.contract.alpha * down_and_out_call({s.v0, s.contract.k_threshold, vb, t}, m)
                            : 0.0;
    out.total = out.annuity + out.lump_sum + out.recovery + out.participation;
    return out;
}

}  // namespace parti
