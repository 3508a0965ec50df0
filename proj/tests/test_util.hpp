#pragma once

#include "parti/parti.hpp"

#include <random>

namespace parti::test {

/// Draws from a wide but valid parameter box; fixed seed per caller.
struct Draws {
    explicit Draws(std::uint64_t seed) : rng(seed) {}

    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }

    MarketParams market() { return {uniform(0.002, 0.08), uniform(0.005, 0.12), uniform(0.08, 0.5)}; }

    Scenario scenario() {
        Scenario s;
        s.market = market();
        s.contract.t_mat = uniform(5.0, 50.0);
        s.contract.p_lump = uniform(50.0, 110.0);
        s.contract.g_total = uniform(0.0, 0.04) * s.contract.p_lump;
        s.contract.k_threshold = uniform(110.0, 250.0);
        s.frictions = {uniform(0.1, 0.45), uniform(0.1, 0.45), uniform(0.2, 0.8)};
        return s;
    }

    std::mt19937_64 rng;
};

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace parti::test
