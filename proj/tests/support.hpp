#pragma once

#include <array>
#include <random>

#include "nudgesim/game_core.hpp"

namespace testing_support {

struct TableRow {
    double k;
    double eps0;
    double eps1;
    double lambda_bar;
};

// Fully informative case study: (k, eps0, eps1) and the reference effort to two decimals.
inline constexpr std::array<TableRow, 4> kTableOne{{
    {0.6, 0.05, 0.05, 0.66},
    {0.6, 0.15, 0.20, 0.34},
    {1.0, 0.05, 0.05, 0.40},
    {1.0, 0.15, 0.20, 0.14},
}};

inline nudgesim::GameConfig config_of(const TableRow& row) { return nudgesim::GameConfig(row.eps0, row.eps1, row.k); }

/// Random valid configuration with eps0 + eps1 <= max_total.
inline nudgesim::GameConfig random_config(std::mt19937_64& rng, double max_total = 0.6, double k_lo = 0.55,
                                          double k_hi = 3.0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double total = max_total * u(rng);
    const double split = u(rng);
    return nudgesim::GameConfig(total * split, total * (1.0 - split), k_lo + (k_hi - k_lo) * u(rng));
}

inline nudgesim::TaggingPolicy random_policy(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double a = u(rng);
    const double b = u(rng);
    return nudgesim::TaggingPolicy({{{a, 1.0 - a}, {b, 1.0 - b}}});
}

}  // namespace testing_support
