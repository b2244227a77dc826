// stats.hpp
// Interval estimates and tolerance checks for Monte-Carlo tallies.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>

namespace qcheque::stats {

inline constexpr double kZ95 = 1.96;

struct Interval {
    double low = 0.0;
    double high = 1.0;
};

inline Interval wilson(std::size_t successes, std::size_t trials, double z = kZ95) {
    if (trials == 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
    const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n);
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

// Standard deviation of a binomial count.
inline double binomial_sigma(double p, std::size_t trials) {
    return std::sqrt(static_cast<double>(trials) * p * (1 - p));
}

// Standard deviation of a sum of independent Bernoulli(p_t).
inline double poisson_binomial_sigma(std::span<const double> ps) {
    double v = 0.0;
    for (const double p : ps) v += p * (1 - p);
    return std::sqrt(v);
}

// |observed - expected| <= k sigma, with a floor of half a count so that
// degenerate p in {0, 1} still demands an exact match.
inline bool within_sigmas(double observed, double expected, double sigma, double k = 4.0) {
    return std::abs(observed - expected) <= std::max(k * sigma, 0.5);
}

}  // namespace qcheque::stats
