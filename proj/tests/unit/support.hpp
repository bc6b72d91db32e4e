#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "fskmc/lattice.hpp"
#include "fskmc/models.hpp"
#include "fskmc/rng.hpp"

namespace fskmc::test {

inline std::vector<Site> iota_sites(std::size_t n) {
    std::vector<Site> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = static_cast<Site>(i);
    return s;
}

inline Configuration random_config(std::size_t n, RngStream& rng, double density = 0.5) {
    Configuration c(n);
    for (std::size_t i = 0; i < n; ++i) c[static_cast<Site>(i)] = rng.uniform() < density ? 1 : 0;
    return c;
}

inline Configuration from_bits(std::initializer_list<int> bits) {
    std::vector<Spin> s;
    for (int b : bits) s.push_back(static_cast<Spin>(b));
    return Configuration(s);
}

/// Kolmogorov-Smirnov statistic of `xs` against Exp(rate).
inline double ks_exponential(std::vector<double> xs, double rate) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double cdf = 1.0 - std::exp(-rate * xs[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - cdf, cdf - static_cast<double>(i) / n});
    }
    return d;
}

/// Asymptotic KS critical value: sqrt(-ln(alpha/2) / 2) / sqrt(n).
inline double ks_critical(std::size_t n, double alpha) {
    return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

}  // namespace fskmc::test
