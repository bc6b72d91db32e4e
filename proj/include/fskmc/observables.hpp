#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fskmc/lattice.hpp"

namespace fskmc {

double coverage(std::span<const Spin> sigma) noexcept;

/// (1/N) sum_x s(x) s(x+k). In d=2 the lag runs along axis 0.
double correlation(const Lattice& lat, std::span<const Spin> sigma, int lag);

/// coverage - coverage^2 for binary spins.
double variance_obs(std::span<const Spin> sigma) noexcept;

/// A named macroscopic observable: "coverage", "correlation:k" or "variance".
class Observable {
public:
    enum class Kind { coverage, correlation, variance };

    static Observable coverage() { return Observable(Kind::coverage, 0); }
    static Observable correlation(int lag) { return Observable(Kind::correlation, lag); }
    static Observable variance() { return Observable(Kind::variance, 0); }

    /// Throws ConfigError for unknown names or malformed lags.
    static Observable parse(std::string_view name);
    static std::vector<Observable> parse_list(std::string_view comma_separated);

    Kind kind() const noexcept { return kind_; }
    int lag() const noexcept { return lag_; }
    std::string name() const;

    double operator()(const Lattice& lat, std::span<const Spin> sigma) const;

    friend bool operator==(const Observable&, const Observable&) = default;

private:
    Observable(Kind kind, int lag) : kind_(kind), lag_(lag) {}

    Kind kind_;
    int lag_;
};

using SpinFunction = std::function<double(std::span<const Spin>)>;

/// Nested flip difference delta_{x1} ... delta_{xm} f(sigma): the alternating
/// sum of f over all subsets of flipped sites. Binary spins only.
double discrete_derivative(const SpinFunction& f, std::span<const Spin> sigma, std::span<const Site> xs);

}  // namespace fskmc
