#include "fskmc/observables.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <numeric>

#include "fskmc/errors.hpp"

namespace fskmc {

double coverage(std::span<const Spin> sigma) noexcept {
    if (sigma.empty()) return 0.0;
    // 32-bit partial sums vectorise; chunks keep them from overflowing
    std::uint64_t sum = 0;
    constexpr std::size_t chunk = std::size_t{1} << 24;
    for (std::size_t i = 0; i < sigma.size(); i += chunk) {
        std::uint32_t part = 0;
        const std::size_t end = std::min(sigma.size(), i + chunk);
        for (std::size_t j = i; j < end; ++j) part += sigma[j];
        sum += part;
    }
    return static_cast<double>(sum) / static_cast<double>(sigma.size());
}

double correlation(const Lattice& lat, std::span<const Spin> sigma, int lag) {
    if (lag < 0 || lag >= lat.lengths()[0]) {
        throw UsageError("correlation lag must satisfy 0 <= k < axis-0 length");
    }
    std::int64_t sum = 0;
    for (std::size_t x = 0; x < sigma.size(); ++x) {
        if (!sigma[x]) continue;
        sum += sigma[static_cast<std::size_t>(lat.shifted(static_cast<Site>(x), 0, lag))];
    }
    return static_cast<double>(sum) / static_cast<double>(sigma.size());
}

double variance_obs(std::span<const Spin> sigma) noexcept {
    const double c = coverage(sigma);
    return c - c * c;
}

Observable Observable::parse(std::string_view name) {
    if (name == "coverage") return coverage();
    if (name == "variance") return variance();
    constexpr std::string_view prefix = "correlation:";
    if (name.substr(0, prefix.size()) == prefix) {
        const auto digits = name.substr(prefix.size());
        int lag = -1;
        const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), lag);
        if (ec == std::errc{} && ptr == digits.data() + digits.size() && lag >= 0) return correlation(lag);
    }
    throw ConfigError("unknown observable '" + std::string(name) + "'");
}

std::vector<Observable> Observable::parse_list(std::string_view text) {
    std::vector<Observable> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        auto item = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
        while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
        if (!item.empty()) out.push_back(parse(item));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    if (out.empty()) throw ConfigError("observable list is empty");
    return out;
}

std::string Observable::name() const {
    switch (kind_) {
        case Kind::coverage: return "coverage";
        case Kind::variance: return "variance";
        case Kind::correlation: return "correlation:" + std::to_string(lag_);
    }
    return {};
}

double Observable::operator()(const Lattice& lat, std::span<const Spin> sigma) const {
    switch (kind_) {
        case Kind::coverage: return fskmc::coverage(sigma);
        case Kind::variance: return variance_obs(sigma);
        case Kind::correlation: return fskmc::correlation(lat, sigma, lag_);
    }
    return 0.0;
}

double discrete_derivative(const SpinFunction& f, std::span<const Spin> sigma, std::span<const Site> xs) {
    if (xs.empty()) throw UsageError("discrete_derivative needs at least one site");
    if (xs.size() > 20) throw UsageError("discrete_derivative: too many sites");
    std::vector<Spin> work(sigma.begin(), sigma.end());
    const std::size_t m = xs.size();
    double total = 0.0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
        std::size_t flipped = 0;
        for (std::size_t i = 0; i < m; ++i) {
            if (mask & (std::size_t{1} << i)) {
                auto& s = work[static_cast<std::size_t>(xs[i])];
                s = static_cast<Spin>(1 - s);
                ++flipped;
            }
        }
        const double value = f(work);
        total += ((m - flipped) % 2 == 0) ? value : -value;
        std::copy(sigma.begin(), sigma.end(), work.begin());
    }
    return total;
}

}  // namespace fskmc
