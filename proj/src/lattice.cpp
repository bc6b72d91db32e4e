#include "fskmc/lattice.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <string>

#include "fskmc/errors.hpp"

namespace fskmc {

namespace {

int wrap(int i, int n) noexcept {
    const int r = i % n;
    return r < 0 ? r + n : r;
}

int axis_distance(int a, int b, int n) noexcept {
    const int d = std::abs(a - b) % n;
    return std::min(d, n - d);
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> issues)
    : std::invalid_argument([&] {
          std::string msg;
          for (const auto& issue : issues) {
              if (!msg.empty()) msg += "; ";
              msg += issue;
          }
          return msg;
      }()),
      issues_(std::move(issues)) {}

Lattice::Lattice(int dimension, std::vector<int> lengths)
    : dim_(dimension), lengths_(std::move(lengths)), size_(0) {
    if (dim_ != 1 && dim_ != 2) {
        throw ConfigError("lattice dimension must be 1 or 2, got " + std::to_string(dim_));
    }
    if (static_cast<int>(lengths_.size()) != dim_) {
        throw ConfigError("lattice has dimension " + std::to_string(dim_) + " but " +
                          std::to_string(lengths_.size()) + " side lengths");
    }
    for (int len : lengths_) {
        if (len < 1) throw ConfigError("lattice side lengths must be >= 1");
    }
    size_ = std::accumulate(lengths_.begin(), lengths_.end(), std::size_t{1},
                            [](std::size_t a, int b) { return a * static_cast<std::size_t>(b); });

    nearest_.resize(size_ * 2 * static_cast<std::size_t>(dim_));
    for (std::size_t x = 0; x < size_; ++x) {
        for (int axis = 0; axis < dim_; ++axis) {
            const auto base = x * 2 * static_cast<std::size_t>(dim_) + 2 * static_cast<std::size_t>(axis);
            nearest_[base] = shifted(static_cast<Site>(x), axis, -1);
            nearest_[base + 1] = shifted(static_cast<Site>(x), axis, +1);
        }
    }
}

Site Lattice::index(std::span<const int> c) const {
    if (static_cast<int>(c.size()) != dim_) throw UsageError("coordinate arity mismatch");
    if (dim_ == 1) return wrap(c[0], lengths_[0]);
    return wrap(c[0], lengths_[0]) * lengths_[1] + wrap(c[1], lengths_[1]);
}

std::array<int, 2> Lattice::coords(Site x) const noexcept {
    if (dim_ == 1) return {x, 0};
    return {x / lengths_[1], x % lengths_[1]};
}

Site Lattice::shifted(Site x, int axis, int steps) const noexcept {
    if (dim_ == 1) return wrap(x + steps, lengths_[0]);
    auto c = coords(x);
    c[static_cast<std::size_t>(axis)] = wrap(c[static_cast<std::size_t>(axis)] + steps,
                                             lengths_[static_cast<std::size_t>(axis)]);
    return c[0] * lengths_[1] + c[1];
}

int Lattice::distance(Site a, Site b) const noexcept {
    if (dim_ == 1) return axis_distance(a, b, lengths_[0]);
    const auto ca = coords(a);
    const auto cb = coords(b);
    return std::max(axis_distance(ca[0], cb[0], lengths_[0]),
                    axis_distance(ca[1], cb[1], lengths_[1]));
}

std::vector<Site> Lattice::sites_within(Site x, int r) const {
    std::vector<Site> out;
    if (r <= 0) return out;
    const int r0 = std::min(r, lengths_[0] / 2);
    if (dim_ == 1) {
        for (int k = -r0; k <= r0; ++k) out.push_back(shifted(x, 0, k));
    } else {
        const int r1 = std::min(r, lengths_[1] / 2);
        for (int k0 = -r0; k0 <= r0; ++k0) {
            const Site row = shifted(x, 0, k0);
            for (int k1 = -r1; k1 <= r1; ++k1) out.push_back(shifted(row, 1, k1));
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    out.erase(std::remove(out.begin(), out.end(), x), out.end());
    return out;
}

Lattice build_lattice(int dimension, std::vector<int> lengths) {
    return Lattice(dimension, std::move(lengths));
}

Configuration::Configuration(std::size_t sites, Spin max_spin, Spin fill)
    : spins_(sites, fill), max_spin_(max_spin) {
    if (fill > max_spin) throw ConfigError("initial spin exceeds spin range");
}

Configuration::Configuration(std::vector<Spin> spins, Spin max_spin)
    : spins_(std::move(spins)), max_spin_(max_spin) {
    for (Spin s : spins_) {
        if (s > max_spin_) throw ConfigError("spin value outside {0,...," + std::to_string(max_spin_) + "}");
    }
}

std::int64_t Configuration::total() const noexcept {
    return std::accumulate(spins_.begin(), spins_.end(), std::int64_t{0});
}

const std::vector<int>& Decomposition::group(int g) const {
    if (g != 1 && g != 2) throw UsageError("group id must be 1 or 2");
    return groups_[static_cast<std::size_t>(g - 1)];
}

std::vector<Site> Decomposition::group_sites(int g) const {
    std::vector<Site> out;
    for (int m : group(g)) {
        const auto& s = cells_[static_cast<std::size_t>(m)].sites;
        out.insert(out.end(), s.begin(), s.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

Decomposition decompose(const Lattice& lat, int q, int interaction_range) {
    if (q < 1) throw ConfigError("cell side q must be positive");
    if (interaction_range < 0) throw ConfigError("interaction range must be nonnegative");
    if (q <= interaction_range) {
        throw ConfigError("cell too small for interaction range (q=" + std::to_string(q) +
                          ", L=" + std::to_string(interaction_range) + ")");
    }
    const int rows = lat.lengths()[0];
    if (rows % q != 0) {
        throw ConfigError("lattice/cell mismatch: axis-0 length " + std::to_string(rows) +
                          " is not divisible by q=" + std::to_string(q));
    }
    const int m_count = rows / q;
    if (m_count % 2 != 0) {
        throw ConfigError("group coloring inconsistent under periodicity: " +
                          std::to_string(m_count) + " cells along axis 0 (must be even)");
    }

    Decomposition dec;
    dec.q_ = q;
    dec.range_ = interaction_range;
    dec.cells_.resize(static_cast<std::size_t>(m_count));
    dec.cell_of_.assign(lat.size(), -1);
    const int cols = lat.dimension() == 2 ? lat.lengths()[1] : 1;

    for (int m = 0; m < m_count; ++m) {
        auto& cell = dec.cells_[static_cast<std::size_t>(m)];
        cell.group = (m % 2 == 0) ? 1 : 2;
        dec.groups_[static_cast<std::size_t>(cell.group - 1)].push_back(m);
        for (int row = m * q; row < (m + 1) * q; ++row) {
            for (int col = 0; col < cols; ++col) {
                const Site x = row * cols + col;
                cell.sites.push_back(x);
                dec.cell_of_[static_cast<std::size_t>(x)] = m;
            }
        }
    }

    std::vector<int> mark(lat.size(), -1);
    for (int m = 0; m < m_count; ++m) {
        auto& cell = dec.cells_[static_cast<std::size_t>(m)];
        for (Site x : cell.sites) {
            for (Site y : lat.sites_within(x, interaction_range)) {
                if (dec.cell_of_[static_cast<std::size_t>(y)] != m && mark[static_cast<std::size_t>(y)] != m) {
                    mark[static_cast<std::size_t>(y)] = m;
                    cell.boundary.push_back(y);
                }
            }
        }
        std::sort(cell.boundary.begin(), cell.boundary.end());
    }
    return dec;
}

Neighborhood::Neighborhood(const Lattice& lat, int radius) : radius_(radius) {
    offsets_.reserve(lat.size() + 1);
    offsets_.push_back(0);
    for (std::size_t x = 0; x < lat.size(); ++x) {
        const auto near = lat.sites_within(static_cast<Site>(x), radius);
        sites_.insert(sites_.end(), near.begin(), near.end());
        offsets_.push_back(sites_.size());
    }
}

}  // namespace fskmc
