#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace fskmc {

using Site = std::int32_t;
using Spin = std::uint8_t;

/// Finite periodic lattice in one or two dimensions.
///
/// Sites are numbered row-major: in d=2 with lengths {L0, L1} the site at
/// coordinates (i0, i1) has index i0 * L1 + i1, so axis 1 is contiguous.
class Lattice {
public:
    Lattice(int dimension, std::vector<int> lengths);

    int dimension() const noexcept { return dim_; }
    std::span<const int> lengths() const noexcept { return lengths_; }
    std::size_t size() const noexcept { return size_; }
    bool periodic() const noexcept { return true; }

    Site index(std::span<const int> coords) const;
    std::array<int, 2> coords(Site x) const noexcept;

    /// Neighbour one step along `axis` in direction `dir` (+1 or -1), wrapping.
    Site shifted(Site x, int axis, int steps) const noexcept;

    /// The 2d nearest neighbours of x ordered (axis0 -, axis0 +, axis1 -, axis1 +).
    std::span<const Site> nearest(Site x) const noexcept {
        return {nearest_.data() + static_cast<std::size_t>(x) * 2 * dim_,
                static_cast<std::size_t>(2 * dim_)};
    }

    /// Periodic distance: |a-b| wrapped in d=1, Chebyshev of wrapped axis
    /// offsets in d=2.
    int distance(Site a, Site b) const noexcept;

    /// All y != x with distance(x, y) <= r, ascending.
    std::vector<Site> sites_within(Site x, int r) const;

    bool contains(Site x) const noexcept {
        return x >= 0 && static_cast<std::size_t>(x) < size_;
    }

private:
    int dim_;
    std::vector<int> lengths_;
    std::size_t size_;
    std::vector<Site> nearest_;
};

Lattice build_lattice(int dimension, std::vector<int> lengths);

/// Spin values on every lattice site, each in {0, ..., max_spin}.
class Configuration {
public:
    Configuration() = default;
    Configuration(std::size_t sites, Spin max_spin = 1, Spin fill = 0);
    Configuration(std::vector<Spin> spins, Spin max_spin = 1);

    std::size_t size() const noexcept { return spins_.size(); }
    Spin max_spin() const noexcept { return max_spin_; }

    Spin operator[](Site x) const noexcept { return spins_[static_cast<std::size_t>(x)]; }
    Spin& operator[](Site x) noexcept { return spins_[static_cast<std::size_t>(x)]; }

    std::span<const Spin> spins() const noexcept { return spins_; }
    std::span<Spin> spins() noexcept { return spins_; }

    std::int64_t total() const noexcept;

    friend bool operator==(const Configuration&, const Configuration&) = default;

private:
    std::vector<Spin> spins_;
    Spin max_spin_ = 1;
};

struct Cell {
    int group = 1;                ///< 1 or 2
    std::vector<Site> sites;      ///< ascending
    std::vector<Site> boundary;   ///< closure minus cell, ascending
};

/// Coarse-cell decomposition with a two-group coloring that alternates along
/// axis 0. In d=2 each cell spans the full extent of axis 1.
class Decomposition {
public:
    int q() const noexcept { return q_; }
    int range() const noexcept { return range_; }
    int cell_count() const noexcept { return static_cast<int>(cells_.size()); }
    /// Sites per cell.
    std::size_t cell_size() const noexcept { return cells_.front().sites.size(); }

    const std::vector<Cell>& cells() const noexcept { return cells_; }
    const Cell& cell(int m) const { return cells_.at(static_cast<std::size_t>(m)); }

    /// Cell indices of group 1 or 2.
    const std::vector<int>& group(int g) const;
    int cell_of(Site x) const noexcept { return cell_of_[static_cast<std::size_t>(x)]; }

    /// Union of the sites of every cell in group g, ascending.
    std::vector<Site> group_sites(int g) const;

private:
    friend Decomposition decompose(const Lattice&, int, int);

    int q_ = 0;
    int range_ = 0;
    std::vector<Cell> cells_;
    std::array<std::vector<int>, 2> groups_;
    std::vector<int> cell_of_;
};

/// Split `lat` into stripes of q rows along axis 0 for interaction range L.
Decomposition decompose(const Lattice& lat, int q, int interaction_range);

/// Neighbourhood table of radius r for every site, stored CSR-style.
class Neighborhood {
public:
    Neighborhood(const Lattice& lat, int radius);

    int radius() const noexcept { return radius_; }
    /// Sites within the radius of x, excluding x, ascending.
    std::span<const Site> of(Site x) const noexcept {
        const auto b = offsets_[static_cast<std::size_t>(x)];
        const auto e = offsets_[static_cast<std::size_t>(x) + 1];
        return {sites_.data() + b, e - b};
    }

private:
    int radius_;
    std::vector<std::size_t> offsets_;
    std::vector<Site> sites_;
};

}  // namespace fskmc
