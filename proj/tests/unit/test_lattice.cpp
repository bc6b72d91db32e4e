#include <doctest.h>

#include <array>
#include <set>

#include "fskmc/errors.hpp"
#include "fskmc/lattice.hpp"

using namespace fskmc;

TEST_CASE("build_lattice sizes") {
    CHECK(build_lattice(1, {800}).size() == 800);
    CHECK(build_lattice(1, {4}).size() == 4);
    const auto lat = build_lattice(2, {8, 4});
    CHECK(lat.size() == 32);
    const int corner[] = {7, 0};
    const int origin[] = {0, 0};
    CHECK(lat.shifted(lat.index(corner), 0, 1) == lat.index(origin));
}

TEST_CASE("build_lattice rejects bad shapes") {
    CHECK_THROWS_AS(build_lattice(1, {4, 4}), ConfigError);
    CHECK_THROWS_AS(build_lattice(3, {2, 2, 2}), ConfigError);
    CHECK_THROWS_AS(build_lattice(1, {0}), ConfigError);
    CHECK(build_lattice(1, {1}).size() == 1);
    CHECK_THROWS_AS(build_lattice(2, {4}), ConfigError);
}

TEST_CASE("row-major indexing round trip") {
    const auto lat = build_lattice(2, {5, 3});
    for (Site x = 0; x < 15; ++x) {
        const auto c = lat.coords(x);
        CHECK(lat.index(std::span<const int>(c.data(), 2)) == x);
        CHECK(x == c[0] * 3 + c[1]);
    }
}

TEST_CASE("nearest neighbours wrap") {
    const auto lat = build_lattice(1, {4});
    const auto nn = lat.nearest(0);
    CHECK(nn[0] == 3);
    CHECK(nn[1] == 1);
}

TEST_CASE("sites_within") {
    const auto ring = build_lattice(1, {4});
    CHECK(ring.sites_within(0, 1) == std::vector<Site>{1, 3});
    CHECK(ring.sites_within(0, 0).empty());
    CHECK(build_lattice(1, {800}).sites_within(0, 1) == std::vector<Site>{1, 799});
    const auto sq = build_lattice(2, {5, 5});
    CHECK(sq.sites_within(12, 1).size() == 8);  // Chebyshev box
}

TEST_CASE("decompose examples") {
    const auto big = decompose(build_lattice(1, {800}), 100, 1);
    CHECK(big.cell_count() == 8);
    CHECK(big.group(1).size() == 4);
    CHECK(big.group(2).size() == 4);

    const auto small = decompose(build_lattice(1, {4}), 2, 1);
    REQUIRE(small.cell_count() == 2);
    CHECK(small.cell(0).sites == std::vector<Site>{0, 1});
    CHECK(small.cell(1).sites == std::vector<Site>{2, 3});
    CHECK(small.group(1) == std::vector<int>{0});
    CHECK(small.group(2) == std::vector<int>{1});
    CHECK(small.cell(0).boundary == std::vector<Site>{2, 3});
}

TEST_CASE("decompose errors") {
    CHECK_THROWS_WITH_AS(decompose(build_lattice(1, {8}), 2, 2), doctest::Contains("cell too small"), ConfigError);
    CHECK_THROWS_WITH_AS(decompose(build_lattice(1, {10}), 3, 1), doctest::Contains("lattice/cell mismatch"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(decompose(build_lattice(1, {6}), 2, 1), doctest::Contains("group coloring"), ConfigError);
}

namespace {

void check_decomposition(const Lattice& lat, const Decomposition& dec) {
    std::vector<int> owner(lat.size(), -1);
    std::size_t total = 0;
    for (int m = 0; m < dec.cell_count(); ++m) {
        const auto& c = dec.cell(m);
        CHECK(c.sites.size() == dec.cell_size());
        total += c.sites.size();
        for (Site x : c.sites) {
            CHECK(owner[static_cast<std::size_t>(x)] == -1);
            owner[static_cast<std::size_t>(x)] = m;
            CHECK(dec.cell_of(x) == m);
        }
    }
    CHECK(total == lat.size());
    // same-group separation and boundaries inside the other group
    for (int m = 0; m < dec.cell_count(); ++m) {
        for (int k = m + 1; k < dec.cell_count(); ++k) {
            if (dec.cell(m).group != dec.cell(k).group) continue;
            int dmin = 1 << 30;
            for (Site a : dec.cell(m).sites)
                for (Site b : dec.cell(k).sites) dmin = std::min(dmin, lat.distance(a, b));
            CHECK(dmin > dec.range());
        }
        std::set<Site> expect;
        for (Site a : dec.cell(m).sites)
            for (Site y : lat.sites_within(a, dec.range()))
                if (dec.cell_of(y) != m) expect.insert(y);
        CHECK(std::vector<Site>(expect.begin(), expect.end()) == dec.cell(m).boundary);
        for (Site y : dec.cell(m).boundary) CHECK(dec.cell(dec.cell_of(y)).group != dec.cell(m).group);
    }
}

}  // namespace

TEST_CASE("partition, separation and boundary properties") {
    const std::array<std::array<int, 3>, 6> cases{{{4, 2, 1}, {12, 3, 2}, {100, 10, 1}, {120, 30, 1}, {120, 60, 1}, {16, 4, 3}}};
    for (const auto& [n, q, l] : cases) {
        CAPTURE(n);
        CAPTURE(q);
        const auto lat = build_lattice(1, {n});
        check_decomposition(lat, decompose(lat, q, l));
    }
    const auto lat2 = build_lattice(2, {8, 5});
    const auto dec2 = decompose(lat2, 2, 1);
    CHECK(dec2.cell_count() == 4);
    CHECK(dec2.cell_size() == 10);
    check_decomposition(lat2, dec2);
}

TEST_CASE("configuration validates spin range") {
    CHECK_THROWS_AS(Configuration(std::vector<Spin>{0, 2}, 1), ConfigError);
    Configuration c(4, 1, 1);
    CHECK(c.total() == 4);
}

TEST_CASE("neighborhood table matches sites_within") {
    const auto lat = build_lattice(2, {6, 4});
    const Neighborhood nb(lat, 1);
    for (Site x = 0; x < 24; ++x) {
        const auto span = nb.of(x);
        CHECK(std::vector<Site>(span.begin(), span.end()) == lat.sites_within(x, 1));
    }
}
