#include <doctest.h>

#include <cmath>

#include "fskmc/errors.hpp"
#include "fskmc/models.hpp"
#include "support.hpp"

using namespace fskmc;
using fskmc::test::from_bits;

TEST_CASE("spin-flip rate examples") {
    const auto ring = build_lattice(1, {4});
    const Configuration empty(4);
    const SpinFlipModel adsorb({1.0, 0.5, 0.3, 1.0, 1.0});
    for (Site x = 0; x < 4; ++x) CHECK(event_rate(adsorb, ring, empty.spins(), x, 0) == doctest::Approx(1.0));

    const Configuration full(4, 1, 1);
    const SpinFlipModel hot({0.0, 1.0, 0.7, 1.0, 1.0});
    CHECK(event_rate(hot, ring, full.spins(), 2, 0) == doctest::Approx(1.0));

    // frozen from tests/reference/oracle_values.py
    const SpinFlipModel m({1.0, 1.0, 0.0, 1.0, 1.0});
    const auto s = from_bits({1, 1, 0, 0});
    CHECK(event_rate(m, ring, s.spins(), 0, 0) == doctest::Approx(0.36787944117144233).epsilon(1e-14));
}

TEST_CASE("event_rate rejects bad tags and sites") {
    const auto ring = build_lattice(1, {4});
    const Configuration s(4);
    const SpinFlipModel flip({});
    CHECK_THROWS_AS(event_rate(flip, ring, s.spins(), 0, 1), UsageError);
    CHECK_THROWS_AS(event_rate(flip, ring, s.spins(), 4, 0), UsageError);
    const ExchangeModel hop({});
    CHECK_THROWS_AS(event_rate(hop, ring, s.spins(), 0, 2), UsageError);
}

TEST_CASE("apply_event") {
    const auto ring = build_lattice(1, {4});
    const SpinFlipModel flip({});
    auto s = from_bits({0, 0, 0, 0});
    apply_event(flip, ring, s.spins(), {2, 0, 2, 1.0});
    CHECK(s == from_bits({0, 0, 1, 0}));
    apply_event(flip, ring, s.spins(), {2, 0, 2, 1.0});
    CHECK(s == from_bits({0, 0, 0, 0}));

    const ExchangeModel hop({});
    auto t = from_bits({1, 0, 1, 1});
    // tag 1 is the + direction along axis 0
    REQUIRE(hop.partner(ring, 0, 1) == 1);
    apply_event(hop, ring, t.spins(), {0, 1, 1, 1.0});
    CHECK(t == from_bits({0, 1, 1, 1}));
}

TEST_CASE("local_events") {
    const auto ring = build_lattice(1, {4});
    const SpinFlipModel m({1.0, 1.0, 0.0, 1.0, 1.0});
    const Site sites[] = {0, 1};
    const auto s = from_bits({1, 1, 0, 0});
    const auto ev = local_events(m, ring, s.spins(), sites);
    REQUIRE(ev.size() == 2);
    CHECK(ev[0].rate == doctest::Approx(std::exp(-1.0)));
    CHECK(ev[1].rate == doctest::Approx(std::exp(-1.0)));

    const ExchangeModel hop({});
    const Configuration full(4, 1, 1);
    CHECK(local_events(hop, ring, full.spins(), sites).empty());
}

TEST_CASE("interaction range is structural") {
    CHECK(interaction_range(SpinFlipModel({})) == 1);
    CHECK(interaction_range(SpinFlipModel({1.0, 0.0, 0.0, 1.0, 1.0})) == 1);
    CHECK(interaction_range(ExchangeModel({})) == 1);
}

TEST_CASE("property: spin-flip rate locality") {
    const auto lat = build_lattice(1, {9});
    const SpinFlipModel m({2.0, 0.37, 0.5, 1.0, 1.0});
    RngStream rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        auto s = fskmc::test::random_config(9, rng);
        for (Site x = 0; x < 9; ++x) {
            const double before = m.rate(lat, s.spins(), x, 0);
            for (Site y = 0; y < 9; ++y) {
                if (lat.distance(x, y) <= 1) continue;
                s[y] ^= 1;
                CHECK(m.rate(lat, s.spins(), x, 0) == before);
                s[y] ^= 1;
            }
        }
    }
}

TEST_CASE("property: Kawasaki conserves particles and flips are involutions") {
    const auto lat = build_lattice(2, {6, 4});
    const ExchangeModel hop({1.5, 0.8, 1.0});
    const SpinFlipModel flip({1.0, 0.3, 0.1, 1.0, 1.0});
    RngStream rng(5);
    auto s = fskmc::test::random_config(lat.size(), rng, 0.4);
    const auto total = s.total();
    const auto all = fskmc::test::iota_sites(lat.size());
    for (int step = 0; step < 2000; ++step) {
        const auto ev = local_events(hop, lat, s.spins(), all);
        REQUIRE(!ev.empty());
        const auto& e = ev[static_cast<std::size_t>(rng.uniform() * static_cast<double>(ev.size()))];
        CHECK(s[e.site] == 1);
        CHECK(s[e.partner] == 0);
        apply_event(hop, lat, s.spins(), e);
        CHECK(s.total() == total);
    }
    const auto copy = s;
    for (Site x = 0; x < static_cast<Site>(lat.size()); ++x) {
        flip.apply(lat, s.spins(), x, 0);
        flip.apply(lat, s.spins(), x, 0);
    }
    CHECK(s == copy);
}
