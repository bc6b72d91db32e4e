#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "fskmc/lattice.hpp"
#include "fskmc/models.hpp"
#include "fskmc/rng.hpp"

namespace fskmc {

struct SimClock {
    double t = 0.0;
    std::uint64_t events = 0;
};

enum class RateUpdate {
    incremental,  ///< re-evaluate only rates within range of the sites an event changed
    full_scan,    ///< re-evaluate every rate after every event
};

/// Called with the index k of a sample time once sigma holds the value the
/// path takes at that time.
using SampleCallback = std::function<void(std::size_t)>;

/// Exact SSA restricted to an active site set.
///
/// Rates are cached per (site, tag) slot in ascending (site, tag) order, in
/// the leaves of a fixed-shape binary sum tree: every node is the sum of its
/// two children however it was last updated, so the incremental and
/// full-scan update modes produce bit-identical trajectories. Selection
/// descends the tree, O(log n) per event. With
/// `confine` set, events whose partner site lies outside the active set are
/// excluded, so the kernel never writes outside its sites.
class SsaKernel {
public:
    SsaKernel(const RateModel& model, const Lattice& lat, std::span<const Site> sites, bool confine = false,
              RateUpdate mode = RateUpdate::incremental,
              std::shared_ptr<const Neighborhood> neighborhood = nullptr);

    /// Re-evaluate every rate against sigma (sites outside the set may have changed).
    void refresh(std::span<const Spin> sigma);

    double total_rate() const noexcept { return tree_[1]; }
    std::span<const Site> sites() const noexcept { return sites_; }
    std::vector<Event> events() const;

    /// One SSA step toward t_end. Returns the fired event, or nullopt when
    /// the window is exhausted (then clock.t == t_end and sigma is unchanged).
    std::optional<Event> step(std::span<Spin> sigma, RngStream& rng, SimClock& clock, double t_end);

    /// Steps until t_end. `sample_times` must be ascending and lie in
    /// (clock.t, t_end]; a jump landing exactly on a sample time is seen
    /// post-jump.
    void run(std::span<Spin> sigma, RngStream& rng, SimClock& clock, double t_end,
             std::span<const double> sample_times = {}, const SampleCallback& on_sample = {});

private:
    Event fire(std::span<Spin> sigma, RngStream& rng);
    void update_site(std::span<const Spin> sigma, std::size_t local);
    void update_and_propagate(std::span<const Spin> sigma, std::size_t local);
    void propagate(std::size_t slot) noexcept;

    const RateModel* model_;
    const Lattice* lat_;
    std::vector<Site> sites_;
    int tags_;
    RateUpdate mode_;
    std::shared_ptr<const Neighborhood> neighborhood_;
    std::vector<std::int32_t> local_of_;  // lattice site -> index in sites_, or -1
    std::vector<std::uint8_t> allowed_;   // per slot: partner inside the confinement
    std::size_t leaves_ = 1;
    std::vector<double> tree_;  // binary sum tree over the (site, tag) slots; tree_[1] is lambda
};

/// lambda = sum over sites and tags of the event rates, ascending order.
double total_rate(const RateModel& model, const Lattice& lat, std::span<const Spin> sigma,
                  std::span<const Site> sites);

std::optional<Event> ssa_step(const RateModel& model, const Lattice& lat, std::span<Spin> sigma,
                              std::span<const Site> sites, RngStream& rng, SimClock& clock, double t_end);

void run_interval(const RateModel& model, const Lattice& lat, std::span<Spin> sigma, std::span<const Site> sites,
                  RngStream& rng, SimClock& clock, double t1, std::span<const double> sample_times = {},
                  const SampleCallback& on_sample = {});

}  // namespace fskmc
