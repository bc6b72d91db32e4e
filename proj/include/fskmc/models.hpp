#pragma once

#include <array>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "fskmc/lattice.hpp"

namespace fskmc {

/// One admissible transition rooted at `site`. `tag` indexes the update
/// (0 for a flip, a direction for an exchange); `partner` is the second
/// modified site, equal to `site` for single-site updates.
struct Event {
    Site site = 0;
    int tag = 0;
    Site partner = 0;
    double rate = 0.0;

    friend bool operator==(const Event&, const Event&) = default;
};

/// Transition mechanism plug-in: rates c(x, tag; sigma), the update rule and
/// the interaction range. Every site exposes the same number of tags; a tag
/// that is inadmissible in the current configuration has rate zero.
class RateModel {
public:
    virtual ~RateModel() = default;

    virtual std::string_view name() const noexcept = 0;
    virtual Spin max_spin() const noexcept { return 1; }

    /// Structural range L: rates at x read only sites within L of x and
    /// updates rooted at x write only sites within L of x.
    virtual int interaction_range() const noexcept = 0;

    virtual int tags_per_site(const Lattice& lat) const noexcept = 0;
    virtual double rate(const Lattice& lat, std::span<const Spin> sigma, Site x, int tag) const noexcept = 0;
    virtual Site partner(const Lattice& lat, Site x, int tag) const noexcept = 0;
    virtual void apply(const Lattice& lat, std::span<Spin> sigma, Site x, int tag) const noexcept = 0;
};

using ModelPtr = std::shared_ptr<const RateModel>;

struct SpinFlipParams {
    double beta = 1.0;
    double coupling = 0.0;  ///< J
    double field = 0.0;     ///< external field h-bar
    double c_a = 1.0;       ///< desorption prefactor
    double c_d = 1.0;       ///< adsorption rate
};

/// Adsorption/desorption with Arrhenius desorption:
///   c(x) = c_d (1 - s(x)) + c_a s(x) exp(-beta U(x)),
///   U(x) = J * (sum of nearest-neighbour spins) + field.
class SpinFlipModel final : public RateModel {
public:
    explicit SpinFlipModel(SpinFlipParams params);

    const SpinFlipParams& params() const noexcept { return params_; }

    std::string_view name() const noexcept override { return "spin_flip"; }
    int interaction_range() const noexcept override { return 1; }
    int tags_per_site(const Lattice&) const noexcept override { return 1; }
    double rate(const Lattice& lat, std::span<const Spin> sigma, Site x, int tag) const noexcept override;
    Site partner(const Lattice&, Site x, int) const noexcept override { return x; }
    void apply(const Lattice& lat, std::span<Spin> sigma, Site x, int tag) const noexcept override;

private:
    SpinFlipParams params_;
    std::array<double, 5> desorption_;  // indexed by occupied-neighbour count
};

struct ExchangeParams {
    double beta = 1.0;
    double coupling = 0.0;  ///< J
    double c_h = 1.0;       ///< hop prefactor
};

/// Particle-conserving nearest-neighbour hops (Kawasaki dynamics). A particle
/// at x moves to the empty neighbour in direction `tag` with rate
/// c_h * exp(-beta * J * n(x)), n(x) the occupied neighbours of x.
class ExchangeModel final : public RateModel {
public:
    explicit ExchangeModel(ExchangeParams params);

    const ExchangeParams& params() const noexcept { return params_; }

    std::string_view name() const noexcept override { return "kawasaki"; }
    int interaction_range() const noexcept override { return 1; }
    int tags_per_site(const Lattice& lat) const noexcept override { return 2 * lat.dimension(); }
    double rate(const Lattice& lat, std::span<const Spin> sigma, Site x, int tag) const noexcept override;
    Site partner(const Lattice& lat, Site x, int tag) const noexcept override;
    void apply(const Lattice& lat, std::span<Spin> sigma, Site x, int tag) const noexcept override;

private:
    ExchangeParams params_;
    std::array<double, 5> hop_;
};

/// Rate of the event (x, tag) on sigma. Throws UsageError for a bad tag or site.
double event_rate(const RateModel& model, const Lattice& lat, std::span<const Spin> sigma, Site x, int tag);

/// Applies a previously generated event in place.
void apply_event(const RateModel& model, const Lattice& lat, std::span<Spin> sigma, const Event& e);

/// Nonzero-rate events rooted at `sites`, in ascending (site, tag) order.
/// If `confine` is given, events whose partner lies outside the mask are dropped.
std::vector<Event> local_events(const RateModel& model, const Lattice& lat, std::span<const Spin> sigma,
                                std::span<const Site> sites,
                                std::span<const std::uint8_t> confine = {});

inline int interaction_range(const RateModel& model) noexcept { return model.interaction_range(); }

}  // namespace fskmc
