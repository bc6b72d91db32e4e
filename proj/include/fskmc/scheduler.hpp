#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fskmc/kmc.hpp"
#include "fskmc/lattice.hpp"
#include "fskmc/models.hpp"
#include "fskmc/rng.hpp"

namespace fskmc {

enum class SchemeKind { lie, strang, random };

/// How a randomized schedule maps factor durations onto time.
/// raw: a factor of duration tau advances the clock by tau and the scheme
///      targets the process generated by L/2.
/// rescaled: factors last 2*dt and each advances physical time by dt, so
///      the scheme targets the process generated by L.
enum class RandomMode { raw, rescaled };

struct Schedule {
    SchemeKind kind = SchemeKind::lie;
    double dt = 1.0;
    double p = 0.5;  ///< P(xi = 1), Random only
    RandomMode mode = RandomMode::rescaled;

    void validate() const;
};

std::string scheme_name(SchemeKind kind, RandomMode mode = RandomMode::rescaled);

struct Factor {
    int group = 1;
    double duration = 0.0;  ///< time the group's sub-generator acts

    friend bool operator==(const Factor&, const Factor&) = default;
};

/// Ordered factors applied between two synchronisations, plus the span of
/// target-process time they cover. Lie and Strang plans cover one window
/// dt; a Random plan holds the paired draws (xi_{2k-1}, xi_{2k}) and covers 2*dt.
struct WindowPlan {
    std::vector<Factor> factors;
    double span = 0.0;

    double total_duration() const noexcept;
};

/// Deterministic for Lie/Strang; Random consumes two uniforms from `rng`.
WindowPlan draw_window_plan(const Schedule& sched, RngStream& rng);

/// Number of windows n = T/dt; throws ConfigError unless n is a nonnegative
/// integer (within 1e-9 relative).
std::size_t window_count(double horizon, double dt);

/// One factor laid out on the target-process clock: it occupies
/// (start, end] and its sub-generator runs for `duration`; scale is the
/// clock span per unit of factor time. Samples inside a plan are placed by
/// group_positions, not by this layout. `group` is 0 for randomized
/// schedules, where the group is drawn when the plan starts.
struct TimelineEntry {
    std::size_t plan = 0;
    std::size_t factor = 0;
    int group = 0;
    double duration = 0.0;
    double start = 0.0;
    double end = 0.0;
    double scale = 1.0;
};

/// Factor layout over [0, T]. A randomized plan that would overrun T keeps
/// only its first factor.
std::vector<TimelineEntry> build_timeline(const Schedule& sched, double horizon);

/// Position of one group's local clock inside a plan: the factor it is in
/// and the time elapsed within that factor.
struct GroupPosition {
    std::size_t factor = 0;
    double sub_time = 0.0;
};

/// Each group keeps its own clock inside a plan occupying [start, end]:
/// clock time t maps linearly onto the total duration of that group's
/// factors, so between synchronisations every cell advances at the same
/// rate, as on a parallel machine. A group with no factor in the plan sits
/// at (0, 0), the plan-start state. Sampling the path at t takes each
/// group's sites at its own position.
std::array<GroupPosition, 2> group_positions(std::span<const Factor> factors, double start, double end, double t);

/// Observes sampled global configurations. `times` ascending in [0, T].
struct PathRecorder {
    std::span<const double> times;
    std::function<void(std::size_t, std::span<const Spin>)> sample;
};

struct FactorInfo {
    std::size_t plan = 0;
    std::size_t factor = 0;
    int group = 1;
    double duration = 0.0;
};

/// Invoked after every factor with the configuration before and after it.
using FactorHook = std::function<void(const FactorInfo&, std::span<const Spin>, std::span<const Spin>)>;

/// Fractional-step KMC driver. Each factor advances every cell of one group
/// independently with its own cell-keyed random stream; a full barrier
/// separates factors. Output depends only on (seed, replica), never on the
/// worker count or on the execution order of cells within a factor.
class FractionalStepRunner {
public:
    FractionalStepRunner(const RateModel& model, const Lattice& lat, const Decomposition& dec, Schedule sched,
                         std::shared_ptr<const Neighborhood> neighborhood = nullptr);

    void set_worker_count(int workers);
    int worker_count() const noexcept { return workers_; }

    /// Execute cells within a factor in an order shuffled by `key` (0 keeps
    /// ascending order).
    void set_execution_order_key(std::uint64_t key) noexcept { order_key_ = key; }
    void set_factor_hook(FactorHook hook) { hook_ = std::move(hook); }

    const Schedule& schedule() const noexcept { return sched_; }

    Configuration run(Configuration sigma, double horizon, std::uint64_t seed, std::uint64_t replica,
                      const PathRecorder* recorder = nullptr);

private:
    void run_factor(std::span<Spin> sigma, const Factor& factor, std::size_t plan, std::size_t factor_index,
                    std::uint64_t seed, std::uint64_t replica, std::span<const double> sub_times,
                    std::span<std::vector<Spin>> frames);

    const RateModel* model_;
    const Lattice* lat_;
    const Decomposition* dec_;
    Schedule sched_;
    int workers_ = 1;
    std::uint64_t order_key_ = 0;
    FactorHook hook_;
    std::vector<SsaKernel> kernels_;
    std::vector<std::vector<std::pair<Site, Site>>> runs_;  // per cell: contiguous [first, last) site ranges
    std::vector<std::vector<Spin>> frames_;                 // reused sample buffers
};

Configuration run_fs_kmc(const RateModel& model, const Lattice& lat, const Decomposition& dec,
                         const Schedule& sched, double horizon, Configuration initial, std::uint64_t seed,
                         std::uint64_t replica, const PathRecorder* recorder = nullptr, int workers = 1);

}  // namespace fskmc
