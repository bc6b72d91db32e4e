#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fskmc/config.hpp"

namespace fskmc {

struct ObservableSeries {
    Observable observable;
    std::vector<double> mean;
    std::vector<double> stderr_;  ///< sample std / sqrt(K); 0 when K = 1
};

/// Grid-sampled ensemble statistics.
struct TrajectoryStats {
    std::string scheme;  ///< "ssa", "lie", "strang", "random", "random-raw"
    double dt = 0.0;     ///< 0 for SSA
    int q = 0;           ///< 0 for SSA
    std::size_t sites = 0;
    std::size_t samples = 0;
    std::vector<double> times;
    std::vector<ObservableSeries> series;

    /// Throws UsageError if `obs` was not recorded.
    const ObservableSeries& at(const Observable& obs) const;
};

/// G uniformly spaced times from 0 to T inclusive.
std::vector<double> grid_times(double horizon, int points);

/// Replica r draws every random number from streams keyed by (seed, r), so
/// the result depends only on (cfg, seed, K), never on cfg.workers.
TrajectoryStats run_ensemble(const RunConfig& cfg, Engine engine, std::size_t samples, std::uint64_t seed);
/// Uses cfg.samples and cfg.seed.
TrajectoryStats run_ensemble(const RunConfig& cfg, Engine engine);

/// Seed used for reference ensembles so they are independent of the test
/// ensemble drawn with the same base seed.
std::uint64_t reference_seed(std::uint64_t seed) noexcept;

struct WeakError {
    double value = 0.0;
    double stderr_ = 0.0;
};

/// Trapezoidal integral of |mean_ref - mean_test| over the grid. The SE is
/// the same quadrature applied to sqrt(se_ref^2 + se_test^2) pointwise, an
/// upper bound on the delta-method SE whatever the correlation across times.
WeakError weak_error(const TrajectoryStats& ref, const TrajectoryStats& test, const Observable& obs);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Least-squares fit of log(y) against log(x). Needs two or more points.
LineFit fit_loglog(std::span<const double> xs, std::span<const double> ys);

struct SweepPoint {
    double value = 0.0;
    double weak_error = 0.0;
    double stderr_ = 0.0;
};

struct SweepResult {
    std::string parameter;  ///< "dt" or "q"
    std::string scheme;
    Observable observable = Observable::coverage();
    std::vector<SweepPoint> points;
    LineFit fit;             ///< over points with positive error; NaN if fewer than two
    std::vector<std::string> skipped;  ///< one message per rejected sweep value
};

SweepResult sweep_dt(const RunConfig& cfg, std::span<const double> dt_values, const TrajectoryStats& reference,
                     const Observable& obs);
SweepResult sweep_q(const RunConfig& cfg, std::span<const int> q_values, const TrajectoryStats& reference,
                    const Observable& obs);

}  // namespace fskmc
