#include "fskmc/harness.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <memory>
#include <mutex>

#include "fskmc/errors.hpp"
#include "fskmc/kmc.hpp"
#include "fskmc/rng.hpp"

namespace fskmc {

namespace {

// Replicas are pooled in fixed blocks merged in block order, so the floating
// point reduction is the same for any worker count.
constexpr std::size_t kBlock = 64;

struct Moments {
    std::vector<double> mean;
    std::vector<double> m2;
    std::size_t n = 0;

    explicit Moments(std::size_t width) : mean(width, 0.0), m2(width, 0.0) {}

    void add(std::span<const double> row) {
        ++n;
        const double inv = 1.0 / static_cast<double>(n);
        for (std::size_t i = 0; i < row.size(); ++i) {
            const double d = row[i] - mean[i];
            mean[i] += d * inv;
            m2[i] += d * (row[i] - mean[i]);
        }
    }

    void merge(const Moments& other) {
        if (other.n == 0) return;
        if (n == 0) {
            *this = other;
            return;
        }
        const double na = static_cast<double>(n);
        const double nb = static_cast<double>(other.n);
        const double nt = na + nb;
        for (std::size_t i = 0; i < mean.size(); ++i) {
            const double d = other.mean[i] - mean[i];
            mean[i] += d * nb / nt;
            m2[i] += other.m2[i] + d * d * na * nb / nt;
        }
        n += other.n;
    }
};

double grid_tolerance(double horizon) { return 1e-10 * std::max(1.0, horizon); }

}  // namespace

const ObservableSeries& TrajectoryStats::at(const Observable& obs) const {
    for (const auto& s : series) {
        if (s.observable == obs) return s;
    }
    throw UsageError("observable '" + obs.name() + "' was not recorded");
}

std::vector<double> grid_times(double horizon, int points) {
    if (points < 2) throw ConfigError("run.grid: must be at least 2");
    std::vector<double> t(static_cast<std::size_t>(points));
    const double g = static_cast<double>(points - 1);
    for (int j = 0; j < points; ++j) t[static_cast<std::size_t>(j)] = horizon * (static_cast<double>(j) / g);
    t.back() = horizon;
    return t;
}

std::uint64_t reference_seed(std::uint64_t seed) noexcept { return mix_key({seed, 0x7265666572656e63ULL}); }

TrajectoryStats run_ensemble(const RunConfig& cfg, Engine engine) {
    return run_ensemble(cfg, engine, cfg.samples, cfg.seed);
}

TrajectoryStats run_ensemble(const RunConfig& base, Engine engine, std::size_t samples, std::uint64_t seed) {
    RunConfig cfg = base;
    cfg.engine = engine;
    cfg.samples = samples;
    cfg.seed = seed;
    cfg.validate();

    const Lattice lat = make_lattice(cfg);
    const ModelPtr model = make_model(cfg.model);
    const auto neighborhood = std::make_shared<const Neighborhood>(lat, model->interaction_range());
    std::unique_ptr<Decomposition> dec;
    if (engine == Engine::fs_kmc) dec = std::make_unique<Decomposition>(decompose(lat, cfg.q, model->interaction_range()));

    const std::vector<double> times = grid_times(cfg.horizon, cfg.grid);
    const std::size_t G = times.size();
    const std::size_t nobs = cfg.observables.size();
    const std::size_t width = G * nobs;
    const std::size_t blocks = (samples + kBlock - 1) / kBlock;
    // blocks run a chunk at a time so memory does not grow with the sample count
    const std::size_t chunk = 64 * static_cast<std::size_t>(std::max(1, cfg.workers));
    std::vector<Moments> partial(std::min(blocks, chunk), Moments(width));

    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto run_block = [&](std::size_t b, Moments& acc) {
        std::vector<double> row(width);
        auto record = [&](std::size_t k, std::span<const Spin> sigma) {
            for (std::size_t o = 0; o < nobs; ++o) row[o * G + k] = cfg.observables[o](lat, sigma);
        };
        std::unique_ptr<FractionalStepRunner> runner;
        std::unique_ptr<SsaKernel> kernel;
        std::vector<Site> all_sites;
        if (engine == Engine::fs_kmc) {
            runner = std::make_unique<FractionalStepRunner>(*model, lat, *dec, cfg.schedule, neighborhood);
        } else {
            all_sites.resize(lat.size());
            for (std::size_t i = 0; i < all_sites.size(); ++i) all_sites[i] = static_cast<Site>(i);
            kernel = std::make_unique<SsaKernel>(*model, lat, all_sites, false, RateUpdate::incremental, neighborhood);
        }
        const std::size_t first = b * kBlock;
        const std::size_t last = std::min(samples, first + kBlock);
        const double tol = grid_tolerance(cfg.horizon);
        for (std::size_t r = first; r < last; ++r) {
            Configuration sigma = make_initial(cfg, lat, r);
            if (runner) {
                const PathRecorder recorder{times, record};
                runner->run(std::move(sigma), cfg.horizon, seed, r, &recorder);
            } else {
                std::size_t k = 0;
                while (k < G && times[k] <= tol) record(k++, sigma.spins());
                const std::span<const double> rest(times.data() + k, G - k);
                kernel->refresh(sigma.spins());
                auto rng = RngStream::keyed(seed, r, StreamRole::ssa);
                SimClock clock;
                kernel->run(sigma.spins(), rng, clock, cfg.horizon, rest,
                            [&](std::size_t j) { record(k + j, sigma.spins()); });
            }
            acc.add(row);
        }
    };

    Moments total(width);
    for (std::size_t base = 0; base < blocks; base += chunk) {
        const auto count = static_cast<std::ptrdiff_t>(std::min(chunk, blocks - base));
        for (auto& m : partial) m = Moments(width);
#pragma omp parallel for num_threads(cfg.workers) schedule(dynamic, 1) if (cfg.workers > 1)
        for (std::ptrdiff_t i = 0; i < count; ++i) {
            try {
                run_block(base + static_cast<std::size_t>(i), partial[static_cast<std::size_t>(i)]);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
        if (failure) std::rethrow_exception(failure);
        for (std::ptrdiff_t i = 0; i < count; ++i) total.merge(partial[static_cast<std::size_t>(i)]);
    }

    TrajectoryStats out;
    out.scheme = cfg.scheme_label();
    out.dt = engine == Engine::fs_kmc ? cfg.schedule.dt : 0.0;
    out.q = engine == Engine::fs_kmc ? cfg.q : 0;
    out.sites = lat.size();
    out.samples = samples;
    out.times = times;
    for (std::size_t o = 0; o < nobs; ++o) {
        ObservableSeries s{cfg.observables[o], std::vector<double>(G), std::vector<double>(G, 0.0)};
        for (std::size_t k = 0; k < G; ++k) {
            s.mean[k] = total.mean[o * G + k];
            if (samples > 1) {
                const double var = std::max(0.0, total.m2[o * G + k] / static_cast<double>(samples - 1));
                s.stderr_[k] = std::sqrt(var / static_cast<double>(samples));
            }
        }
        out.series.push_back(std::move(s));
    }
    return out;
}

WeakError weak_error(const TrajectoryStats& ref, const TrajectoryStats& test, const Observable& obs) {
    if (ref.times.size() != test.times.size() || ref.times.size() < 2) {
        throw UsageError("weak_error: grids differ in size");
    }
    const double tol = grid_tolerance(ref.times.back());
    for (std::size_t k = 0; k < ref.times.size(); ++k) {
        if (std::fabs(ref.times[k] - test.times[k]) > tol) throw UsageError("weak_error: grids differ");
    }
    const auto& a = ref.at(obs);
    const auto& b = test.at(obs);
    WeakError out;
    for (std::size_t k = 0; k + 1 < ref.times.size(); ++k) {
        const double w = 0.5 * (ref.times[k + 1] - ref.times[k]);
        for (std::size_t j : {k, k + 1}) {
            out.value += w * std::fabs(a.mean[j] - b.mean[j]);
            out.stderr_ += w * std::hypot(a.stderr_[j], b.stderr_[j]);
        }
    }
    return out;
}

LineFit fit_loglog(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2) throw UsageError("fit_loglog: need two or more points");
    double sx = 0.0, sy = 0.0;
    const double n = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) throw UsageError("fit_loglog: values must be positive");
        sx += std::log(xs[i]);
        sy += std::log(ys[i]);
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = std::log(xs[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(ys[i]) - my);
    }
    if (sxx == 0.0) throw UsageError("fit_loglog: x values must not all coincide");
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

namespace {

void finish_fit(SweepResult& result) {
    std::vector<double> xs, ys;
    for (const auto& p : result.points) {
        if (p.weak_error > 0.0) {
            xs.push_back(p.value);
            ys.push_back(p.weak_error);
        }
    }
    if (xs.size() >= 2) {
        result.fit = fit_loglog(xs, ys);
    } else {
        result.fit.slope = result.fit.intercept = std::numeric_limits<double>::quiet_NaN();
    }
}

template <class T>
void require_monotone(std::span<const T> values) {
    bool up = true, down = true;
    for (std::size_t i = 1; i < values.size(); ++i) {
        up = up && values[i] > values[i - 1];
        down = down && values[i] < values[i - 1];
    }
    if (!up && !down) throw ConfigError("sweep values must be strictly monotone");
}

}  // namespace

SweepResult sweep_dt(const RunConfig& cfg, std::span<const double> dt_values, const TrajectoryStats& reference,
                     const Observable& obs) {
    require_monotone(dt_values);
    SweepResult result;
    result.parameter = "dt";
    result.scheme = scheme_name(cfg.schedule.kind, cfg.schedule.mode);
    result.observable = obs;
    for (double dt : dt_values) {
        RunConfig point = cfg;
        point.schedule.dt = dt;
        point.engine = Engine::fs_kmc;
        try {
            point.validate();
        } catch (const ConfigError& e) {
            result.skipped.push_back("dt=" + std::to_string(dt) + ": " + e.what());
            continue;
        }
        const auto stats = run_ensemble(point, Engine::fs_kmc);
        const auto err = weak_error(reference, stats, obs);
        result.points.push_back({dt, err.value, err.stderr_});
    }
    finish_fit(result);
    return result;
}

SweepResult sweep_q(const RunConfig& cfg, std::span<const int> q_values, const TrajectoryStats& reference,
                    const Observable& obs) {
    require_monotone(q_values);
    SweepResult result;
    result.parameter = "q";
    result.scheme = scheme_name(cfg.schedule.kind, cfg.schedule.mode);
    result.observable = obs;
    const Lattice lat = make_lattice(cfg);
    const int range = make_model(cfg.model)->interaction_range();
    for (int q : q_values) {
        RunConfig point = cfg;
        point.q = q;
        point.engine = Engine::fs_kmc;
        try {
            point.validate();
            (void)decompose(lat, q, range);
        } catch (const ConfigError& e) {
            result.skipped.push_back("q=" + std::to_string(q) + ": " + e.what());
            continue;
        }
        const auto stats = run_ensemble(point, Engine::fs_kmc);
        const auto err = weak_error(reference, stats, obs);
        result.points.push_back({static_cast<double>(q), err.value, err.stderr_});
    }
    finish_fit(result);
    return result;
}

}  // namespace fskmc
