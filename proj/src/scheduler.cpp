#include "fskmc/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <omp.h>

#include "fskmc/errors.hpp"

namespace fskmc {

namespace {

double time_tolerance(double horizon) noexcept { return 1e-10 * std::max(1.0, std::abs(horizon)); }

}  // namespace

void Schedule::validate() const {
    std::vector<std::string> issues;
    if (!(dt > 0.0) || !std::isfinite(dt)) issues.emplace_back("scheme.dt must be finite and > 0");
    if (!(p >= 0.0 && p <= 1.0)) issues.emplace_back("scheme.p must lie in [0, 1]");
    if (!issues.empty()) throw ConfigError(std::move(issues));
}

std::string scheme_name(SchemeKind kind, RandomMode mode) {
    switch (kind) {
        case SchemeKind::lie: return "lie";
        case SchemeKind::strang: return "strang";
        case SchemeKind::random: return mode == RandomMode::raw ? "random-raw" : "random";
    }
    return {};
}

double WindowPlan::total_duration() const noexcept {
    double total = 0.0;
    for (const auto& f : factors) total += f.duration;
    return total;
}

WindowPlan draw_window_plan(const Schedule& sched, RngStream& rng) {
    const double dt = sched.dt;
    switch (sched.kind) {
        case SchemeKind::lie: return {{{1, dt}, {2, dt}}, dt};
        case SchemeKind::strang: return {{{1, dt / 2}, {2, dt}, {1, dt / 2}}, dt};
        case SchemeKind::random: {
            const double duration = sched.mode == RandomMode::rescaled ? 2 * dt : dt;
            WindowPlan plan;
            for (int i = 0; i < 2; ++i) {
                const int group = rng.uniform() < sched.p ? 1 : 2;
                plan.factors.push_back({group, duration});
            }
            plan.span = 2 * dt;
            return plan;
        }
    }
    return {};
}

std::size_t window_count(double horizon, double dt) {
    if (!(horizon >= 0.0) || !(dt > 0.0)) throw ConfigError("horizon must be >= 0 and dt > 0");
    const double ratio = horizon / dt;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
        throw ConfigError("horizon T=" + std::to_string(horizon) + " is not an integer multiple of dt=" +
                          std::to_string(dt));
    }
    return static_cast<std::size_t>(rounded);
}

std::vector<TimelineEntry> build_timeline(const Schedule& sched, double horizon) {
    sched.validate();
    const std::size_t n_windows = window_count(horizon, sched.dt);
    RngStream unused;  // group draws are irrelevant to the layout
    std::vector<TimelineEntry> out;
    std::size_t done = 0;
    for (std::size_t plan_index = 0; done < n_windows; ++plan_index) {
        WindowPlan plan = draw_window_plan(sched, unused);
        std::size_t covers = sched.kind == SchemeKind::random ? 2 : 1;
        if (done + covers > n_windows) {
            plan.factors.resize(1);
            covers = 1;
        }
        const double start = static_cast<double>(done) * sched.dt;
        const double end = done + covers == n_windows ? horizon : static_cast<double>(done + covers) * sched.dt;
        const double scale = (end - start) / plan.total_duration();
        double elapsed = 0.0;
        for (std::size_t f = 0; f < plan.factors.size(); ++f) {
            TimelineEntry e;
            e.plan = plan_index;
            e.factor = f;
            e.group = sched.kind == SchemeKind::random ? 0 : plan.factors[f].group;
            e.duration = plan.factors[f].duration;
            e.start = start + scale * elapsed;
            elapsed += e.duration;
            e.end = f + 1 == plan.factors.size() ? end : start + scale * elapsed;
            e.scale = scale;
            out.push_back(e);
        }
        done += covers;
    }
    return out;
}

std::array<GroupPosition, 2> group_positions(std::span<const Factor> factors, double start, double end, double t) {
    std::array<GroupPosition, 2> out{};
    const double frac = end > start ? std::clamp((t - start) / (end - start), 0.0, 1.0) : 1.0;
    for (int g = 1; g <= 2; ++g) {
        double total = 0.0;
        for (const auto& f : factors)
            if (f.group == g) total += f.duration;
        if (total <= 0.0) continue;  // frozen all plan: plan-start state
        const double tau = frac * total;
        double elapsed = 0.0;
        for (std::size_t i = 0; i < factors.size(); ++i) {
            if (factors[i].group != g) continue;
            out[g - 1] = {i, std::clamp(tau - elapsed, 0.0, factors[i].duration)};
            if (tau <= elapsed + factors[i].duration) break;
            elapsed += factors[i].duration;
        }
    }
    return out;
}

FractionalStepRunner::FractionalStepRunner(const RateModel& model, const Lattice& lat, const Decomposition& dec,
                                           Schedule sched, std::shared_ptr<const Neighborhood> neighborhood)
    : model_(&model), lat_(&lat), dec_(&dec), sched_(sched) {
    sched_.validate();
    if (dec.range() < model.interaction_range()) {
        throw ConfigError("decomposition range is smaller than the model interaction range");
    }
    if (!neighborhood || neighborhood->radius() < model.interaction_range()) {
        neighborhood = std::make_shared<Neighborhood>(lat, model.interaction_range());
    }
    kernels_.reserve(dec.cells().size());
    for (const auto& cell : dec.cells()) {
        kernels_.emplace_back(model, lat, cell.sites, /*confine=*/true, RateUpdate::incremental, neighborhood);
        auto& runs = runs_.emplace_back();
        for (Site x : cell.sites) {
            if (!runs.empty() && runs.back().second == x) ++runs.back().second;
            else runs.emplace_back(x, x + 1);
        }
    }
}

void FractionalStepRunner::set_worker_count(int workers) {
    if (workers < 1) throw ConfigError("worker count must be >= 1");
    workers_ = workers;
}

void FractionalStepRunner::run_factor(std::span<Spin> sigma, const Factor& factor, std::size_t plan,
                                      std::size_t factor_index, std::uint64_t seed, std::uint64_t replica,
                                      std::span<const double> sub_times, std::span<std::vector<Spin>> frames) {
    std::vector<int> order = dec_->group(factor.group);
    if (order_key_ != 0) {
        RngStream shuffle_rng(order_key_ ^ mix_key({plan, factor_index}));
        std::shuffle(order.begin(), order.end(), shuffle_rng);
    }

    // cells write disjoint sites, so frames can be filled concurrently
    auto advance_cell = [&](std::size_t pos) {
        const int m = order[pos];
        const auto& runs = runs_[static_cast<std::size_t>(m)];
        auto& kernel = kernels_[static_cast<std::size_t>(m)];
        kernel.refresh(sigma);
        auto rng = RngStream::keyed(seed, replica, StreamRole::cell, static_cast<std::uint64_t>(m), plan,
                                    factor_index);
        SimClock clock;
        kernel.run(sigma, rng, clock, factor.duration, sub_times, [&](std::size_t k) {
            Spin* frame = frames[k].data();
            for (const auto& [first, last] : runs) std::copy(sigma.data() + first, sigma.data() + last, frame + first);
        });
    };

    const auto cells = static_cast<std::ptrdiff_t>(order.size());
    if (workers_ > 1 && cells > 1) {
#pragma omp parallel for num_threads(workers_) schedule(dynamic, 1)
        for (std::ptrdiff_t pos = 0; pos < cells; ++pos) advance_cell(static_cast<std::size_t>(pos));
    } else {
        for (std::ptrdiff_t pos = 0; pos < cells; ++pos) advance_cell(static_cast<std::size_t>(pos));
    }
}

Configuration FractionalStepRunner::run(Configuration sigma, double horizon, std::uint64_t seed,
                                        std::uint64_t replica, const PathRecorder* recorder) {
    if (sigma.size() != lat_->size()) throw UsageError("configuration size does not match lattice");
    const auto timeline = build_timeline(sched_, horizon);
    const double tol = time_tolerance(horizon);
    const std::span<const double> times = recorder ? recorder->times : std::span<const double>{};

    std::size_t next = 0;
    while (next < times.size() && times[next] <= tol) recorder->sample(next++, sigma.spins());

    auto schedule_rng = RngStream::keyed(seed, replica, StreamRole::schedule);
    std::vector<Factor> factors;
    std::vector<std::array<GroupPosition, 2>> positions;
    std::vector<double> sub_times;
    std::vector<Spin> before;

    for (std::size_t e = 0; e < timeline.size();) {
        std::size_t e_end = e;
        while (e_end < timeline.size() && timeline[e_end].plan == timeline[e].plan) ++e_end;
        const std::size_t plan_index = timeline[e].plan;
        const WindowPlan plan = draw_window_plan(sched_, schedule_rng);
        factors.clear();
        for (std::size_t i = e; i < e_end; ++i) factors.push_back({plan.factors[i - e].group, timeline[i].duration});
        const double start = timeline[e].start;
        const double end = timeline[e_end - 1].end;

        // frames start as the plan-start state; a group frozen for the whole plan keeps it
        const std::size_t first = next;
        positions.clear();
        while (next < times.size() && times[next] <= end + tol) {
            positions.push_back(group_positions(factors, start, end, times[next]));
            ++next;
        }
        const std::size_t count = next - first;
        if (frames_.size() < count) frames_.resize(count);
        for (std::size_t j = 0; j < count; ++j) frames_[j].assign(sigma.spins().begin(), sigma.spins().end());

        for (std::size_t i = 0; i < factors.size(); ++i) {
            const int g = factors[i].group;
            // samples whose group-g clock falls in this factor are contiguous
            std::size_t lo = 0;
            while (lo < positions.size() && positions[lo][g - 1].factor != i) ++lo;
            std::size_t hi = lo;
            sub_times.clear();
            while (hi < positions.size() && positions[hi][g - 1].factor == i) sub_times.push_back(positions[hi++][g - 1].sub_time);
            if (hook_) before.assign(sigma.spins().begin(), sigma.spins().end());
            run_factor(sigma.spins(), factors[i], plan_index, i, seed, replica, sub_times,
                       std::span<std::vector<Spin>>(frames_.data() + lo, hi - lo));
            if (hook_) hook_(FactorInfo{plan_index, i, g, factors[i].duration}, before, sigma.spins());
        }
        for (std::size_t j = 0; j < count; ++j) recorder->sample(first + j, frames_[j]);
        e = e_end;
    }
    while (next < times.size()) recorder->sample(next++, sigma.spins());
    return sigma;
}

Configuration run_fs_kmc(const RateModel& model, const Lattice& lat, const Decomposition& dec,
                         const Schedule& sched, double horizon, Configuration initial, std::uint64_t seed,
                         std::uint64_t replica, const PathRecorder* recorder, int workers) {
    FractionalStepRunner runner(model, lat, dec, sched);
    runner.set_worker_count(workers);
    return runner.run(std::move(initial), horizon, seed, replica, recorder);
}

}  // namespace fskmc
