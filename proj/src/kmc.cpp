#include "fskmc/kmc.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "fskmc/errors.hpp"

namespace fskmc {

SsaKernel::SsaKernel(const RateModel& model, const Lattice& lat, std::span<const Site> sites, bool confine,
                     RateUpdate mode, std::shared_ptr<const Neighborhood> neighborhood)
    : model_(&model),
      lat_(&lat),
      sites_(sites.begin(), sites.end()),
      tags_(model.tags_per_site(lat)),
      mode_(mode),
      neighborhood_(std::move(neighborhood)) {
    std::sort(sites_.begin(), sites_.end());
    sites_.erase(std::unique(sites_.begin(), sites_.end()), sites_.end());
    if (!neighborhood_ || neighborhood_->radius() < model.interaction_range()) {
        neighborhood_ = std::make_shared<Neighborhood>(lat, model.interaction_range());
    }
    local_of_.assign(lat.size(), -1);
    for (std::size_t i = 0; i < sites_.size(); ++i) {
        if (!lat.contains(sites_[i])) throw UsageError("active site outside lattice");
        local_of_[static_cast<std::size_t>(sites_[i])] = static_cast<std::int32_t>(i);
    }
    const std::size_t tags = static_cast<std::size_t>(tags_);
    allowed_.assign(sites_.size() * tags, 1);
    if (confine) {
        for (std::size_t i = 0; i < sites_.size(); ++i) {
            for (int tag = 0; tag < tags_; ++tag) {
                const Site y = model.partner(lat, sites_[i], tag);
                allowed_[i * tags + static_cast<std::size_t>(tag)] = local_of_[static_cast<std::size_t>(y)] >= 0;
            }
        }
    }
    leaves_ = 1;
    while (leaves_ < sites_.size() * tags) leaves_ *= 2;
    tree_.assign(2 * leaves_, 0.0);
}

void SsaKernel::update_site(std::span<const Spin> sigma, std::size_t local) {
    const std::size_t base = local * static_cast<std::size_t>(tags_);
    for (int tag = 0; tag < tags_; ++tag) {
        const std::size_t slot = base + static_cast<std::size_t>(tag);
        tree_[leaves_ + slot] = allowed_[slot] ? model_->rate(*lat_, sigma, sites_[local], tag) : 0.0;
    }
}

void SsaKernel::propagate(std::size_t slot) noexcept {
    for (std::size_t node = (leaves_ + slot) / 2; node >= 1; node /= 2) {
        tree_[node] = tree_[2 * node] + tree_[2 * node + 1];
    }
}

void SsaKernel::update_and_propagate(std::span<const Spin> sigma, std::size_t local) {
    update_site(sigma, local);
    const std::size_t base = local * static_cast<std::size_t>(tags_);
    for (int tag = 0; tag < tags_; ++tag) propagate(base + static_cast<std::size_t>(tag));
}

void SsaKernel::refresh(std::span<const Spin> sigma) {
    for (std::size_t i = 0; i < sites_.size(); ++i) update_site(sigma, i);
    for (std::size_t node = leaves_ - 1; node >= 1; --node) tree_[node] = tree_[2 * node] + tree_[2 * node + 1];
}

std::vector<Event> SsaKernel::events() const {
    std::vector<Event> out;
    for (std::size_t slot = 0; slot < sites_.size() * static_cast<std::size_t>(tags_); ++slot) {
        const double r = tree_[leaves_ + slot];
        if (r <= 0.0) continue;
        const Site x = sites_[slot / static_cast<std::size_t>(tags_)];
        const int tag = static_cast<int>(slot % static_cast<std::size_t>(tags_));
        out.push_back({x, tag, model_->partner(*lat_, x, tag), r});
    }
    return out;
}

Event SsaKernel::fire(std::span<Spin> sigma, RngStream& rng) {
    // descend the sum tree; an empty subtree is never entered, so the
    // leaf reached has a positive rate even if u * lambda rounds up
    double target = rng.uniform() * tree_[1];
    std::size_t node = 1;
    while (node < leaves_) {
        const double left = tree_[2 * node];
        const double right = tree_[2 * node + 1];
        if (right <= 0.0 || (left > 0.0 && target < left)) {
            node = 2 * node;
        } else {
            target -= left;
            node = 2 * node + 1;
        }
    }
    const std::size_t chosen = node - leaves_;

    const std::size_t local = chosen / static_cast<std::size_t>(tags_);
    const int tag = static_cast<int>(chosen % static_cast<std::size_t>(tags_));
    const Site x = sites_[local];
    const Site y = model_->partner(*lat_, x, tag);
    const Event fired{x, tag, y, tree_[node]};
    model_->apply(*lat_, sigma, x, tag);

    if (mode_ == RateUpdate::full_scan) {
        refresh(sigma);
        return fired;
    }
    const std::array<Site, 2> touched{x, y};
    const std::size_t touched_count = (x == y) ? 1 : 2;
    for (std::size_t i = 0; i < touched_count; ++i) {
        const Site changed = touched[i];
        const auto own = local_of_[static_cast<std::size_t>(changed)];
        if (own >= 0) update_and_propagate(sigma, static_cast<std::size_t>(own));
        for (Site z : neighborhood_->of(changed)) {
            const auto idx = local_of_[static_cast<std::size_t>(z)];
            if (idx >= 0) update_and_propagate(sigma, static_cast<std::size_t>(idx));
        }
    }
    return fired;
}

std::optional<Event> SsaKernel::step(std::span<Spin> sigma, RngStream& rng, SimClock& clock, double t_end) {
    if (tree_[1] <= 0.0) {
        clock.t = t_end;
        return std::nullopt;
    }
    const double tau = -std::log(rng.uniform_open_closed()) / tree_[1];
    if (clock.t + tau > t_end) {
        clock.t = t_end;
        return std::nullopt;
    }
    clock.t += tau;
    ++clock.events;
    return fire(sigma, rng);
}

void SsaKernel::run(std::span<Spin> sigma, RngStream& rng, SimClock& clock, double t_end,
                    std::span<const double> sample_times, const SampleCallback& on_sample) {
    if (clock.t > t_end) throw UsageError("run_interval: clock is past the interval end");
    std::size_t k = 0;
    const std::size_t n = on_sample ? sample_times.size() : 0;
    while (tree_[1] > 0.0) {
        const double tau = -std::log(rng.uniform_open_closed()) / tree_[1];
        const double t_next = clock.t + tau;
        if (t_next > t_end) break;
        while (k < n && sample_times[k] < t_next) on_sample(k++);
        fire(sigma, rng);
        clock.t = t_next;
        ++clock.events;
    }
    while (k < n) on_sample(k++);
    clock.t = t_end;
}

double total_rate(const RateModel& model, const Lattice& lat, std::span<const Spin> sigma,
                  std::span<const Site> sites) {
    std::vector<Site> ordered(sites.begin(), sites.end());
    std::sort(ordered.begin(), ordered.end());
    double sum = 0.0;
    const int tags = model.tags_per_site(lat);
    for (Site x : ordered) {
        for (int tag = 0; tag < tags; ++tag) sum += model.rate(lat, sigma, x, tag);
    }
    return sum;
}

std::optional<Event> ssa_step(const RateModel& model, const Lattice& lat, std::span<Spin> sigma,
                              std::span<const Site> sites, RngStream& rng, SimClock& clock, double t_end) {
    if (clock.t > t_end) throw UsageError("ssa_step: clock is past the window end");
    SsaKernel kernel(model, lat, sites, false, RateUpdate::full_scan);
    kernel.refresh(sigma);
    return kernel.step(sigma, rng, clock, t_end);
}

void run_interval(const RateModel& model, const Lattice& lat, std::span<Spin> sigma, std::span<const Site> sites,
                  RngStream& rng, SimClock& clock, double t1, std::span<const double> sample_times,
                  const SampleCallback& on_sample) {
    SsaKernel kernel(model, lat, sites);
    kernel.refresh(sigma);
    kernel.run(sigma, rng, clock, t1, sample_times, on_sample);
}

}  // namespace fskmc
