#include "fskmc/models.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "fskmc/errors.hpp"

namespace fskmc {

namespace {

int occupied_neighbours(const Lattice& lat, std::span<const Spin> sigma, Site x) noexcept {
    int n = 0;
    for (Site y : lat.nearest(x)) n += sigma[static_cast<std::size_t>(y)];
    return n;
}

void require_finite_nonneg(double v, const char* what) {
    if (!std::isfinite(v) || v < 0.0) throw ConfigError(std::string(what) + " must be finite and >= 0");
}

}  // namespace

SpinFlipModel::SpinFlipModel(SpinFlipParams params) : params_(params) {
    require_finite_nonneg(params_.beta, "model.beta");
    require_finite_nonneg(params_.c_a, "model.c_a");
    require_finite_nonneg(params_.c_d, "model.c_d");
    if (!std::isfinite(params_.coupling) || !std::isfinite(params_.field)) {
        throw ConfigError("model.J and model.field must be finite");
    }
    for (std::size_t n = 0; n < desorption_.size(); ++n) {
        const double u = params_.coupling * static_cast<double>(n) + params_.field;
        desorption_[n] = params_.c_a * std::exp(-params_.beta * u);
    }
}

double SpinFlipModel::rate(const Lattice& lat, std::span<const Spin> sigma, Site x, int) const noexcept {
    if (sigma[static_cast<std::size_t>(x)] == 0) return params_.c_d;
    return desorption_[static_cast<std::size_t>(occupied_neighbours(lat, sigma, x))];
}

void SpinFlipModel::apply(const Lattice&, std::span<Spin> sigma, Site x, int) const noexcept {
    auto& s = sigma[static_cast<std::size_t>(x)];
    s = static_cast<Spin>(1 - s);
}

ExchangeModel::ExchangeModel(ExchangeParams params) : params_(params) {
    require_finite_nonneg(params_.beta, "model.beta");
    require_finite_nonneg(params_.c_h, "model.c_h");
    if (!std::isfinite(params_.coupling)) throw ConfigError("model.J must be finite");
    for (std::size_t n = 0; n < hop_.size(); ++n) {
        hop_[n] = params_.c_h * std::exp(-params_.beta * params_.coupling * static_cast<double>(n));
    }
}

double ExchangeModel::rate(const Lattice& lat, std::span<const Spin> sigma, Site x, int tag) const noexcept {
    if (sigma[static_cast<std::size_t>(x)] == 0) return 0.0;
    const Site y = lat.nearest(x)[static_cast<std::size_t>(tag)];
    if (y == x || sigma[static_cast<std::size_t>(y)] != 0) return 0.0;
    return hop_[static_cast<std::size_t>(occupied_neighbours(lat, sigma, x))];
}

Site ExchangeModel::partner(const Lattice& lat, Site x, int tag) const noexcept {
    return lat.nearest(x)[static_cast<std::size_t>(tag)];
}

void ExchangeModel::apply(const Lattice& lat, std::span<Spin> sigma, Site x, int tag) const noexcept {
    const Site y = partner(lat, x, tag);
    std::swap(sigma[static_cast<std::size_t>(x)], sigma[static_cast<std::size_t>(y)]);
}

double event_rate(const RateModel& model, const Lattice& lat, std::span<const Spin> sigma, Site x, int tag) {
    if (!lat.contains(x)) throw UsageError("site " + std::to_string(x) + " outside lattice");
    if (tag < 0 || tag >= model.tags_per_site(lat)) {
        throw UsageError("update tag " + std::to_string(tag) + " invalid for model " + std::string(model.name()));
    }
    return model.rate(lat, sigma, x, tag);
}

void apply_event(const RateModel& model, const Lattice& lat, std::span<Spin> sigma, const Event& e) {
    model.apply(lat, sigma, e.site, e.tag);
}

std::vector<Event> local_events(const RateModel& model, const Lattice& lat, std::span<const Spin> sigma,
                                std::span<const Site> sites, std::span<const std::uint8_t> confine) {
    std::vector<Site> ordered(sites.begin(), sites.end());
    std::sort(ordered.begin(), ordered.end());
    const int tags = model.tags_per_site(lat);
    std::vector<Event> out;
    for (Site x : ordered) {
        for (int tag = 0; tag < tags; ++tag) {
            const Site y = model.partner(lat, x, tag);
            if (!confine.empty() && !confine[static_cast<std::size_t>(y)]) continue;
            const double r = model.rate(lat, sigma, x, tag);
            if (r > 0.0) out.push_back({x, tag, y, r});
        }
    }
    return out;
}

}  // namespace fskmc
