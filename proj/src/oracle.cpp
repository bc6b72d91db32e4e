#include "fskmc/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "fskmc/errors.hpp"

namespace fskmc::oracle {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double norm1(const Eigen::MatrixXd& m) { return m.cwiseAbs().colwise().sum().maxCoeff(); }

template <typename Admissible>
DenseGenerator assemble(const RateModel& model, const Lattice& lat, std::span<const Site> sites,
                        Admissible&& admissible) {
    StateCodec codec(lat.size(), model.max_spin());
    const auto dim = static_cast<Eigen::Index>(codec.dimension());
    DenseGenerator gen{Eigen::MatrixXd::Zero(dim, dim), codec};
    const int tags = model.tags_per_site(lat);
    std::vector<Spin> sigma(lat.size());
    std::vector<Spin> moved(lat.size());
    for (std::size_t j = 0; j < codec.dimension(); ++j) {
        codec.decode(j, sigma);
        for (Site x : sites) {
            for (int tag = 0; tag < tags; ++tag) {
                if (!admissible(x, model.partner(lat, x, tag))) continue;
                const double r = model.rate(lat, sigma, x, tag);
                if (r <= 0.0) continue;
                moved = sigma;
                model.apply(lat, moved, x, tag);
                const auto i = static_cast<Eigen::Index>(codec.encode(moved));
                const auto jj = static_cast<Eigen::Index>(j);
                gen.matrix(i, jj) += r;
                gen.matrix(jj, jj) -= r;
            }
        }
    }
    return gen;
}

}  // namespace

StateCodec::StateCodec(std::size_t sites, Spin max_spin)
    : sites_(sites), base_(static_cast<std::size_t>(max_spin) + 1), dimension_(1) {
    for (std::size_t i = 0; i < sites_; ++i) {
        if (dimension_ > kMaxStates / base_) {
            throw ResourceError("oracle state space exceeds " + std::to_string(kMaxStates) + " states");
        }
        dimension_ *= base_;
    }
}

std::size_t StateCodec::encode(std::span<const Spin> sigma) const noexcept {
    std::size_t state = 0;
    for (std::size_t i = sites_; i-- > 0;) state = state * base_ + sigma[i];
    return state;
}

void StateCodec::decode(std::size_t state, std::span<Spin> out) const noexcept {
    for (std::size_t i = 0; i < sites_; ++i) {
        out[i] = static_cast<Spin>(state % base_);
        state /= base_;
    }
}

Configuration StateCodec::decode(std::size_t state) const {
    std::vector<Spin> spins(sites_);
    decode(state, spins);
    return Configuration(std::move(spins), static_cast<Spin>(base_ - 1));
}

DenseGenerator build_generator(const RateModel& model, const Lattice& lat, std::span<const Site> sites) {
    return assemble(model, lat, sites, [](Site, Site) { return true; });
}

DenseGenerator build_group_generator(const RateModel& model, const Lattice& lat, const Decomposition& dec,
                                     int group) {
    const auto sites = dec.group_sites(group);
    return assemble(model, lat, sites, [&](Site x, Site y) { return dec.cell_of(x) == dec.cell_of(y); });
}

Eigen::MatrixXd expm(const Eigen::MatrixXd& q, double t) {
    if (t < 0.0) throw UsageError("expm: negative time");
    const auto n = q.rows();
    Eigen::MatrixXd a = t * q;
    const double norm = norm1(a);
    int squarings = 0;
    if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    a /= std::ldexp(1.0, squarings);

    Eigen::MatrixXd result = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
    for (int k = 1; k <= 60; ++k) {
        term = (term * a) / static_cast<double>(k);
        result += term;
        if (norm1(term) <= kEps * norm1(result)) break;
    }
    for (int i = 0; i < squarings; ++i) result = result * result;
    return result;
}

Eigen::VectorXd expm_apply(const Eigen::MatrixXd& q, const Eigen::VectorXd& v, double t) {
    if (t < 0.0) throw UsageError("expm_apply: negative time");
    if (t == 0.0 || v.size() == 0) return v;
    const double norm = t * norm1(q);
    const double steps = std::max(1.0, std::ceil(norm));
    const double h = t / steps;
    Eigen::VectorXd x = v;
    Eigen::VectorXd term(v.size());
    for (long s = 0; s < static_cast<long>(steps); ++s) {
        term = x;
        Eigen::VectorXd sum = x;
        for (int k = 1; k <= 60; ++k) {
            term = (h / static_cast<double>(k)) * (q * term);
            sum += term;
            if (term.lpNorm<1>() <= kEps * sum.lpNorm<1>()) break;
        }
        x = std::move(sum);
    }
    return x;
}

Eigen::VectorXd observable_vector(const StateCodec& codec, const Lattice& lat, const Observable& f) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(codec.dimension()));
    std::vector<Spin> sigma(codec.sites());
    for (std::size_t s = 0; s < codec.dimension(); ++s) {
        codec.decode(s, sigma);
        out(static_cast<Eigen::Index>(s)) = f(lat, sigma);
    }
    return out;
}

Eigen::VectorXd point_mass(const StateCodec& codec, const Configuration& zeta) {
    if (zeta.size() != codec.sites()) throw UsageError("initial configuration size mismatch");
    Eigen::VectorXd p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(codec.dimension()));
    p(static_cast<Eigen::Index>(codec.encode(zeta.spins()))) = 1.0;
    return p;
}

std::vector<double> exact_curve(const RateModel& model, const Lattice& lat, const Observable& f,
                                std::span<const double> times, const Configuration& zeta) {
    std::vector<Site> all(lat.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<Site>(i);
    const auto gen = build_generator(model, lat, all);
    const auto fv = observable_vector(gen.codec, lat, f);
    Eigen::VectorXd p = point_mass(gen.codec, zeta);
    std::vector<double> out;
    double t_prev = 0.0;
    for (double t : times) {
        if (t < t_prev) throw UsageError("exact_curve: times must be ascending and >= 0");
        p = expm_apply(gen.matrix, p, t - t_prev);
        t_prev = t;
        out.push_back(fv.dot(p));
    }
    return out;
}

double exact_expectation(const RateModel& model, const Lattice& lat, const Observable& f, double t,
                         const Configuration& zeta) {
    const double times[] = {t};
    return exact_curve(model, lat, f, times, zeta).front();
}

namespace {

// Mean transition operator of one factor, applied to p for sub-time tau.
Eigen::VectorXd apply_factor(const DenseGenerator& l1, const DenseGenerator& l2, const Schedule& sched, int group,
                             const Eigen::VectorXd& p, double tau) {
    if (sched.kind != SchemeKind::random) return expm_apply(group == 1 ? l1.matrix : l2.matrix, p, tau);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(p.size());
    if (sched.p > 0.0) out += sched.p * expm_apply(l1.matrix, p, tau);
    if (sched.p < 1.0) out += (1.0 - sched.p) * expm_apply(l2.matrix, p, tau);
    return out;
}

}  // namespace

double splitting_expectation(const DenseGenerator& l1, const DenseGenerator& l2, const Schedule& sched,
                             std::size_t windows, const Eigen::VectorXd& f, const Eigen::VectorXd& p0) {
    if (l1.dimension() != l2.dimension() || static_cast<std::size_t>(f.size()) != l1.dimension() ||
        f.size() != p0.size()) {
        throw UsageError("splitting_expectation: dimension mismatch");
    }
    const double horizon = static_cast<double>(windows) * sched.dt;
    Eigen::VectorXd p = p0;
    for (const auto& entry : build_timeline(sched, horizon)) {
        p = apply_factor(l1, l2, sched, entry.group, p, entry.duration);
    }
    return f.dot(p);
}

namespace {

struct Combo {
    double weight = 1.0;
    std::vector<Factor> factors;
};

// Every group sequence a plan can take, with its probability.
std::vector<Combo> plan_combos(const Schedule& sched, std::span<const TimelineEntry> entries) {
    if (sched.kind != SchemeKind::random) {
        Combo c;
        for (const auto& e : entries) c.factors.push_back({e.group, e.duration});
        return {c};
    }
    std::vector<Combo> out;
    const std::size_t count = std::size_t{1} << entries.size();
    for (std::size_t bits = 0; bits < count; ++bits) {
        Combo c;
        for (std::size_t i = 0; i < entries.size(); ++i) {
            const bool one = ((bits >> i) & 1U) == 0;
            c.weight *= one ? sched.p : 1.0 - sched.p;
            c.factors.push_back({one ? 1 : 2, entries[i].duration});
        }
        if (c.weight > 0.0) out.push_back(std::move(c));
    }
    return out;
}

bool precedes(const GroupPosition& a, const GroupPosition& b) {
    return a.factor < b.factor || (a.factor == b.factor && a.sub_time <= b.sub_time);
}

}  // namespace

std::vector<double> splitting_curve(const DenseGenerator& l1, const DenseGenerator& l2, const Decomposition& dec,
                                    const Schedule& sched, double horizon, std::span<const double> times,
                                    const Eigen::VectorXd& f, const Eigen::VectorXd& p0) {
    if (l1.dimension() != l2.dimension() || static_cast<std::size_t>(f.size()) != l1.dimension() ||
        f.size() != p0.size()) {
        throw UsageError("splitting_curve: dimension mismatch");
    }
    const auto& codec = l1.codec;
    const std::size_t dim = codec.dimension();
    if (codec.sites() != dec.cells().size() * dec.cell_size()) {
        throw UsageError("splitting_curve: decomposition does not match the state space");
    }
    // state index = part of group 1 + part of group 2
    std::array<std::vector<std::size_t>, 2> part;
    {
        std::vector<Spin> sigma(codec.sites()), masked(codec.sites());
        for (int g = 0; g < 2; ++g) part[static_cast<std::size_t>(g)].resize(dim);
        for (std::size_t s = 0; s < dim; ++s) {
            codec.decode(s, sigma);
            for (int g = 1; g <= 2; ++g) {
                for (std::size_t x = 0; x < sigma.size(); ++x) {
                    masked[x] = dec.cell(dec.cell_of(static_cast<Site>(x))).group == g ? sigma[x] : 0;
                }
                part[static_cast<std::size_t>(g - 1)][s] = codec.encode(masked);
            }
        }
    }
    const auto gen = [&](int g) -> const Eigen::MatrixXd& { return g == 1 ? l1.matrix : l2.matrix; };

    // E f(Y), Y taking each group's sites from the state at that group's position
    const auto joint = [&](const std::vector<Factor>& factors, const std::array<GroupPosition, 2>& pos,
                           const Eigen::VectorXd& start) {
        const int ga = precedes(pos[0], pos[1]) ? 1 : 2;
        const GroupPosition a = pos[static_cast<std::size_t>(ga - 1)];
        const GroupPosition b = pos[static_cast<std::size_t>(2 - ga)];
        Eigen::VectorXd pa = start;
        for (std::size_t i = 0; i < a.factor; ++i) pa = expm_apply(gen(factors[i].group), pa, factors[i].duration);
        if (a.sub_time > 0.0) pa = expm_apply(gen(factors[a.factor].group), pa, a.sub_time);

        Eigen::MatrixXd k = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
        for (std::size_t i = a.factor; i <= b.factor && i < factors.size(); ++i) {
            const double lo = i == a.factor ? a.sub_time : 0.0;
            const double hi = i == b.factor ? b.sub_time : factors[i].duration;
            if (hi > lo) k = expm(gen(factors[i].group), hi - lo) * k;
        }
        const auto& own = part[static_cast<std::size_t>(ga - 1)];
        const auto& other = part[static_cast<std::size_t>(2 - ga)];
        double value = 0.0;
        for (std::size_t s = 0; s < dim; ++s) {
            const double w = pa(static_cast<Eigen::Index>(s));
            if (w == 0.0) continue;
            double inner = 0.0;
            for (std::size_t t = 0; t < dim; ++t) {
                const double kt = k(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(s));
                if (kt != 0.0) inner += kt * f(static_cast<Eigen::Index>(own[s] + other[t]));
            }
            value += w * inner;
        }
        return value;
    };

    const double tol = 1e-10 * std::max(1.0, horizon);
    std::vector<double> out(times.size(), 0.0);
    std::size_t next = 0;
    while (next < times.size() && times[next] <= tol) out[next++] = f.dot(p0);
    const auto timeline = build_timeline(sched, horizon);
    Eigen::VectorXd p = p0;
    for (std::size_t e = 0; e < timeline.size();) {
        std::size_t e_end = e;
        while (e_end < timeline.size() && timeline[e_end].plan == timeline[e].plan) ++e_end;
        const std::span<const TimelineEntry> entries(timeline.data() + e, e_end - e);
        const double start = entries.front().start;
        const double end = entries.back().end;
        const auto combos = plan_combos(sched, entries);
        while (next < times.size() && times[next] <= end + tol) {
            double value = 0.0;
            for (const auto& c : combos) {
                value += c.weight * joint(c.factors, group_positions(c.factors, start, end, times[next]), p);
            }
            out[next++] = value;
        }
        for (const auto& entry : entries) p = apply_factor(l1, l2, sched, entry.group, p, entry.duration);
        e = e_end;
    }
    while (next < times.size()) out[next++] = f.dot(p);
    return out;
}

Eigen::MatrixXd commutator(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw UsageError("commutator: shape mismatch");
    return a * b - b * a;
}

}  // namespace fskmc::oracle
