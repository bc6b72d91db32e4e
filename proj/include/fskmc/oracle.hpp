#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fskmc/lattice.hpp"
#include "fskmc/models.hpp"
#include "fskmc/observables.hpp"
#include "fskmc/scheduler.hpp"

namespace fskmc::oracle {

inline constexpr std::size_t kMaxStates = 4096;

/// Configuration <-> integer, base (max_spin + 1), site 0 least significant.
class StateCodec {
public:
    StateCodec(std::size_t sites, Spin max_spin);

    std::size_t dimension() const noexcept { return dimension_; }
    std::size_t sites() const noexcept { return sites_; }

    std::size_t encode(std::span<const Spin> sigma) const noexcept;
    void decode(std::size_t state, std::span<Spin> out) const noexcept;
    Configuration decode(std::size_t state) const;

private:
    std::size_t sites_;
    std::size_t base_;
    std::size_t dimension_;
};

/// Dense CTMC generator in column orientation: matrix(i, j) is the rate of
/// the jump j -> i, columns sum to zero and probability vectors evolve as
/// dp/dt = Q p.
struct DenseGenerator {
    Eigen::MatrixXd matrix;
    StateCodec codec;

    std::size_t dimension() const noexcept { return codec.dimension(); }
};

/// Generator of the events rooted at `sites` (all sites gives L; a cell or
/// group gives the corresponding piece of the split). Throws ResourceError
/// above kMaxStates states.
DenseGenerator build_generator(const RateModel& model, const Lattice& lat, std::span<const Site> sites);

/// Group generator as the fractional-step runner simulates it: events
/// rooted in group-g cells whose partner stays inside the same cell.
DenseGenerator build_group_generator(const RateModel& model, const Lattice& lat, const Decomposition& dec,
                                     int group);

/// e^{tQ} by scaling and squaring with a truncated Taylor series.
Eigen::MatrixXd expm(const Eigen::MatrixXd& q, double t);

/// e^{tQ} v without forming the exponential: t is split into s substeps with
/// t ||Q||_1 / s <= 1 and each substep applies the Taylor series until the
/// next term is below double precision relative to the partial sum.
Eigen::VectorXd expm_apply(const Eigen::MatrixXd& q, const Eigen::VectorXd& v, double t);

Eigen::VectorXd observable_vector(const StateCodec& codec, const Lattice& lat, const Observable& f);
Eigen::VectorXd point_mass(const StateCodec& codec, const Configuration& zeta);

/// E[f(sigma_t) | sigma_0 = zeta] for the full dynamics.
double exact_expectation(const RateModel& model, const Lattice& lat, const Observable& f, double t,
                         const Configuration& zeta);

/// Exact expectation at every time in `times`.
std::vector<double> exact_curve(const RateModel& model, const Lattice& lat, const Observable& f,
                                std::span<const double> times, const Configuration& zeta);

/// f . (product of split factors over n windows) p0. For a randomized
/// schedule each factor is replaced by its mean p e^{tau L1} + (1-p) e^{tau L2},
/// which is exact because the draws are independent of the state.
double splitting_expectation(const DenseGenerator& l1, const DenseGenerator& l2, const Schedule& sched,
                             std::size_t windows, const Eigen::VectorXd& f, const Eigen::VectorXd& p0);

/// Noise-free expectation of the sampled fractional-step path at each time
/// in `times`, under the per-group clock of group_positions: the sample
/// combines each group's sites from a different point of the factor
/// sequence, so the joint law of the two points is used.
std::vector<double> splitting_curve(const DenseGenerator& l1, const DenseGenerator& l2, const Decomposition& dec,
                                    const Schedule& sched, double horizon, std::span<const double> times,
                                    const Eigen::VectorXd& f, const Eigen::VectorXd& p0);

Eigen::MatrixXd commutator(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace fskmc::oracle
