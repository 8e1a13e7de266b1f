#ifndef TRICAV_SDE_HPP
#define TRICAV_SDE_HPP

// Stochastic integration of the full positive-P equations and of the
// truncated Wigner equations, with ensemble moments on a time grid.
//
// Orderings: positive-P averages of products are normally ordered and are
// used directly. Wigner averages are symmetrically ordered; intensities
// are reordered as <a^dag a> = <|a|^2>_W - 1/2. Quadrature (co)variances
// need no correction in the Wigner case: a product of quadratures of
// different modes commutes, and for a single mode the symmetric ordering
// of X^2, Y^2 and (XY + YX)/2 is the operator itself. Positive-P
// quadrature variances pick up the commutator, V(X) = 1 + <:dX^2:>.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "tricav/criteria.hpp"
#include "tricav/model.hpp"
#include "tricav/types.hpp"

namespace tricav {

enum class Representation { PositiveP, TruncatedWigner };

const char* to_string(Representation r);
Representation representation_from_string(const std::string& s);

struct SdeConfig {
  Representation representation{Representation::TruncatedWigner};
  double dt{1e-3};            // units of 1 / gamma1
  double t_final{40.0};
  std::size_t n_traj{10000};
  std::uint64_t seed{1};
  double divergence_bound{0.0};  // <= 0 selects 1e3 x max(1, largest steady amplitude)
  std::size_t n_samples{401};    // time-grid points, t = 0 and t = t_final included
  unsigned workers{1};
};

void validate(const SdeConfig& cfg);

/// Doubled variables (a1, a1+, a2, a2+, a3, a3+, b, b+) in tricav::idx order.
using PositivePState = Vec8c;
/// (a1, a2, a3, b).
using WignerState = Eigen::Matrix<Complex, 4, 1>;
/// Wiener increments dW_1..dW_8, each with variance dt.
using NoiseIncrements = Eigen::Matrix<double, 8, 1>;

using Rng = std::mt19937_64;

/// One Euler-Maruyama step of the positive-P equations. Multiplicative
/// noise coefficients use the principal complex square root, e.g.
/// sqrt(chi1 b / 2) (dW1 + i dW2) on a1 and sqrt(-chi2 a2+ / 2) on a3 and b.
PositivePState step_positive_p(const PositivePState& x, const SystemParams& p, double dt, const NoiseIncrements& dw);

/// One Euler-Maruyama step of the truncated Wigner equations with additive
/// noise sqrt(gamma_j / 2) (dW + i dW') on each mode.
WignerState step_wigner(const WignerState& x, const SystemParams& p, double dt, const NoiseIncrements& dw);

/// Vacuum initial conditions: Wigner samples (xi1 + i xi2) / 2 with standard
/// normal xi for each of `modes` variables; positive-P returns 2 * modes
/// zeros (the vacuum P function is a delta at the origin).
Eigen::VectorXcd sample_initial(Representation rep, int modes, Rng& rng);

/// Per-trajectory generator, derived from the master seed and the global
/// trajectory index only.
Rng trajectory_rng(std::uint64_t seed, std::uint64_t trajectory);

/// Mode order for the four-entry arrays below: a1, a2, a3, b.
inline constexpr std::array<const char*, 4> kModeNames{"a1", "a2", "a3", "b"};

struct MomentSample {
  double time{};
  std::array<Complex, 4> mean{};
  std::array<double, 4> mean_se{};       // standard error of the complex mean (modulus)
  std::array<double, 4> intensity{};     // <a^dag a>
  std::array<double, 4> intensity_se{};
  Vec6d quad_mean{Vec6d::Zero()};        // X1, Y1, X2, Y2, X3, Y3
  Mat6d quad_cov{Mat6d::Zero()};         // operator (co)variances
  Vec6d quad_var_se{Vec6d::Zero()};      // standard errors of the diagonal
  SymmetricCriteria vijk{};
};

struct EnsembleMoments {
  Representation representation{Representation::TruncatedWigner};
  std::vector<MomentSample> samples;
  std::size_t n_traj{};
  std::size_t n_used{};
  std::size_t n_divergent{};
  double divergence_bound{};
  bool reliable{true};  // false when more than 1% of trajectories diverged
};

/// Integrates n_traj independent trajectories from vacuum and accumulates
/// moments on the time grid. Divergent trajectories (a non-finite value or
/// an amplitude above the divergence bound) are dropped and counted.
/// Output is bit-identical for a given seed and configuration, whatever
/// the worker count.
EnsembleMoments run_ensemble(const SystemParams& p, const SdeConfig& cfg);

/// Step-size check: the ensemble is run at dt and at dt / 2 on shared
/// Brownian paths (the coarse increments are sums of the fine ones).
/// max_intensity_diff holds, per mode, the largest |<n>_dt - <n>_dt/2|
/// over the time grid.
struct RichardsonReport {
  EnsembleMoments coarse;
  EnsembleMoments fine;
  std::array<double, 4> max_intensity_diff{};
};

RichardsonReport richardson_check(const SystemParams& p, const SdeConfig& cfg);

/// Symmetric witnesses from the ensemble quadrature covariances.
std::vector<SymmetricCriteria> vijk_timeseries(const EnsembleMoments& m);

/// Average of the samples with time >= t_from. Standard errors are the
/// mean of the per-sample errors, an upper bound for correlated samples.
MomentSample time_average(const EnsembleMoments& m, double t_from);

std::vector<std::string> moments_csv_header();
void write_moments_csv(std::ostream& os, const EnsembleMoments& m);

}  // namespace tricav

#endif  // TRICAV_SDE_HPP
