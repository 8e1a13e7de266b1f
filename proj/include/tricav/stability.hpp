#ifndef TRICAV_STABILITY_HPP
#define TRICAV_STABILITY_HPP

// Linearized fluctuations about a classical steady state.
//
// Fluctuations obey d(dx)/dt = -A dx + B dW in the ordering of tricav::idx,
// with diffusion D = B B^T. Stability therefore requires Re(lambda) > 0 for
// every eigenvalue of the drift matrix A.

#include <array>
#include <string>
#include <vector>

#include "tricav/model.hpp"
#include "tricav/types.hpp"

namespace tricav {

template <typename Scalar>
struct FluctuationMatricesT {
  Matrix8c<Scalar> drift;      // A
  Matrix8c<Scalar> diffusion;  // D
};

using FluctuationMatrices = FluctuationMatricesT<double>;

/// Deterministic drift of the positive-P equations on the doubled phase
/// space, x = (a1, a1+, a2, a2+, a3, a3+, b, b+).
template <typename Scalar>
Vector8c<Scalar> positive_p_drift(const SystemParamsT<Scalar>& p, const Vector8c<Scalar>& x) {
  using namespace idx;
  const std::complex<Scalar> eps(p.epsilon, 0);
  Vector8c<Scalar> f;
  f(a1) = -p.gamma1 * x(a1) + p.chi1 * x(a3p) * x(b);
  f(a1p) = -p.gamma1 * x(a1p) + p.chi1 * x(a3) * x(bp);
  f(a2) = -p.gamma2 * x(a2) + p.chi2 * x(a3) * x(b);
  f(a2p) = -p.gamma2 * x(a2p) + p.chi2 * x(a3p) * x(bp);
  f(a3) = -p.gamma3 * x(a3) + p.chi1 * x(a1p) * x(b) - p.chi2 * x(a2) * x(bp);
  f(a3p) = -p.gamma3 * x(a3p) + p.chi1 * x(a1) * x(bp) - p.chi2 * x(a2p) * x(b);
  f(b) = eps - p.gamma0 * x(b) - p.chi1 * x(a1) * x(a3) - p.chi2 * x(a2) * x(a3p);
  f(bp) = std::conj(eps) - p.gamma0 * x(bp) - p.chi1 * x(a1p) * x(a3p) - p.chi2 * x(a2p) * x(a3);
  return f;
}

/// Doubled phase-space point of a classical state (x+ = conj(x)).
template <typename Scalar>
Vector8c<Scalar> doubled_state(const SteadyStateT<Scalar>& s) {
  Vector8c<Scalar> x;
  x << s.alpha1, std::conj(s.alpha1), s.alpha2, std::conj(s.alpha2), s.alpha3, std::conj(s.alpha3),
      s.beta, std::conj(s.beta);
  return x;
}

/// Drift and diffusion about a steady state. The diffusion entries are the
/// second-order coefficients of the positive-P Fokker-Planck equation:
/// D(a1,a3) = chi1 b, D(a1+,a3+) = chi1 b+, D(a3,b) = -chi2 a2+,
/// D(a3+,b+) = -chi2 a2, symmetric.
///
/// Throws ValidationError when the state does not solve the mean-value
/// equations to 1e-6.
template <typename Scalar>
FluctuationMatricesT<Scalar> build_matrices(const SystemParamsT<Scalar>& p, const SteadyStateT<Scalar>& s) {
  using namespace idx;
  using std::conj;
  validate(p);
  if (!(mean_field_residual(p, s) <= Scalar(1e-6)))
    throw ValidationError("steady state does not satisfy the mean-value equations for these parameters");

  const auto b_ = s.beta, bc = conj(s.beta);
  const auto x1 = s.alpha1, x1c = conj(s.alpha1);
  const auto x2 = s.alpha2, x2c = conj(s.alpha2);
  const auto x3 = s.alpha3, x3c = conj(s.alpha3);
  const Scalar c1 = p.chi1, c2 = p.chi2;

  FluctuationMatricesT<Scalar> m;
  auto& A = m.drift;
  A.setZero();
  A(a1, a1) = p.gamma1;
  A(a1, a3p) = -c1 * b_;
  A(a1, b) = -c1 * x3c;

  A(a1p, a1p) = p.gamma1;
  A(a1p, a3) = -c1 * bc;
  A(a1p, bp) = -c1 * x3;

  A(a2, a2) = p.gamma2;
  A(a2, a3) = -c2 * b_;
  A(a2, b) = -c2 * x3;

  A(a2p, a2p) = p.gamma2;
  A(a2p, a3p) = -c2 * bc;
  A(a2p, bp) = -c2 * x3c;

  A(a3, a1p) = -c1 * b_;
  A(a3, a2) = c2 * bc;
  A(a3, a3) = p.gamma3;
  A(a3, b) = -c1 * x1c;
  A(a3, bp) = c2 * x2;

  A(a3p, a1) = -c1 * bc;
  A(a3p, a2p) = c2 * b_;
  A(a3p, a3p) = p.gamma3;
  A(a3p, b) = c2 * x2c;
  A(a3p, bp) = -c1 * x1;

  A(b, a1) = c1 * x3;
  A(b, a2) = c2 * x3c;
  A(b, a3) = c1 * x1;
  A(b, a3p) = c2 * x2;
  A(b, b) = p.gamma0;

  A(bp, a1p) = c1 * x3c;
  A(bp, a2p) = c2 * x3;
  A(bp, a3) = c2 * x2c;
  A(bp, a3p) = c1 * x1c;
  A(bp, bp) = p.gamma0;

  auto& D = m.diffusion;
  D.setZero();
  D(a1, a3) = D(a3, a1) = c1 * b_;
  D(a1p, a3p) = D(a3p, a1p) = c1 * bc;
  D(a3, b) = D(b, a3) = -c2 * x2c;
  D(a3p, bp) = D(bp, a3p) = -c2 * x2;
  return m;
}

struct StabilityReport {
  std::array<Complex, 8> eigenvalues{};
  double min_real_part{};
  bool stable{false};
  bool marginal{false};
};

inline constexpr double kDefaultMarginalTolerance = 1e-9;

/// Eigenvalues of A. stable iff min Re(lambda) > tolerance, marginal iff
/// |min Re(lambda)| <= tolerance. Throws NumericalError if the eigensolver
/// does not converge.
StabilityReport eigen_analysis(const FluctuationMatrices& mats,
                               double tolerance = kDefaultMarginalTolerance);

/// Coefficients c0..c3 of the cubic factor
///   (g1 - l)(g2 - l)(g3 - l) + l b^2 (chi1^2 - chi2^2) + b^2 (g1 chi2^2 - g2 chi1^2)
/// of the below-threshold characteristic polynomial, with b = eps / gamma0.
/// The full polynomial is (gamma0 - l)^2 * cubic(l)^2.
std::array<double, 4> characteristic_cubic(const SystemParams& p, double eps);

/// Full below-threshold characteristic polynomial evaluated at lambda.
Complex characteristic_polynomial(const SystemParams& p, double eps, Complex lambda);

/// The eight roots of the below-threshold characteristic polynomial,
/// found from the cubic factor by simultaneous (Durand-Kerner) iteration
/// with Newton polishing; each root appears with its multiplicity.
std::array<Complex, 8> characteristic_roots(const SystemParams& p, double eps);

/// Builds the below-threshold drift at pump eps, computes its eigenvalues
/// and returns max |P(lambda)| over them, where P is the full
/// characteristic polynomial. Throws ValidationError if eps is above
/// threshold.
double characteristic_poly_check(const SystemParams& p, double eps);

/// Closed-form eigenvalues for equal signal losses gamma1 = gamma2 = gamma3:
/// gamma0 (x2), gamma (x2), gamma +- (eps/gamma0) sqrt(chi1^2 - chi2^2) (x2
/// each). Complex when chi2 > chi1. Throws ValidationError otherwise.
std::array<Complex, 8> equal_loss_eigenvalues(const SystemParams& p, double eps);

/// Largest distance between two equally sized multisets of complex numbers
/// under the optimal one-to-one matching (exhaustive for n <= 8).
double multiset_distance(const std::array<Complex, 8>& a, const std::array<Complex, 8>& b);

enum class StabilityClass { BelowThresholdStable, AboveThresholdUnstable, NoThresholdStable, Marginal };

const char* to_string(StabilityClass c);
StabilityClass stability_class_from_string(const std::string& s);

struct StabilityCell {
  double chi2{};
  double epsilon{};
  StabilityClass cls{StabilityClass::Marginal};
  double min_real_part{};
};

/// Classifies every (chi2, epsilon) pair, chi2 outer and epsilon inner.
/// Above-threshold cells are AboveThresholdUnstable (their linearization
/// carries the phase-diffusion zero mode); cells with a vanishing or
/// negative real part below threshold are Marginal.
std::vector<StabilityCell> stability_map(const SystemParams& base, const std::vector<double>& chi2_grid,
                                         const std::vector<double>& eps_grid,
                                         double tolerance = kDefaultMarginalTolerance);

}  // namespace tricav

#endif  // TRICAV_STABILITY_HPP
