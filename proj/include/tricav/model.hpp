#ifndef TRICAV_MODEL_HPP
#define TRICAV_MODEL_HPP

// Operating point, threshold regimes and classical steady states of the
// singly pumped downconversion + sum-frequency cavity.
//
// All rates are expressed in units of gamma1 (gamma1 = 1 in every reference
// configuration). The pump amplitude epsilon is real and non-negative.

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

#include "tricav/types.hpp"

namespace tricav {

template <typename Scalar>
struct SystemParamsT {
  Scalar gamma0{};
  Scalar gamma1{};
  Scalar gamma2{};
  Scalar gamma3{};
  Scalar chi1{};
  Scalar chi2{};
  Scalar epsilon{};
};

using SystemParams = SystemParamsT<double>;

/// gamma0 = gamma1 = gamma3 = 1, gamma2 = 3, chi1 = 0.01, chi2 = 0.4 chi1,
/// epsilon = 0. The configuration used throughout the reference figures.
inline SystemParams reference_params() {
  return SystemParams{1.0, 1.0, 3.0, 1.0, 0.01, 0.004, 0.0};
}

template <typename Scalar>
void validate(const SystemParamsT<Scalar>& p) {
  auto fail = [](const char* what) { throw ValidationError(what); };
  using std::isfinite;
  if (!(isfinite(p.gamma0) && isfinite(p.gamma1) && isfinite(p.gamma2) && isfinite(p.gamma3) &&
        isfinite(p.chi1) && isfinite(p.chi2) && isfinite(p.epsilon)))
    fail("system parameters must be finite");
  if (!(p.gamma0 > 0 && p.gamma1 > 0 && p.gamma2 > 0 && p.gamma3 > 0))
    fail("cavity loss rates gamma0..gamma3 must be strictly positive");
  if (!(p.chi1 > 0)) fail("chi1 must be strictly positive");
  if (!(p.chi2 >= 0)) fail("chi2 must be non-negative");
  if (!(p.epsilon >= 0)) fail("pump amplitude epsilon must be non-negative");
}

enum class Regime { WithThreshold, NoThreshold, Critical };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::WithThreshold: return "with-threshold";
    case Regime::NoThreshold: return "no-threshold";
    case Regime::Critical: return "critical";
  }
  return "?";
}

template <typename Scalar>
struct RegimeReportT {
  Regime regime{Regime::WithThreshold};
  Scalar eps_c{};      // +inf unless regime == WithThreshold
  Scalar eps_c_opo{};  // downconversion-only threshold
  Scalar chi2_crit{};  // chi2 separating the two regimes
};

using RegimeReport = RegimeReportT<double>;

/// Regime split on chi1^2 gamma2 versus chi2^2 gamma1. The two sides are
/// treated as equal when they agree to 64 ulps, so a chi2 computed as
/// chi1 * sqrt(gamma2 / gamma1) lands on Critical.
template <typename Scalar>
RegimeReportT<Scalar> classify_regime(const SystemParamsT<Scalar>& p) {
  using std::sqrt;
  using std::abs;
  validate(p);
  RegimeReportT<Scalar> r;
  r.eps_c_opo = p.gamma0 * sqrt(p.gamma1 * p.gamma3) / p.chi1;
  r.chi2_crit = p.chi1 * sqrt(p.gamma2 / p.gamma1);

  const Scalar down = p.chi1 * p.chi1 * p.gamma2;
  const Scalar up = p.chi2 * p.chi2 * p.gamma1;
  const Scalar tol = Scalar(64) * std::numeric_limits<Scalar>::epsilon() * (down > up ? down : up);
  if (abs(down - up) <= tol) {
    r.regime = Regime::Critical;
    r.eps_c = std::numeric_limits<Scalar>::infinity();
  } else if (down > up) {
    r.regime = Regime::WithThreshold;
    const Scalar gain = p.chi1 * p.chi1 / p.gamma1 - p.chi2 * p.chi2 / p.gamma2;
    r.eps_c = p.gamma0 * sqrt(p.gamma3) / sqrt(gain);
  } else {
    r.regime = Regime::NoThreshold;
    r.eps_c = std::numeric_limits<Scalar>::infinity();
  }
  return r;
}

enum class Branch : int { Plus = 1, Minus = -1 };

template <typename Scalar>
struct SteadyStateT {
  std::complex<Scalar> beta{};
  std::complex<Scalar> alpha1{};
  std::complex<Scalar> alpha2{};
  std::complex<Scalar> alpha3{};
  Scalar theta{};
  Branch branch{Branch::Plus};
  bool above_threshold{false};
};

using SteadyState = SteadyStateT<double>;

/// True when the pump is above threshold by more than 64 ulps, so a pump
/// set to a separately computed threshold value counts as at threshold.
template <typename Scalar>
bool is_above_threshold(const SystemParamsT<Scalar>& p, const RegimeReportT<Scalar>& reg) {
  if (reg.regime != Regime::WithThreshold) return false;
  return p.epsilon > reg.eps_c * (Scalar(1) + Scalar(64) * std::numeric_limits<Scalar>::epsilon());
}

/// Classical steady state. Below threshold, and everywhere in the
/// no-threshold and critical regimes, the signal modes are empty and the
/// pump sits at epsilon / gamma0. Above threshold the pump is clamped at
/// eps_c / gamma0 and the signal amplitudes carry the free phase theta
/// (alpha1 ~ e^{-i theta}, alpha2 and alpha3 ~ e^{+i theta}) with a common
/// sign set by the branch.
template <typename Scalar>
SteadyStateT<Scalar> steady_state(const SystemParamsT<Scalar>& p, Branch branch = Branch::Plus,
                                  Scalar theta = Scalar(0)) {
  using std::sqrt;
  using C = std::complex<Scalar>;
  const auto reg = classify_regime(p);
  SteadyStateT<Scalar> s;
  s.theta = theta;
  s.branch = branch;
  if (!is_above_threshold(p, reg)) {
    s.beta = C(p.epsilon / p.gamma0, Scalar(0));
    return s;
  }
  const Scalar k1 = p.chi1 * p.chi1 / p.gamma1;
  const Scalar k2 = p.chi2 * p.chi2 / p.gamma2;
  const Scalar beta = sqrt(p.gamma3 / (k1 - k2));
  const Scalar sign = branch == Branch::Plus ? Scalar(1) : Scalar(-1);
  const Scalar a3 = sign * sqrt((p.epsilon - reg.eps_c) / ((reg.eps_c / p.gamma0) * (k1 + k2)));
  const C phase = std::polar(Scalar(1), theta);
  s.above_threshold = true;
  s.beta = C(beta, Scalar(0));
  s.alpha1 = (p.chi1 / p.gamma1) * beta * a3 * std::conj(phase);
  s.alpha2 = (p.chi2 / p.gamma2) * beta * a3 * phase;
  s.alpha3 = a3 * phase;
  return s;
}

/// Right-hand sides of the classical mean-value equations, ordered
/// (d alpha1, d alpha2, d alpha3, d beta) / dt.
template <typename Scalar>
std::array<std::complex<Scalar>, 4> mean_field_rates(const SystemParamsT<Scalar>& p,
                                                     const std::complex<Scalar>& a1,
                                                     const std::complex<Scalar>& a2,
                                                     const std::complex<Scalar>& a3,
                                                     const std::complex<Scalar>& beta) {
  using std::conj;
  return {
      -p.gamma1 * a1 + p.chi1 * conj(a3) * beta,
      -p.gamma2 * a2 + p.chi2 * a3 * beta,
      -p.gamma3 * a3 + p.chi1 * conj(a1) * beta - p.chi2 * a2 * conj(beta),
      std::complex<Scalar>(p.epsilon, 0) - p.gamma0 * beta - p.chi1 * a1 * a3 - p.chi2 * a2 * conj(a3),
  };
}

/// Euclidean norm of the mean-value rates evaluated at a state.
template <typename Scalar>
Scalar mean_field_residual(const SystemParamsT<Scalar>& p, const SteadyStateT<Scalar>& s) {
  using std::sqrt;
  const auto r = mean_field_rates(p, s.alpha1, s.alpha2, s.alpha3, s.beta);
  Scalar sum{0};
  for (const auto& v : r) sum += std::norm(v);
  return sqrt(sum);
}

template <typename Scalar>
std::string describe(const SystemParamsT<Scalar>& p) {
  std::ostringstream os;
  os.precision(17);
  os << "gamma0=" << p.gamma0 << " gamma1=" << p.gamma1 << " gamma2=" << p.gamma2
     << " gamma3=" << p.gamma3 << " chi1=" << p.chi1 << " chi2=" << p.chi2
     << " epsilon=" << p.epsilon;
  return os.str();
}

}  // namespace tricav

#endif  // TRICAV_MODEL_HPP
