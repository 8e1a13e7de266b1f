#include "tricav/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tricav {

StabilityReport eigen_analysis(const FluctuationMatrices& mats, double tolerance) {
  if (!mats.drift.allFinite()) throw NumericalError("drift matrix has non-finite entries");
  Eigen::ComplexEigenSolver<Mat8c> solver(mats.drift, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw NumericalError("eigensolver did not converge on the drift matrix");

  StabilityReport r;
  const auto& ev = solver.eigenvalues();
  double min_re = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 8; ++i) {
    r.eigenvalues[i] = ev(i);
    min_re = std::min(min_re, ev(i).real());
  }
  std::sort(r.eigenvalues.begin(), r.eigenvalues.end(), [](const Complex& a, const Complex& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  r.min_real_part = min_re;
  r.stable = min_re > tolerance;
  r.marginal = std::abs(min_re) <= tolerance;
  return r;
}

std::array<double, 4> characteristic_cubic(const SystemParams& p, double eps) {
  const double b2 = (eps / p.gamma0) * (eps / p.gamma0);
  const double g1 = p.gamma1, g2 = p.gamma2, g3 = p.gamma3;
  const double k1 = p.chi1 * p.chi1, k2 = p.chi2 * p.chi2;
  return {
      g1 * g2 * g3 + b2 * (g1 * k2 - g2 * k1),
      -(g1 * g2 + g1 * g3 + g2 * g3) + b2 * (k1 - k2),
      g1 + g2 + g3,
      -1.0,
  };
}

namespace {

Complex horner(const std::array<double, 4>& c, Complex x) {
  return ((c[3] * x + c[2]) * x + c[1]) * x + c[0];
}

Complex horner_derivative(const std::array<double, 4>& c, Complex x) {
  return (3.0 * c[3] * x + 2.0 * c[2]) * x + c[1];
}

std::array<Complex, 3> cubic_roots(const std::array<double, 4>& c) {
  // Monic form for the simultaneous iteration.
  const std::array<double, 4> m{c[0] / c[3], c[1] / c[3], c[2] / c[3], 1.0};
  const double radius = 1.0 + std::max({std::abs(m[0]), std::abs(m[1]), std::abs(m[2])});
  std::array<Complex, 3> z;
  const Complex seed(0.4, 0.9);
  for (int k = 0; k < 3; ++k) z[k] = radius * std::pow(seed, k);

  for (int iter = 0; iter < 500; ++iter) {
    double change = 0.0;
    for (int i = 0; i < 3; ++i) {
      Complex denom(1.0, 0.0);
      for (int j = 0; j < 3; ++j)
        if (j != i) denom *= z[i] - z[j];
      const Complex step = horner(m, z[i]) / denom;
      z[i] -= step;
      change = std::max(change, std::abs(step));
    }
    if (change < 1e-15 * radius) break;
  }

  // Newton polish for simple roots; merge clusters of a multiple root into
  // their centroid, which is accurate to rounding where each member is not.
  for (auto& r : z) {
    for (int k = 0; k < 3; ++k) {
      const Complex d = horner_derivative(m, r);
      if (std::abs(d) < 1e-6) break;
      r -= horner(m, r) / d;
    }
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      if (std::abs(z[i] - z[j]) < 1e-6 * radius) {
        const Complex mean = 0.5 * (z[i] + z[j]);
        z[i] = z[j] = mean;
      }
    }
  }
  return z;
}

}  // namespace

Complex characteristic_polynomial(const SystemParams& p, double eps, Complex lambda) {
  const Complex cubic = horner(characteristic_cubic(p, eps), lambda);
  const Complex pump = p.gamma0 - lambda;
  return pump * pump * cubic * cubic;
}

std::array<Complex, 8> characteristic_roots(const SystemParams& p, double eps) {
  const auto z = cubic_roots(characteristic_cubic(p, eps));
  return {Complex(p.gamma0, 0), Complex(p.gamma0, 0), z[0], z[0], z[1], z[1], z[2], z[2]};
}

double characteristic_poly_check(const SystemParams& p, double eps) {
  SystemParams q = p;
  q.epsilon = eps;
  const auto s = steady_state(q);
  if (s.above_threshold)
    throw ValidationError("characteristic polynomial check applies below threshold only");
  const auto report = eigen_analysis(build_matrices(q, s));
  double worst = 0.0;
  for (const auto& l : report.eigenvalues) worst = std::max(worst, std::abs(characteristic_polynomial(q, eps, l)));
  return worst;
}

std::array<Complex, 8> equal_loss_eigenvalues(const SystemParams& p, double eps) {
  if (!(p.gamma1 == p.gamma2 && p.gamma2 == p.gamma3))
    throw ValidationError("closed-form eigenvalues need gamma1 = gamma2 = gamma3");
  const double g = p.gamma1;
  const Complex root = std::sqrt(Complex(p.chi1 * p.chi1 - p.chi2 * p.chi2, 0.0));
  const Complex shift = (eps / p.gamma0) * root;
  return {Complex(p.gamma0, 0), Complex(p.gamma0, 0), Complex(g, 0), Complex(g, 0),
          g + shift, g + shift, g - shift, g - shift};
}

double multiset_distance(const std::array<Complex, 8>& a, const std::array<Complex, 8>& b) {
  std::array<int, 8> perm;
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double worst = 0.0;
    for (int i = 0; i < 8 && worst < best; ++i) worst = std::max(worst, std::abs(a[i] - b[perm[i]]));
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

const char* to_string(StabilityClass c) {
  switch (c) {
    case StabilityClass::BelowThresholdStable: return "below-threshold-stable";
    case StabilityClass::AboveThresholdUnstable: return "above-threshold-unstable";
    case StabilityClass::NoThresholdStable: return "no-threshold-stable";
    case StabilityClass::Marginal: return "marginal";
  }
  return "?";
}

StabilityClass stability_class_from_string(const std::string& s) {
  for (auto c : {StabilityClass::BelowThresholdStable, StabilityClass::AboveThresholdUnstable,
                 StabilityClass::NoThresholdStable, StabilityClass::Marginal})
    if (s == to_string(c)) return c;
  throw ValidationError("unknown stability class '" + s + "'");
}

std::vector<StabilityCell> stability_map(const SystemParams& base, const std::vector<double>& chi2_grid,
                                         const std::vector<double>& eps_grid, double tolerance) {
  std::vector<StabilityCell> cells;
  cells.reserve(chi2_grid.size() * eps_grid.size());
  for (double chi2 : chi2_grid) {
    for (double eps : eps_grid) {
      if (!std::isfinite(chi2) || !std::isfinite(eps) || chi2 < 0 || eps < 0)
        throw ValidationError("stability map grids must be finite and non-negative");
      SystemParams p = base;
      p.chi2 = chi2;
      p.epsilon = eps;
      const auto regime = classify_regime(p).regime;
      const auto s = steady_state(p);
      const auto report = eigen_analysis(build_matrices(p, s), tolerance);

      StabilityCell cell{chi2, eps, StabilityClass::Marginal, report.min_real_part};
      if (s.above_threshold)
        cell.cls = StabilityClass::AboveThresholdUnstable;
      else if (report.stable)
        cell.cls = regime == Regime::WithThreshold ? StabilityClass::BelowThresholdStable
                                                   : StabilityClass::NoThresholdStable;
      cells.push_back(cell);
    }
  }
  return cells;
}

}  // namespace tricav
