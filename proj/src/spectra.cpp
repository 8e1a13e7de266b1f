#include "tricav/spectra.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

namespace tricav {

namespace {

constexpr double kMinRcond = 1e-13;

Eigen::PartialPivLU<Mat8c> checked_lu(const Mat8c& m, const char* what) {
  Eigen::PartialPivLU<Mat8c> lu(m);
  if (!(lu.rcond() > kMinRcond)) throw SingularSpectrumError(std::string(what) + " is singular (marginal state)");
  return lu;
}

Mat8c quadrature_map() {
  Mat8c t = Mat8c::Zero();
  const Complex i(0, 1);
  for (int m = 0; m < 4; ++m) {
    t(2 * m, 2 * m) = 1.0;
    t(2 * m, 2 * m + 1) = 1.0;
    t(2 * m + 1, 2 * m) = -i;
    t(2 * m + 1, 2 * m + 1) = i;
  }
  return t;
}

// Loss rate of the mode each quadrature index belongs to.
std::array<double, 8> quadrature_losses(const SystemParams& p) {
  return {p.gamma1, p.gamma1, p.gamma2, p.gamma2, p.gamma3, p.gamma3, p.gamma0, p.gamma0};
}

}  // namespace

Mat8c intracavity_spectrum(const FluctuationMatrices& mats, double omega) {
  const Complex iw(0, omega);
  const Mat8c id = Mat8c::Identity();
  const auto left = checked_lu(mats.drift + iw * id, "A + i omega");
  // (A^T - iw)^T = A - iw, so M (A^T - iw)^-1 = ((A - iw)^-1 M^T)^T.
  const auto right = checked_lu(mats.drift - iw * id, "A - i omega");
  const Mat8c left_applied = left.solve(mats.diffusion);
  return right.solve(left_applied.transpose()).transpose();
}

Mat8c intracavity_covariance(const FluctuationMatrices& mats) {
  const Mat8c& a = mats.drift;
  Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(64, 64);
  // Column-major vec: vec(A C) = (I kron A) vec(C), vec(C A^T) = (A kron I) vec(C).
  for (int blk = 0; blk < 8; ++blk) k.block(8 * blk, 8 * blk, 8, 8) += a;
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c) k.block(8 * r, 8 * c, 8, 8).diagonal().array() += a(r, c);

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(k);
  if (!(lu.rcond() > kMinRcond)) throw SingularSpectrumError("Lyapunov operator is singular (marginal state)");
  const Eigen::VectorXcd rhs = Eigen::Map<const Eigen::VectorXcd>(mats.diffusion.data(), 64);
  const Eigen::VectorXcd vec = lu.solve(rhs);
  return Eigen::Map<const Mat8c>(vec.data());
}

Mat8c quadrature_congruence(const Mat8c& s) {
  static const Mat8c t = quadrature_map();
  return t * s * t.transpose();
}

Mat8d quadrature_transform(const Mat8c& s_intra, double tolerance) {
  const Mat8c q = quadrature_congruence(s_intra);
  const double scale = std::max(1.0, q.cwiseAbs().maxCoeff());
  const double residue = (q - q.adjoint()).cwiseAbs().maxCoeff();
  if (!(residue <= tolerance * scale))
    throw NumericalError("quadrature spectral matrix is not Hermitian (residue " + std::to_string(residue) + ")");
  return q.real();
}

Mat8d output_spectrum(const Mat8d& quad_intra, const SystemParams& p) {
  const auto g = quadrature_losses(p);
  Mat8d out;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      out(i, j) = i == j ? 1.0 + 2.0 * g[i] * quad_intra(i, i) : 2.0 * std::sqrt(g[i] * g[j]) * quad_intra(i, j);
  return out;
}

double combination_variance(const Mat6d& v, const Vec6d& coeffs) { return coeffs.dot(v * coeffs); }

double combination_variance(const Mat8d& spec_out, const Vec6d& coeffs) {
  return combination_variance(Mat6d(signal_block(spec_out)), coeffs);
}

std::vector<double> linear_grid(double lo, double hi, int points) {
  if (points < 1 || !std::isfinite(lo) || !std::isfinite(hi)) throw ValidationError("invalid grid specification");
  std::vector<double> g(points);
  if (points == 1) {
    g[0] = lo;
    return g;
  }
  for (int i = 0; i < points; ++i) g[i] = lo + (hi - lo) * i / (points - 1);
  return g;
}

std::vector<double> default_omega_grid(const SystemParams& p) { return linear_grid(0.0, 10.0 * p.gamma0, 1001); }

SpectralResult compute_spectra(const SystemParams& p, const std::vector<double>& omega_grid) {
  const auto s = steady_state(p);
  if (s.above_threshold)
    throw LinearizationError(
        "spectra requested above threshold: the linearized fluctuations carry a zero eigenvalue "
        "(phase diffusion) there; use the stochastic simulator instead");
  const auto mats = build_matrices(p, s);
  const auto report = eigen_analysis(mats);
  if (!report.stable)
    throw LinearizationError("steady state is not strictly stable (min Re lambda = " +
                             std::to_string(report.min_real_part) + "); spectra are undefined");

  SpectralResult r;
  r.omega = omega_grid;
  r.quad_out.reserve(omega_grid.size());
  r.intracavity.reserve(omega_grid.size());
  for (double w : omega_grid) {
    if (!std::isfinite(w)) throw ValidationError("frequency grid must be finite");
    r.intracavity.push_back(intracavity_spectrum(mats, w));
    r.quad_out.push_back(output_spectrum(quadrature_transform(r.intracavity.back()), p));
  }
  return r;
}

std::vector<std::string> spectrum_csv_header() {
  static const char* names[6] = {"X1", "Y1", "X2", "Y2", "X3", "Y3"};
  std::vector<std::string> h{"omega"};
  for (int i = 0; i < 6; ++i)
    for (int j = i; j < 6; ++j) h.push_back(std::string(names[i]) + "_" + names[j]);
  return h;
}

void write_spectrum_csv(std::ostream& os, const SpectralResult& r) {
  const auto header = spectrum_csv_header();
  for (std::size_t k = 0; k < header.size(); ++k) os << (k ? "," : "") << header[k];
  os << '\n' << std::setprecision(17);
  for (std::size_t n = 0; n < r.omega.size(); ++n) {
    os << r.omega[n];
    for (int i = 0; i < 6; ++i)
      for (int j = i; j < 6; ++j) os << ',' << r.quad_out[n](i, j);
    os << '\n';
  }
}

}  // namespace tricav
