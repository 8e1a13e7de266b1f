#ifndef TRICAV_SPECTRA_HPP
#define TRICAV_SPECTRA_HPP

// Ornstein-Uhlenbeck spectra of the linearized fluctuations and the
// measurable output spectra outside the cavity.
//
// Quadratures are X = a + a^dag and Y = -i (a - a^dag); vacuum has unit
// variance in each, and output spectra are normalized so that shot noise
// is 1.

#include <iosfwd>
#include <vector>

#include "tricav/model.hpp"
#include "tricav/stability.hpp"
#include "tricav/types.hpp"

namespace tricav {

/// The resolvent (A + i omega) is singular: the state is marginal.
class SingularSpectrumError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Linearization refused: above threshold or not stable.
class LinearizationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// S(omega) = (A + i omega)^-1 D (A^T - i omega)^-1 in the (a, a+) basis.
Mat8c intracavity_spectrum(const FluctuationMatrices& mats, double omega);

/// Steady-state covariance C of the linearized process, the solution of
/// A C + C A^T = D. Equals the integral of S(omega) d omega / (2 pi).
Mat8c intracavity_covariance(const FluctuationMatrices& mats);

/// Per-mode map x -> (x + x+, -i (x - x+)) applied as T S T^T.
Mat8c quadrature_congruence(const Mat8c& s);

/// Quadrature-basis matrix with the check that it is Hermitian to
/// `tolerance` relative to its largest entry. The real part is returned.
/// The imaginary part is antisymmetric and never contributes to the
/// variance of a real combination of quadratures.
/// Throws NumericalError when the Hermitian check fails.
Mat8d quadrature_transform(const Mat8c& s_intra, double tolerance = 1e-10);

/// Input-output relations: out_ii = 1 + 2 gamma_i S_ii and
/// out_ij = 2 sqrt(gamma_i gamma_j) S_ij, with the loss rate of the mode each
/// quadrature belongs to.
Mat8d output_spectrum(const Mat8d& quad_intra, const SystemParams& p);

/// Variance c^T V c of a combination of the six signal quadratures
/// (X1, Y1, X2, Y2, X3, Y3).
double combination_variance(const Mat6d& v, const Vec6d& coeffs);
double combination_variance(const Mat8d& spec_out, const Vec6d& coeffs);

inline Mat6d signal_block(const Mat8d& m) { return m.topLeftCorner<6, 6>(); }

struct SpectralResult {
  std::vector<double> omega;
  std::vector<Mat8d> quad_out;    // output (co)variances in quadrature basis
  std::vector<Mat8c> intracavity; // S(omega) in the (a, a+) basis
};

/// 0 .. 10 gamma0 with 1001 points.
std::vector<double> default_omega_grid(const SystemParams& p);
std::vector<double> linear_grid(double lo, double hi, int points);

/// Output spectra over a frequency grid at the default steady state.
/// Throws LinearizationError above threshold or when the state is not
/// strictly stable.
SpectralResult compute_spectra(const SystemParams& p, const std::vector<double>& omega_grid);

/// CSV: omega followed by the 21 unique signal-quadrature entries
/// (upper triangle of the 6x6 block in X1,Y1,X2,Y2,X3,Y3 order).
void write_spectrum_csv(std::ostream& os, const SpectralResult& r);
std::vector<std::string> spectrum_csv_header();

}  // namespace tricav

#endif  // TRICAV_SPECTRA_HPP
