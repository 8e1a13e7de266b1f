#ifndef TRICAV_CRITERIA_HPP
#define TRICAV_CRITERIA_HPP

// Van Loock-Furusawa tripartite inseparability witnesses.
//
// With X = a + a^dag and Y = -i (a - a^dag) every witness below is bounded
// from below by 4 for states that are separable in some bipartition:
//
//   pairwise   s12 = V(X1 - X2) + V(Y1 + Y2 + g3 Y3)
//              s13 = V(X1 - X3) + V(Y1 + g2 Y2 + Y3)
//              s23 = V(X2 - X3) + V(g1 Y1 + Y2 + Y3)
//   symmetric  s123 = V(X1 - (X2 + X3)/sqrt2) + V(Y1 + (Y2 + Y3)/sqrt2)
//              s312 = V(X3 - (X1 + X2)/sqrt2) + V(Y3 + (Y1 + Y2)/sqrt2)
//              s231 = V(X2 - (X3 + X1)/sqrt2) + V(Y2 + (Y3 + Y1)/sqrt2)
//
// Two pairwise violations, or one symmetric violation, certify full
// inseparability. The bound 4 is tied to this quadrature normalization.
// Mode labels are not interchangeable; the orderings above are the ones
// evaluated.
//
// The same functions serve output spectra (frequency domain) and ensemble
// covariance matrices (time domain): each takes the 6x6 matrix over
// (X1, Y1, X2, Y2, X3, Y3).

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "tricav/model.hpp"
#include "tricav/spectra.hpp"
#include "tricav/types.hpp"

namespace tricav {

inline constexpr double kInseparabilityBound = 4.0;

struct GainSet {
  double g1{};
  double g2{};
  double g3{};
};

struct PairwiseCriteria {
  double s12{};
  double s13{};
  double s23{};
};

struct SymmetricCriteria {
  double s123{};
  double s312{};
  double s231{};
};

/// Gains minimizing each pairwise Y-combination:
///   g1 = -(V(Y1,Y2) + V(Y1,Y3)) / V(Y1), and cyclically.
/// Throws NumericalError when a V(Yi) is not strictly positive.
GainSet optimal_gains(const Mat6d& v);

PairwiseCriteria pairwise_criteria(const Mat6d& v, const GainSet& gains);
SymmetricCriteria symmetric_criteria(const Mat6d& v);

int pairwise_violations(const PairwiseCriteria& c);
int symmetric_violations(const SymmetricCriteria& c);

/// Full-inseparability verdict: at least two pairwise violations or at
/// least one symmetric violation.
bool fully_inseparable(const PairwiseCriteria& pw, const SymmetricCriteria& sym);

struct CriteriaSpectrum {
  std::vector<double> omega;
  std::vector<PairwiseCriteria> pairwise;
  std::vector<SymmetricCriteria> symmetric;
  std::vector<GainSet> gains;
};

/// Witnesses with gains optimized independently at every frequency.
CriteriaSpectrum criteria_spectrum(const SpectralResult& spectra);

enum class SweepKind { Pump, Chi2 };

const char* to_string(SweepKind k);

/// Order of the six witnesses in ScanPoint arrays: s12, s13, s23, s123,
/// s312, s231.
inline constexpr std::array<const char*, 6> kCriteriaNames{"s12", "s13", "s23", "s123", "s312", "s231"};

struct ScanPoint {
  double value{};
  bool skipped{false};
  std::string skip_reason;
  std::array<double, 6> minimum{};
  std::array<double, 6> argmin_omega{};
  /// Gain entering each pairwise witness at its own argmin: g3 for s12,
  /// g2 for s13, g1 for s23.
  std::array<double, 3> gain_at_argmin{};
};

/// For each sweep value (absolute pump amplitude or absolute chi2), the
/// minimum of each witness over the frequency window and its location.
/// Points at or above threshold, or otherwise not linearizable, are kept
/// with skipped = true.
std::vector<ScanPoint> scan_minimum(const SystemParams& base, SweepKind sweep, const std::vector<double>& values,
                                    const std::vector<double>& omega_window);

void write_scan_csv(std::ostream& os, SweepKind sweep, const std::vector<ScanPoint>& points);
std::vector<std::string> scan_csv_header(SweepKind sweep);

void write_criteria_spectrum_csv(std::ostream& os, const CriteriaSpectrum& c);
std::vector<std::string> criteria_spectrum_csv_header();

}  // namespace tricav

#endif  // TRICAV_CRITERIA_HPP
