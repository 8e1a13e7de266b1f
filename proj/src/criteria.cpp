#include "tricav/criteria.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

namespace tricav {

namespace {

Vec6d combo(std::initializer_list<std::pair<int, double>> terms) {
  Vec6d c = Vec6d::Zero();
  for (const auto& [k, w] : terms) c(k) = w;
  return c;
}

double positive_variance(const Mat6d& v, int k, const char* name) {
  const double var = v(k, k);
  if (!(var > 0.0)) throw NumericalError(std::string("gain optimization needs V(") + name + ") > 0");
  return var;
}

}  // namespace

GainSet optimal_gains(const Mat6d& v) {
  using namespace quad;
  const double v12 = v(Y1, Y2), v13 = v(Y1, Y3), v23 = v(Y2, Y3);
  return {
      -(v12 + v13) / positive_variance(v, Y1, "Y1"),
      -(v12 + v23) / positive_variance(v, Y2, "Y2"),
      -(v13 + v23) / positive_variance(v, Y3, "Y3"),
  };
}

PairwiseCriteria pairwise_criteria(const Mat6d& v, const GainSet& g) {
  using namespace quad;
  return {
      combination_variance(v, combo({{X1, 1}, {X2, -1}})) + combination_variance(v, combo({{Y1, 1}, {Y2, 1}, {Y3, g.g3}})),
      combination_variance(v, combo({{X1, 1}, {X3, -1}})) + combination_variance(v, combo({{Y1, 1}, {Y2, g.g2}, {Y3, 1}})),
      combination_variance(v, combo({{X2, 1}, {X3, -1}})) + combination_variance(v, combo({{Y1, g.g1}, {Y2, 1}, {Y3, 1}})),
  };
}

SymmetricCriteria symmetric_criteria(const Mat6d& v) {
  using namespace quad;
  const double r = 1.0 / std::sqrt(2.0);
  auto witness = [&](int xi, int yi, int xj, int yj, int xk, int yk) {
    return combination_variance(v, combo({{xi, 1}, {xj, -r}, {xk, -r}})) +
           combination_variance(v, combo({{yi, 1}, {yj, r}, {yk, r}}));
  };
  return {
      witness(X1, Y1, X2, Y2, X3, Y3),
      witness(X3, Y3, X1, Y1, X2, Y2),
      witness(X2, Y2, X3, Y3, X1, Y1),
  };
}

int pairwise_violations(const PairwiseCriteria& c) {
  return (c.s12 < kInseparabilityBound) + (c.s13 < kInseparabilityBound) + (c.s23 < kInseparabilityBound);
}

int symmetric_violations(const SymmetricCriteria& c) {
  return (c.s123 < kInseparabilityBound) + (c.s312 < kInseparabilityBound) + (c.s231 < kInseparabilityBound);
}

bool fully_inseparable(const PairwiseCriteria& pw, const SymmetricCriteria& sym) {
  return pairwise_violations(pw) >= 2 || symmetric_violations(sym) >= 1;
}

CriteriaSpectrum criteria_spectrum(const SpectralResult& spectra) {
  CriteriaSpectrum c;
  c.omega = spectra.omega;
  const auto n = spectra.omega.size();
  c.pairwise.reserve(n);
  c.symmetric.reserve(n);
  c.gains.reserve(n);
  for (const auto& out : spectra.quad_out) {
    const Mat6d v = signal_block(out);
    c.gains.push_back(optimal_gains(v));
    c.pairwise.push_back(pairwise_criteria(v, c.gains.back()));
    c.symmetric.push_back(symmetric_criteria(v));
  }
  return c;
}

const char* to_string(SweepKind k) { return k == SweepKind::Pump ? "epsilon" : "chi2"; }

std::vector<ScanPoint> scan_minimum(const SystemParams& base, SweepKind sweep, const std::vector<double>& values,
                                    const std::vector<double>& omega_window) {
  if (omega_window.empty()) throw ValidationError("frequency window is empty");
  std::vector<ScanPoint> out;
  out.reserve(values.size());
  for (double value : values) {
    ScanPoint pt;
    pt.value = value;
    SystemParams p = base;
    (sweep == SweepKind::Pump ? p.epsilon : p.chi2) = value;
    validate(p);

    const auto reg = classify_regime(p);
    if (reg.regime == Regime::WithThreshold && p.epsilon >= reg.eps_c) {
      pt.skipped = true;
      pt.skip_reason = "at-or-above-threshold";
      out.push_back(pt);
      continue;
    }
    CriteriaSpectrum c;
    try {
      c = criteria_spectrum(compute_spectra(p, omega_window));
    } catch (const NumericalError&) {
      pt.skipped = true;
      pt.skip_reason = "not-linearizable";
      out.push_back(pt);
      continue;
    }

    pt.minimum.fill(std::numeric_limits<double>::infinity());
    std::array<std::size_t, 6> at{};
    for (std::size_t n = 0; n < c.omega.size(); ++n) {
      const std::array<double, 6> row{c.pairwise[n].s12, c.pairwise[n].s13, c.pairwise[n].s23,
                                      c.symmetric[n].s123, c.symmetric[n].s312, c.symmetric[n].s231};
      for (int k = 0; k < 6; ++k)
        if (row[k] < pt.minimum[k]) {
          pt.minimum[k] = row[k];
          at[k] = n;
        }
    }
    for (int k = 0; k < 6; ++k) pt.argmin_omega[k] = c.omega[at[k]];
    pt.gain_at_argmin = {c.gains[at[0]].g3, c.gains[at[1]].g2, c.gains[at[2]].g1};
    out.push_back(pt);
  }
  return out;
}

std::vector<std::string> scan_csv_header(SweepKind sweep) {
  std::vector<std::string> h{to_string(sweep), "skipped"};
  for (auto n : kCriteriaNames) h.push_back(std::string("min_") + n);
  for (auto n : kCriteriaNames) h.push_back(std::string("omega_") + n);
  h.insert(h.end(), {"g3_at_s12", "g2_at_s13", "g1_at_s23"});
  return h;
}

void write_scan_csv(std::ostream& os, SweepKind sweep, const std::vector<ScanPoint>& points) {
  const auto header = scan_csv_header(sweep);
  for (std::size_t k = 0; k < header.size(); ++k) os << (k ? "," : "") << header[k];
  os << '\n' << std::setprecision(17);
  for (const auto& pt : points) {
    os << pt.value << ',' << (pt.skipped ? pt.skip_reason : "0");
    if (pt.skipped) {
      for (int k = 0; k < 15; ++k) os << ",nan";
    } else {
      for (double m : pt.minimum) os << ',' << m;
      for (double w : pt.argmin_omega) os << ',' << w;
      for (double g : pt.gain_at_argmin) os << ',' << g;
    }
    os << '\n';
  }
}

std::vector<std::string> criteria_spectrum_csv_header() {
  std::vector<std::string> h{"omega"};
  for (auto n : kCriteriaNames) h.emplace_back(n);
  h.insert(h.end(), {"g1", "g2", "g3"});
  return h;
}

void write_criteria_spectrum_csv(std::ostream& os, const CriteriaSpectrum& c) {
  const auto header = criteria_spectrum_csv_header();
  for (std::size_t k = 0; k < header.size(); ++k) os << (k ? "," : "") << header[k];
  os << '\n' << std::setprecision(17);
  for (std::size_t n = 0; n < c.omega.size(); ++n) {
    os << c.omega[n] << ',' << c.pairwise[n].s12 << ',' << c.pairwise[n].s13 << ',' << c.pairwise[n].s23 << ','
       << c.symmetric[n].s123 << ',' << c.symmetric[n].s312 << ',' << c.symmetric[n].s231 << ',' << c.gains[n].g1
       << ',' << c.gains[n].g2 << ',' << c.gains[n].g3 << '\n';
  }
}

}  // namespace tricav
