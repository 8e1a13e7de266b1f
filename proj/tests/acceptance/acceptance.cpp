// Acceptance suite: one PASS/FAIL line per criterion, followed by indented
// detail lines. Exits 0 once every criterion has been evaluated; with
// --strict the exit code is 1 if any criterion failed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "tricav/criteria.hpp"
#include "tricav/model.hpp"
#include "tricav/sde.hpp"
#include "tricav/spectra.hpp"
#include "tricav/stability.hpp"

using namespace tricav;

namespace {

struct Verdict {
  bool pass{false};
  std::string summary;
  std::vector<std::string> details;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

SystemParams at_fraction(double frac) {
  auto p = reference_params();
  p.epsilon = frac * classify_regime(p).eps_c;
  return p;
}

unsigned workers() { return std::max(1u, std::thread::hardware_concurrency()); }

// Paper table, analytic and Wigner columns: |beta|^2, |a1|^2, |a2|^2, |a3|^2.
constexpr std::array<double, 4> kTableAnalytic{1.056e4, 5.0143e3, 89.1424, 4.7468e3};
constexpr std::array<double, 4> kTableWigner{1.056e4, 5.0141e3, 89.0909, 4.7471e3};
const std::array<const char*, 4> kTableNames{"|beta|^2", "|a1|^2", "|a2|^2", "|a3|^2"};

double round_sig(double v, int figs) {
  if (v == 0) return 0;
  const double scale = std::pow(10.0, figs - 1 - static_cast<int>(std::floor(std::log10(std::abs(v)))));
  return std::round(v * scale) / scale;
}

// ---------------------------------------------------------------------------

Verdict criterion_threshold_formula() {
  using Big = boost::multiprecision::cpp_bin_float_50;
  const auto p = reference_params();
  const Big g0 = p.gamma0, g1 = p.gamma1, g2 = p.gamma2, g3 = p.gamma3, c1 = p.chi1, c2 = p.chi2;
  const Big exact = g0 * sqrt(g3) / sqrt(c1 * c1 / g1 - c2 * c2 / g2);
  const double eps_c = classify_regime(p).eps_c;
  const double rel = static_cast<double>(abs((Big(eps_c) - exact) / exact));
  Verdict v;
  v.pass = rel <= 1e-12 && std::abs(eps_c - 102.778) < 5e-4;
  v.summary = fmt("eps_c = %.12f, relative error vs 50-digit evaluation %.2e (tol 1e-12)", eps_c, rel);
  return v;
}

Verdict criterion_intensity_table() {
  const auto s = steady_state(at_fraction(1.5));
  const std::array<double, 4> n{std::norm(s.beta), std::norm(s.alpha1), std::norm(s.alpha2), std::norm(s.alpha3)};
  Verdict v;
  v.pass = true;
  for (int k = 0; k < 4; ++k) {
    const bool ok = round_sig(n[k], 4) == round_sig(kTableAnalytic[k], 4);
    v.pass = v.pass && ok;
    v.details.push_back(fmt("%-9s computed %.6g, table %.6g, 4 s.f. %s", kTableNames[k], n[k], kTableAnalytic[k],
                            ok ? "agree" : "DIFFER"));
  }
  v.summary = "steady state at 1.5 eps_c vs the intensity table to 4 significant figures";
  return v;
}

EnsembleMoments& wigner_above() {
  static std::optional<EnsembleMoments> m;
  if (!m) {
    SdeConfig cfg;
    cfg.representation = Representation::TruncatedWigner;
    cfg.n_traj = 10000;
    cfg.t_final = 40.0;
    cfg.dt = 1e-3;
    cfg.n_samples = 401;
    cfg.seed = 2024;
    cfg.workers = workers();
    m = run_ensemble(at_fraction(1.5), cfg);
  }
  return *m;
}

Verdict criterion_wigner_table() {
  const auto& m = wigner_above();
  const auto avg = time_average(m, 20.0);
  // intensity order in the ensemble: a1, a2, a3, b
  const std::array<double, 4> n{avg.intensity[3], avg.intensity[0], avg.intensity[1], avg.intensity[2]};
  const std::array<double, 4> se{avg.intensity_se[3], avg.intensity_se[0], avg.intensity_se[1], avg.intensity_se[2]};
  Verdict v;
  v.pass = m.reliable;
  double worst = 0;
  for (int k = 0; k < 4; ++k) {
    const double rel = std::abs(n[k] - kTableAnalytic[k]) / kTableAnalytic[k];
    const double rel_w = std::abs(n[k] - kTableWigner[k]) / kTableWigner[k];
    worst = std::max(worst, rel);
    v.pass = v.pass && rel <= 0.02;
    v.details.push_back(fmt("%-9s Wigner %.6g (SE %.2g), analytic %.6g (%.2f%%), published Wigner %.6g (%.2f%%)",
                            kTableNames[k], n[k], se[k], kTableAnalytic[k], 100 * rel, kTableWigner[k], 100 * rel_w));
  }
  v.details.push_back(fmt("n_traj %zu, %zu divergent, dt 1e-3, t_final 40, average over t >= 20", m.n_traj,
                          m.n_divergent));
  v.summary = fmt("truncated Wigner intensities at 1.5 eps_c, worst deviation %.2f%% (tol 2%%)", 100 * worst);
  return v;
}

Verdict criterion_equal_loss() {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0;
  int complex_cases = 0;
  for (int n = 0; n < 100; ++n) {
    SystemParams p{1.0, 1.0, 1.0, 1.0, 0.005 + 0.015 * u(rng), 0.0, 0.0};
    p.chi2 = 2.0 * p.chi1 * u(rng);
    const auto reg = classify_regime(p);
    p.epsilon = reg.regime == Regime::WithThreshold ? 0.98 * u(rng) * reg.eps_c : 3.0 * u(rng) * reg.eps_c_opo;
    if (p.chi2 > p.chi1) ++complex_cases;
    const auto report = eigen_analysis(build_matrices(p, steady_state(p)));
    worst = std::max(worst, multiset_distance(report.eigenvalues, equal_loss_eigenvalues(p, p.epsilon)));
  }
  Verdict v;
  v.pass = worst <= 1e-10;
  v.summary = fmt("equal-loss closed form vs 8x8 eigensolver, 100 draws, max distance %.2e (tol 1e-10)", worst);
  v.details.push_back(fmt("%d of 100 draws with chi2 > chi1 (complex pairs)", complex_cases));
  return v;
}

SystemParams random_below_threshold(std::mt19937_64& rng, double max_fraction) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SystemParams p{0.5 + 1.5 * u(rng), 1.0, 0.5 + 3.5 * u(rng), 0.5 + 1.5 * u(rng), 0.005 + 0.015 * u(rng), 0.0, 0.0};
  p.chi2 = 2.0 * p.chi1 * std::sqrt(p.gamma2 / p.gamma1) * u(rng);
  const auto reg = classify_regime(p);
  p.epsilon = reg.regime == Regime::WithThreshold ? max_fraction * u(rng) * reg.eps_c : 3.0 * u(rng) * reg.eps_c_opo;
  return p;
}

Verdict criterion_characteristic_polynomial() {
  std::mt19937_64 rng(5);
  double worst = 0;
  for (int n = 0; n < 100; ++n) {
    const auto p = random_below_threshold(rng, 0.98);
    const auto report = eigen_analysis(build_matrices(p, steady_state(p)));
    worst = std::max(worst, multiset_distance(report.eigenvalues, characteristic_roots(p, p.epsilon)));
  }
  Verdict v;
  v.pass = worst <= 1e-8;
  v.summary = fmt("eigenvalues vs characteristic-polynomial roots, 100 draws, max distance %.2e (tol 1e-8)", worst);
  return v;
}

Verdict criterion_stable_below_threshold() {
  std::mt19937_64 rng(6);
  int stable = 0, threshold_regime = 0;
  double least = 1e300;
  for (int n = 0; n < 1000; ++n) {
    const auto p = random_below_threshold(rng, 0.999);
    if (classify_regime(p).regime == Regime::WithThreshold) ++threshold_regime;
    const auto cell = stability_map(p, {p.chi2}, {p.epsilon}).front();
    if (cell.cls == StabilityClass::BelowThresholdStable || cell.cls == StabilityClass::NoThresholdStable) ++stable;
    least = std::min(least, cell.min_real_part);
  }
  Verdict v;
  v.pass = stable == 1000;
  v.summary = fmt("%d of 1000 random below-threshold draws classified stable", stable);
  v.details.push_back(fmt("losses, chi1, chi2 and eps all drawn; %d draws in the threshold regime, smallest min "
                          "Re(lambda) %.3g",
                          threshold_regime, least));

  // Same count with the reference losses held fixed.
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int stable_ref = 0;
  for (int n = 0; n < 1000; ++n) {
    auto p = reference_params();
    p.chi1 = 0.005 + 0.015 * u(rng);
    p.chi2 = 2.0 * p.chi1 * std::sqrt(p.gamma2 / p.gamma1) * u(rng);
    const auto reg = classify_regime(p);
    p.epsilon = reg.regime == Regime::WithThreshold ? 0.999 * u(rng) * reg.eps_c : 3.0 * u(rng) * reg.eps_c_opo;
    const auto cell = stability_map(p, {p.chi2}, {p.epsilon}).front();
    stable_ref += cell.cls == StabilityClass::BelowThresholdStable || cell.cls == StabilityClass::NoThresholdStable;
  }
  v.details.push_back(fmt("reference losses (gamma 1, 1, 3, 1), chi1, chi2, eps drawn: %d of 1000 stable", stable_ref));
  return v;
}

struct Band {
  double lo{NAN}, hi{NAN};
  bool empty() const { return std::isnan(lo); }
};

// Widest contiguous run of grid points where f(n) < 4.
Band widest_band(const std::vector<double>& omega, const std::function<double(std::size_t)>& f) {
  Band best;
  std::size_t start = 0;
  bool inside = false;
  for (std::size_t n = 0; n <= omega.size(); ++n) {
    const bool below = n < omega.size() && f(n) < kInseparabilityBound;
    if (below && !inside) start = n, inside = true;
    if (!below && inside) {
      inside = false;
      if (best.empty() || omega[n - 1] - omega[start] > best.hi - best.lo) best = {omega[start], omega[n - 1]};
    }
  }
  return best;
}

Verdict criterion_entanglement_checks() {
  const auto reg = classify_regime(reference_params());
  const auto window = default_omega_grid(reference_params());
  Verdict v;
  bool all = true;
  auto sub = [&](const std::string& name, bool ok, const std::string& what) {
    all = all && ok;
    v.details.push_back(fmt("[%s] %-28s %s", ok ? "pass" : "FAIL", name.c_str(), what.c_str()));
  };

  {
    const auto c = criteria_spectrum(compute_spectra(at_fraction(0.5), window));
    double m123 = 1e300, m312 = 1e300;
    for (const auto& s : c.symmetric) m123 = std::min(m123, s.s123), m312 = std::min(m312, s.s312);
    sub("0.5 eps_c: min s123, s312", m123 < 4 && m312 < 4, fmt("min s123 %.4f, min s312 %.4f", m123, m312));
    const auto b12 = widest_band(c.omega, [&](std::size_t n) { return c.pairwise[n].s12; });
    const auto b13 = widest_band(c.omega, [&](std::size_t n) { return c.pairwise[n].s13; });
    sub("0.5 eps_c: s12, s13 bands", !b12.empty() && !b13.empty(),
        fmt("s12 < 4 on [%.2f, %.2f], s13 < 4 on [%.2f, %.2f]", b12.lo, b12.hi, b13.lo, b13.hi));
  }
  {
    const auto c = criteria_spectrum(compute_spectra(at_fraction(0.9), window));
    const auto& s0 = c.symmetric.front();
    const auto& p0 = c.pairwise.front();
    const bool zero_clear = symmetric_violations(s0) == 0 && !fully_inseparable(p0, s0);
    double first = NAN;
    for (std::size_t n = 1; n < c.omega.size() && std::isnan(first); ++n)
      if (fully_inseparable(c.pairwise[n], c.symmetric[n])) first = c.omega[n];
    sub("0.9 eps_c: not at omega = 0", zero_clear,
        fmt("at omega 0: s123 %.3f s312 %.3f s231 %.3f; s12 %.3f s13 %.3f s23 %.3f", s0.s123, s0.s312, s0.s231,
            p0.s12, p0.s13, p0.s23));
    sub("0.9 eps_c: away from omega = 0", !std::isnan(first),
        fmt("full inseparability first certified at omega %.2f", first));
  }
  {
    std::vector<double> pumps;
    for (int k = 1; k <= 19; ++k) pumps.push_back(0.05 * k * reg.eps_c);
    const auto wide = scan_minimum(reference_params(), SweepKind::Pump, pumps, window);
    const auto narrow = scan_minimum(reference_params(), SweepKind::Pump, pumps, linear_grid(0.0, 1.0, 101));
    double min231 = 1e300, at = NAN, min231_narrow = 1e300;
    bool falling = true;
    double prev123 = 1e300;
    bool violate_others = true;
    for (std::size_t k = 0; k < wide.size(); ++k) {
      if (wide[k].minimum[5] < min231) min231 = wide[k].minimum[5], at = wide[k].argmin_omega[5];
      min231_narrow = std::min(min231_narrow, narrow[k].minimum[5]);
      falling = falling && wide[k].minimum[3] <= prev123;
      prev123 = wide[k].minimum[3];
      violate_others = violate_others && wide[k].minimum[3] < 4 && wide[k].minimum[4] < 4;
    }
    sub("pump sweep: s231 >= 4", min231 >= 4,
        fmt("min over 0.05..0.95 eps_c and omega in [0, 10]: %.5f at omega %.2f", min231, at));
    v.details.push_back(fmt("       (omega in [0, 1] only: min s231 %.5f)", min231_narrow));
    sub("pump sweep: s123, s312 < 4", violate_others && falling, "s123 and s312 below 4, s123 non-increasing");
  }
  {
    auto base = reference_params();
    base.epsilon = 0.5 * reg.eps_c_opo;
    std::vector<double> chi2;
    for (int k = 0; k <= 30; ++k) chi2.push_back((1.0 + 0.1 * k) * reg.chi2_crit);
    const auto pts = scan_minimum(base, SweepKind::Chi2, chi2, window);
    std::size_t best = 0;
    for (std::size_t k = 0; k < pts.size(); ++k)
      if (!pts[k].skipped && pts[k].minimum[3] < pts[best].minimum[3]) best = k;
    sub("chi2 sweep 0.5 eps_c_opo", best == 0 && !pts[0].skipped,
        fmt("argmin s123 at %.2f chi2_crit (grid step 0.1): %.4f there, %.4f at chi2_crit", chi2[best] / reg.chi2_crit,
            pts[best].minimum[3], pts[0].minimum[3]));

    base.epsilon = 0.9 * reg.eps_c_opo;
    const auto pts9 = scan_minimum(base, SweepKind::Chi2, chi2, window);
    std::size_t best9 = 0;
    for (std::size_t k = 0; k < pts9.size(); ++k)
      if (!pts9[k].skipped && pts9[k].minimum[3] < pts9[best9].minimum[3]) best9 = k;
    v.details.push_back(fmt("       (0.9 eps_c_opo: argmin s123 at %.2f chi2_crit)", chi2[best9] / reg.chi2_crit));
  }
  v.pass = all;
  v.summary = "qualitative entanglement checks (all sub-checks must pass)";
  return v;
}

Verdict criterion_vacuum() {
  const auto p = reference_params();  // epsilon = 0
  const auto spectra = compute_spectra(p, default_omega_grid(p));
  const auto c = criteria_spectrum(spectra);
  double worst_criteria = 0, worst_diag = 0;
  for (std::size_t n = 0; n < c.omega.size(); ++n) {
    for (double s : {c.pairwise[n].s12, c.pairwise[n].s13, c.pairwise[n].s23, c.symmetric[n].s123,
                     c.symmetric[n].s312, c.symmetric[n].s231})
      worst_criteria = std::max(worst_criteria, std::abs(s - 4.0));
    for (int k = 0; k < 8; ++k) worst_diag = std::max(worst_diag, std::abs(spectra.quad_out[n](k, k) - 1.0));
  }
  Verdict v;
  v.pass = worst_criteria <= 1e-10 && worst_diag <= 1e-10;
  v.summary = fmt("eps = 0: max |s - 4| %.1e, max |S_out,ii - 1| %.1e (tol 1e-10)", worst_criteria, worst_diag);
  return v;
}

Verdict criterion_linear_consistency() {
  const auto p = at_fraction(0.5);
  SdeConfig cfg;
  cfg.representation = Representation::TruncatedWigner;
  cfg.n_traj = 10000;
  cfg.t_final = 30.0;
  cfg.dt = 1e-3;
  cfg.n_samples = 301;
  cfg.seed = 99;
  cfg.workers = workers();
  const auto m = run_ensemble(p, cfg);
  const auto avg = time_average(m, 10.0);

  const Mat8d lin = quadrature_transform(intracavity_covariance(build_matrices(p, steady_state(p))));
  static const char* names[6] = {"X1", "Y1", "X2", "Y2", "X3", "Y3"};
  Verdict v;
  v.pass = m.reliable;
  double worst = 0;
  for (int k = 0; k < 6; ++k) {
    const double expected = 1.0 + lin(k, k);
    const double diff = std::abs(avg.quad_cov(k, k) - expected);
    const double tol = std::max(0.05 * expected, 3.0 * avg.quad_var_se(k));
    worst = std::max(worst, diff / tol);
    v.pass = v.pass && diff <= tol;
    v.details.push_back(fmt("V(%s) Wigner %.4f (SE %.4f), linearized %.4f, |diff| %.4f, tol %.4f", names[k],
                            avg.quad_cov(k, k), avg.quad_var_se(k), expected, diff, tol));
  }
  v.details.push_back(fmt("n_traj %zu, dt 1e-3, t_final 30, average over t >= 10", m.n_traj));
  v.summary = fmt("Wigner vs linearized intracavity variances at 0.5 eps_c, worst |diff|/tol %.2f", worst);
  return v;
}

Verdict criterion_transient() {
  const auto& m = wigner_above();
  double transient_min = 1e300, transient_at = NAN, steady_min = 1e300, worst_mean = 0, worst_frac = 0;
  for (const auto& s : m.samples) {
    const double lowest = std::min({s.vijk.s123, s.vijk.s312, s.vijk.s231});
    if (s.time <= 5.0 && lowest < transient_min) transient_min = lowest, transient_at = s.time;
    if (s.time >= 20.0) {
      steady_min = std::min(steady_min, lowest);
      for (int j = 0; j < 3; ++j) {
        worst_mean = std::max(worst_mean, std::abs(s.mean[j]) / s.mean_se[j]);
        worst_frac = std::max(worst_frac, std::abs(s.mean[j]) / std::sqrt(s.intensity[j]));
      }
    }
  }
  Verdict v;
  v.pass = m.reliable && transient_min < 4 && steady_min > 4 && worst_mean <= 4.0 && worst_frac <= 0.05;
  v.summary = fmt("min V_ijk %.3f at t = %.1f (t <= 5), min V_ijk %.1f for t >= 20", transient_min, transient_at,
                  steady_min);
  v.details.push_back(fmt("signal means for t >= 20: max |<a_j>| / SE %.2f (tol 4), max |<a_j>| / sqrt(<n_j>) %.4f",
                          worst_mean, worst_frac));
  return v;
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;  // 0: no numeric budget
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  bool strict = false;
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--strict")
      strict = true;
    else if (a == "--only" && i + 1 < argc)
      for (std::istringstream is(argv[++i]); is;) {
        int id;
        if (is >> id) only.insert(id);
        is.ignore(1);
      }
    else {
      std::fprintf(stderr, "usage: %s [--strict] [--only 1,2,...]\n", argv[0]);
      return 2;
    }
  }

  const std::vector<Criterion> criteria{
      {1, "threshold formula", 1.0, criterion_threshold_formula},
      {2, "intensity table", 1.0, criterion_intensity_table},
      {3, "Wigner intensity table", 0.0, criterion_wigner_table},
      {4, "equal-loss eigenvalues", 10.0, criterion_equal_loss},
      {5, "characteristic polynomial", 10.0, criterion_characteristic_polynomial},
      {6, "stable below threshold", 30.0, criterion_stable_below_threshold},
      {7, "entanglement checks", 120.0, criterion_entanglement_checks},
      {8, "vacuum normalization", 1.0, criterion_vacuum},
      {9, "SDE vs linear theory", 0.0, criterion_linear_consistency},
      {10, "transient entanglement", 0.0, criterion_transient},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.pass = false;
      v.summary = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.budget_s <= 0 || secs <= c.budget_s;
    const bool pass = v.pass && in_time;
    failed += !pass;
    std::printf("criterion %2d %s  %-26s %s [%.2f s%s]\n", c.id, pass ? "PASS" : "FAIL", c.name, v.summary.c_str(),
                secs, in_time ? "" : fmt(", over %.0f s budget", c.budget_s).c_str());
    for (const auto& d : v.details) std::printf("    %s\n", d.c_str());
    std::fflush(stdout);
  }
  std::printf("%d criterion(s) failed\n", failed);
  return strict && failed ? 1 : 0;
}
