#include "tricav/sde.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

#include <boost/random/normal_distribution.hpp>

namespace tricav {

const char* to_string(Representation r) {
  return r == Representation::PositiveP ? "positive-p" : "wigner";
}

Representation representation_from_string(const std::string& s) {
  if (s == "positive-p" || s == "positive_p") return Representation::PositiveP;
  if (s == "wigner" || s == "truncated-wigner") return Representation::TruncatedWigner;
  throw ValidationError("unknown representation '" + s + "' (expected wigner or positive-p)");
}

void validate(const SdeConfig& cfg) {
  if (!(cfg.dt > 0.0 && std::isfinite(cfg.dt))) throw ValidationError("dt must be positive");
  if (!(cfg.t_final > 0.0 && std::isfinite(cfg.t_final))) throw ValidationError("t_final must be positive");
  if (cfg.t_final < cfg.dt) throw ValidationError("t_final must be at least one step");
  if (cfg.n_traj < 1) throw ValidationError("n_traj must be at least 1");
  if (cfg.n_samples < 2) throw ValidationError("n_samples must be at least 2");
  if (!std::isfinite(cfg.divergence_bound)) throw ValidationError("divergence_bound must be finite");
  if (cfg.workers < 1) throw ValidationError("workers must be at least 1");
}

PositivePState step_positive_p(const PositivePState& x, const SystemParams& p, double dt, const NoiseIncrements& dw) {
  using namespace idx;
  const Complex i(0, 1);
  const PositivePState f = positive_p_drift(p, x);
  const Complex down = std::sqrt(p.chi1 * x(b) / 2.0);
  const Complex down_p = std::sqrt(p.chi1 * x(bp) / 2.0);
  const Complex up = std::sqrt(-p.chi2 * x(a2p) / 2.0);
  const Complex up_p = std::sqrt(-p.chi2 * x(a2) / 2.0);

  PositivePState y = x + f * dt;
  y(a1) += down * (dw(0) + i * dw(1));
  y(a1p) += down_p * (dw(2) + i * dw(3));
  y(a3) += down * (dw(0) - i * dw(1)) + up * (dw(4) + i * dw(5));
  y(a3p) += down_p * (dw(2) - i * dw(3)) + up_p * (dw(6) + i * dw(7));
  y(b) += up * (dw(4) - i * dw(5));
  y(bp) += up_p * (dw(6) - i * dw(7));
  return y;
}

WignerState step_wigner(const WignerState& x, const SystemParams& p, double dt, const NoiseIncrements& dw) {
  const auto rates = mean_field_rates(p, x(0), x(1), x(2), x(3));
  const std::array<double, 4> gamma{p.gamma1, p.gamma2, p.gamma3, p.gamma0};
  WignerState y;
  for (int m = 0; m < 4; ++m)
    y(m) = x(m) + rates[m] * dt + std::sqrt(gamma[m] / 2.0) * Complex(dw(2 * m), dw(2 * m + 1));
  return y;
}

Rng trajectory_rng(std::uint64_t seed, std::uint64_t trajectory) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trajectory), static_cast<std::uint32_t>(trajectory >> 32)};
  return Rng(seq);
}

Eigen::VectorXcd sample_initial(Representation rep, int modes, Rng& rng) {
  if (modes < 1) throw ValidationError("mode count must be positive");
  if (rep == Representation::PositiveP) return Eigen::VectorXcd::Zero(2 * modes);
  boost::random::normal_distribution<double> normal;
  Eigen::VectorXcd v(modes);
  for (int m = 0; m < modes; ++m) {
    const double re = normal(rng);
    const double im = normal(rng);
    v(m) = Complex(re, im) / 2.0;
  }
  return v;
}

namespace {

// Raw sums over trajectories at one time sample, in the doubled variables.
struct SampleSums {
  std::array<Complex, 4> amp{};
  std::array<double, 4> amp_re2{};
  std::array<double, 4> amp_im2{};
  std::array<Complex, 4> inten{};
  std::array<double, 4> inten2{};
  std::array<Complex, 6> q{};
  Eigen::Matrix<Complex, 6, 6> qq{Eigen::Matrix<Complex, 6, 6>::Zero()};
  std::array<double, 6> q3{};
  std::array<double, 6> q4{};

  void add(const PositivePState& x) {
    const Complex i(0, 1);
    std::array<Complex, 6> qv;
    for (int m = 0; m < 4; ++m) {
      const Complex a = x(2 * m), ap = x(2 * m + 1);
      amp[m] += a;
      amp_re2[m] += a.real() * a.real();
      amp_im2[m] += a.imag() * a.imag();
      const Complex n = ap * a;
      inten[m] += n;
      inten2[m] += n.real() * n.real();
      if (m < 3) {
        qv[2 * m] = a + ap;
        qv[2 * m + 1] = -i * (a - ap);
      }
    }
    for (int k = 0; k < 6; ++k) {
      q[k] += qv[k];
      for (int l = k; l < 6; ++l) qq(k, l) += qv[k] * qv[l];
      const double r = qv[k].real();
      q3[k] += r * r * r;
      q4[k] += r * r * r * r;
    }
  }

  void merge(const SampleSums& o) {
    for (int m = 0; m < 4; ++m) {
      amp[m] += o.amp[m];
      amp_re2[m] += o.amp_re2[m];
      amp_im2[m] += o.amp_im2[m];
      inten[m] += o.inten[m];
      inten2[m] += o.inten2[m];
    }
    for (int k = 0; k < 6; ++k) {
      q[k] += o.q[k];
      q3[k] += o.q3[k];
      q4[k] += o.q4[k];
    }
    qq += o.qq;
  }
};

struct BlockSums {
  std::vector<SampleSums> samples;
  std::size_t used{};
  std::size_t divergent{};

  void merge(const BlockSums& o) {
    for (std::size_t k = 0; k < samples.size(); ++k) samples[k].merge(o.samples[k]);
    used += o.used;
    divergent += o.divergent;
  }
};

PositivePState doubled(const WignerState& w) {
  PositivePState x;
  for (int m = 0; m < 4; ++m) {
    x(2 * m) = w(m);
    x(2 * m + 1) = std::conj(w(m));
  }
  return x;
}

bool escaped(const PositivePState& x, double bound2) {
  // Also true for NaN entries.
  return !(x.cwiseAbs2().maxCoeff() <= bound2);
}

// Plain: one draw per increment. Coarse and Fine draw the same two
// half-step increments per step; Coarse takes one step with their sum, Fine
// takes two half steps, so the pair shares its Brownian path.
enum class Stepping { Plain, Coarse, Fine };

class Integrator {
 public:
  Integrator(const SystemParams& p, const SdeConfig& cfg, double bound, Stepping mode = Stepping::Plain)
      : p_(p), cfg_(cfg), bound2_(bound * bound), mode_(mode) {
    n_steps_ = static_cast<std::size_t>(std::llround(cfg.t_final / cfg.dt));
    sample_steps_.resize(cfg.n_samples);
    for (std::size_t k = 0; k < cfg.n_samples; ++k)
      sample_steps_[k] = static_cast<std::size_t>(
          std::llround(static_cast<double>(k) * static_cast<double>(n_steps_) / (cfg.n_samples - 1)));
  }

  std::size_t n_steps() const { return n_steps_; }
  const std::vector<std::size_t>& sample_steps() const { return sample_steps_; }

  // Integrates trajectory `traj`; returns false if it diverged.
  bool run(std::uint64_t traj, std::vector<PositivePState>& record) const {
    Rng rng = trajectory_rng(cfg_.seed, traj);
    boost::random::normal_distribution<double> normal;
    const double sdt = std::sqrt(cfg_.dt);
    NoiseIncrements dw;
    record.resize(sample_steps_.size());

    const bool wigner = cfg_.representation == Representation::TruncatedWigner;
    WignerState w;
    PositivePState x;
    if (wigner) {
      w = sample_initial(Representation::TruncatedWigner, 4, rng);
      x = doubled(w);
    } else {
      x.setZero();
    }

    auto advance = [&](double h, const NoiseIncrements& inc) {
      if (wigner) {
        w = step_wigner(w, p_, h, inc);
        x = doubled(w);
      } else {
        x = step_positive_p(x, p_, h, inc);
      }
    };
    const double half_sdt = std::sqrt(cfg_.dt / 2);
    NoiseIncrements dw2;

    std::size_t next = 0;
    for (std::size_t step = 0;; ++step) {
      while (next < sample_steps_.size() && sample_steps_[next] == step) record[next++] = x;
      if (step == n_steps_) break;
      if (mode_ == Stepping::Plain) {
        for (int k = 0; k < 8; ++k) dw(k) = sdt * normal(rng);
        advance(cfg_.dt, dw);
      } else {
        for (int k = 0; k < 8; ++k) dw(k) = half_sdt * normal(rng);
        for (int k = 0; k < 8; ++k) dw2(k) = half_sdt * normal(rng);
        if (mode_ == Stepping::Coarse) {
          advance(cfg_.dt, dw + dw2);
        } else {
          advance(cfg_.dt / 2, dw);
          if (escaped(x, bound2_)) return false;
          advance(cfg_.dt / 2, dw2);
        }
      }
      if (escaped(x, bound2_)) return false;
    }
    return true;
  }

 private:
  SystemParams p_;
  SdeConfig cfg_;
  double bound2_;
  Stepping mode_;
  std::size_t n_steps_{};
  std::vector<std::size_t> sample_steps_;
};

// Trajectories are grouped in fixed blocks; block sums are merged in block
// order so the reduction does not depend on the worker count.
constexpr std::size_t kBlockSize = 256;

BlockSums run_block(const Integrator& integ, std::size_t n_samples, std::size_t first, std::size_t last) {
  BlockSums sums;
  sums.samples.resize(n_samples);
  std::vector<PositivePState> record;
  for (std::size_t t = first; t < last; ++t) {
    if (!integ.run(t, record)) {
      ++sums.divergent;
      continue;
    }
    ++sums.used;
    for (std::size_t k = 0; k < n_samples; ++k) sums.samples[k].add(record[k]);
  }
  return sums;
}

MomentSample finalize(const SampleSums& s, std::size_t n, double time, Representation rep) {
  MomentSample out;
  out.time = time;
  const double N = static_cast<double>(n);
  const bool wigner = rep == Representation::TruncatedWigner;
  for (int m = 0; m < 4; ++m) {
    out.mean[m] = s.amp[m] / N;
    const double var_re = std::max(0.0, s.amp_re2[m] / N - out.mean[m].real() * out.mean[m].real());
    const double var_im = std::max(0.0, s.amp_im2[m] / N - out.mean[m].imag() * out.mean[m].imag());
    out.mean_se[m] = std::sqrt((var_re + var_im) / N);
    const double mean_n = (s.inten[m] / N).real();
    out.intensity[m] = wigner ? mean_n - 0.5 : mean_n;
    out.intensity_se[m] = std::sqrt(std::max(0.0, s.inten2[m] / N - mean_n * mean_n) / N);
  }
  std::array<Complex, 6> mu;
  for (int k = 0; k < 6; ++k) {
    mu[k] = s.q[k] / N;
    out.quad_mean(k) = mu[k].real();
  }
  for (int k = 0; k < 6; ++k) {
    for (int l = k; l < 6; ++l) {
      const double c = (s.qq(k, l) / N - mu[k] * mu[l]).real();
      out.quad_cov(k, l) = out.quad_cov(l, k) = c;
    }
    if (!wigner) out.quad_cov(k, k) += 1.0;
    // Central fourth moment of the real part for the variance error.
    const double m1 = s.q[k].real() / N, m2 = s.qq(k, k).real() / N, m3 = s.q3[k] / N, m4 = s.q4[k] / N;
    const double var = m2 - m1 * m1;
    const double c4 = m4 - 4 * m1 * m3 + 6 * m1 * m1 * m2 - 3 * m1 * m1 * m1 * m1;
    out.quad_var_se(k) = std::sqrt(std::max(0.0, c4 - var * var) / N);
  }
  out.vijk = symmetric_criteria(out.quad_cov);
  return out;
}

double default_bound(const SystemParams& p) {
  const auto s = steady_state(p);
  const double largest = std::max({1.0, std::abs(s.beta), std::abs(s.alpha1), std::abs(s.alpha2),
                                   std::abs(s.alpha3), p.epsilon / p.gamma0});
  return 1e3 * largest;
}

EnsembleMoments ensemble(const SystemParams& p, const SdeConfig& cfg, Stepping mode) {
  validate(p);
  validate(cfg);
  const double bound = cfg.divergence_bound > 0 ? cfg.divergence_bound : default_bound(p);
  const Integrator integ(p, cfg, bound, mode);
  const std::size_t n_blocks = (cfg.n_traj + kBlockSize - 1) / kBlockSize;
  auto block_range = [&](std::size_t b) {
    return std::pair{b * kBlockSize, std::min(cfg.n_traj, (b + 1) * kBlockSize)};
  };

  BlockSums total;
  total.samples.resize(cfg.n_samples);
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(cfg.workers, n_blocks));
  if (workers <= 1) {
    for (std::size_t b = 0; b < n_blocks; ++b) {
      const auto [first, last] = block_range(b);
      total.merge(run_block(integ, cfg.n_samples, first, last));
    }
  } else {
    std::atomic<std::size_t> next_block{0};
    std::mutex mu;
    std::condition_variable ready;
    std::map<std::size_t, BlockSums> done;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t b; (b = next_block.fetch_add(1)) < n_blocks;) {
          const auto [first, last] = block_range(b);
          BlockSums sums = run_block(integ, cfg.n_samples, first, last);
          {
            std::lock_guard lock(mu);
            done.emplace(b, std::move(sums));
          }
          ready.notify_one();
        }
      });
    }
    for (std::size_t b = 0; b < n_blocks; ++b) {
      std::unique_lock lock(mu);
      ready.wait(lock, [&] { return done.count(b) > 0; });
      BlockSums sums = std::move(done.at(b));
      done.erase(b);
      lock.unlock();
      total.merge(sums);
    }
    for (auto& t : pool) t.join();
  }

  EnsembleMoments m;
  m.representation = cfg.representation;
  m.n_traj = cfg.n_traj;
  m.n_used = total.used;
  m.n_divergent = total.divergent;
  m.divergence_bound = bound;
  m.reliable = static_cast<double>(m.n_divergent) <= 0.01 * static_cast<double>(cfg.n_traj) && m.n_used > 0;
  if (m.n_used == 0) return m;
  m.samples.reserve(cfg.n_samples);
  for (std::size_t k = 0; k < cfg.n_samples; ++k)
    m.samples.push_back(finalize(total.samples[k], m.n_used,
                                 static_cast<double>(integ.sample_steps()[k]) * cfg.dt, cfg.representation));
  return m;
}

}  // namespace

EnsembleMoments run_ensemble(const SystemParams& p, const SdeConfig& cfg) {
  return ensemble(p, cfg, Stepping::Plain);
}

RichardsonReport richardson_check(const SystemParams& p, const SdeConfig& cfg) {
  RichardsonReport r;
  r.coarse = ensemble(p, cfg, Stepping::Coarse);
  r.fine = ensemble(p, cfg, Stepping::Fine);
  if (r.coarse.samples.empty() || r.fine.samples.empty()) return r;
  for (std::size_t k = 0; k < r.coarse.samples.size(); ++k)
    for (int m = 0; m < 4; ++m) {
      const double a = r.coarse.samples[k].intensity[m], b = r.fine.samples[k].intensity[m];
      r.max_intensity_diff[m] = std::max(r.max_intensity_diff[m], std::abs(a - b));
    }
  return r;
}

std::vector<SymmetricCriteria> vijk_timeseries(const EnsembleMoments& m) {
  std::vector<SymmetricCriteria> v;
  v.reserve(m.samples.size());
  for (const auto& s : m.samples) v.push_back(symmetric_criteria(s.quad_cov));
  return v;
}

MomentSample time_average(const EnsembleMoments& m, double t_from) {
  MomentSample avg;
  std::size_t count = 0;
  for (const auto& s : m.samples) {
    if (s.time < t_from) continue;
    ++count;
    avg.time += s.time;
    for (int k = 0; k < 4; ++k) {
      avg.mean[k] += s.mean[k];
      avg.mean_se[k] += s.mean_se[k];
      avg.intensity[k] += s.intensity[k];
      avg.intensity_se[k] += s.intensity_se[k];
    }
    avg.quad_mean += s.quad_mean;
    avg.quad_cov += s.quad_cov;
    avg.quad_var_se += s.quad_var_se;
  }
  if (count == 0) throw ValidationError("no samples in the averaging window");
  const double c = static_cast<double>(count);
  avg.time /= c;
  for (int k = 0; k < 4; ++k) {
    avg.mean[k] /= c;
    avg.mean_se[k] /= c;
    avg.intensity[k] /= c;
    avg.intensity_se[k] /= c;
  }
  avg.quad_mean /= c;
  avg.quad_cov /= c;
  avg.quad_var_se /= c;
  avg.vijk = symmetric_criteria(avg.quad_cov);
  return avg;
}

std::vector<std::string> moments_csv_header() {
  static const char* q[6] = {"X1", "Y1", "X2", "Y2", "X3", "Y3"};
  std::vector<std::string> h{"time"};
  for (auto n : kModeNames) {
    h.push_back(std::string("re_") + n);
    h.push_back(std::string("im_") + n);
  }
  for (auto n : kModeNames) h.push_back(std::string("n_") + n);
  for (auto n : kModeNames) h.push_back(std::string("se_n_") + n);
  for (int i = 0; i < 6; ++i)
    for (int j = i; j < 6; ++j) h.push_back(std::string("V_") + q[i] + "_" + q[j]);
  h.insert(h.end(), {"v123", "v312", "v231", "divergent"});
  return h;
}

void write_moments_csv(std::ostream& os, const EnsembleMoments& m) {
  const auto header = moments_csv_header();
  for (std::size_t k = 0; k < header.size(); ++k) os << (k ? "," : "") << header[k];
  os << '\n' << std::setprecision(17);
  for (const auto& s : m.samples) {
    os << s.time;
    for (const auto& a : s.mean) os << ',' << a.real() << ',' << a.imag();
    for (double n : s.intensity) os << ',' << n;
    for (double e : s.intensity_se) os << ',' << e;
    for (int i = 0; i < 6; ++i)
      for (int j = i; j < 6; ++j) os << ',' << s.quad_cov(i, j);
    os << ',' << s.vijk.s123 << ',' << s.vijk.s312 << ',' << s.vijk.s231 << ',' << m.n_divergent << '\n';
  }
}

}  // namespace tricav
