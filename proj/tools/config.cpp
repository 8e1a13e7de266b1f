#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "tricav/spectra.hpp"

namespace tricav::cli {

namespace {

// Empty default: the key is optional and has no value unless given.
const ConfigMap& defaults() {
  static const ConfigMap d{
      {"params.gamma0", "1"},
      {"params.gamma1", "1"},
      {"params.gamma2", "3"},
      {"params.gamma3", "1"},
      {"params.chi1", "0.01"},
      {"params.chi2", ""},
      {"params.chi2_over_chi1", ""},
      {"params.epsilon", ""},
      {"params.epsilon_over_eps_c", ""},
      {"params.epsilon_over_eps_c_opo", ""},
      {"map.chi2_min", "0"},
      {"map.chi2_max", "0.03"},
      {"map.chi2_points", "61"},
      {"map.eps_min", "0"},
      {"map.eps_max", "300"},
      {"map.eps_points", "61"},
      {"map.tolerance", "1e-9"},
      {"spectrum.omega_min", "0"},
      {"spectrum.omega_max", ""},
      {"spectrum.omega_points", "1001"},
      {"scan.sweep", "pump"},
      {"scan.units", ""},
      {"scan.from", "0.05"},
      {"scan.to", "0.95"},
      {"scan.points", "19"},
      {"scan.omega_min", "0"},
      {"scan.omega_max", ""},
      {"scan.omega_points", "1001"},
      {"sde.representation", "wigner"},
      {"sde.dt", "1e-3"},
      {"sde.t_final", "40"},
      {"sde.n_traj", "10000"},
      {"sde.seed", "1"},
      {"sde.n_samples", "401"},
      {"sde.divergence_bound", "0"},
      {"sde.workers", "0"},
      {"sde.richardson", "false"},
  };
  return d;
}

void check_known(const std::string& key) {
  if (!defaults().count(key)) throw ValidationError("unknown configuration key '" + key + "'");
}

class Reader {
 public:
  explicit Reader(const ConfigMap& m) : m_(m) {}

  bool has(const std::string& key) const { return !m_.at(key).empty(); }

  double real(const std::string& key) const {
    const std::string& s = m_.at(key);
    double v{};
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v))
      throw ValidationError(key + ": expected a finite number, got '" + s + "'");
    return v;
  }

  std::uint64_t count(const std::string& key, std::uint64_t min) const {
    const std::string& s = m_.at(key);
    std::uint64_t v{};
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size())
      throw ValidationError(key + ": expected a non-negative integer, got '" + s + "'");
    if (v < min) throw ValidationError(key + " must be at least " + std::to_string(min));
    return v;
  }

  int points(const std::string& key) const {
    const auto v = count(key, 1);
    if (v > 10'000'000) throw ValidationError(key + " is too large");
    return static_cast<int>(v);
  }

  bool flag(const std::string& key) const {
    const std::string& s = m_.at(key);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ValidationError(key + ": expected true or false, got '" + s + "'");
  }

  const std::string& text(const std::string& key) const { return m_.at(key); }

 private:
  const ConfigMap& m_;
};

int count_given(const Reader& r, std::initializer_list<const char*> keys) {
  return static_cast<int>(std::count_if(keys.begin(), keys.end(), [&](const char* k) { return r.has(k); }));
}

std::vector<double> omega_window(const Reader& r, const std::string& section, const SystemParams& p) {
  const double hi = r.has(section + ".omega_max") ? r.real(section + ".omega_max") : 10.0 * p.gamma0;
  const double lo = r.real(section + ".omega_min");
  if (!(lo >= 0 && hi >= lo)) throw ValidationError(section + ": need 0 <= omega_min <= omega_max");
  return linear_grid(lo, hi, r.points(section + ".omega_points"));
}

void resolve_map(const Reader& r, RunConfig& c) {
  c.map_chi2 = linear_grid(r.real("map.chi2_min"), r.real("map.chi2_max"), r.points("map.chi2_points"));
  c.map_eps = linear_grid(r.real("map.eps_min"), r.real("map.eps_max"), r.points("map.eps_points"));
  c.map_tolerance = r.real("map.tolerance");
  if (!(c.map_tolerance >= 0)) throw ValidationError("map.tolerance must be non-negative");
}

void resolve_scan(const Reader& r, RunConfig& c) {
  const std::string& sweep = r.text("scan.sweep");
  if (sweep == "pump" || sweep == "epsilon")
    c.sweep = SweepKind::Pump;
  else if (sweep == "chi2")
    c.sweep = SweepKind::Chi2;
  else
    throw ValidationError("scan.sweep must be pump or chi2, got '" + sweep + "'");
  const bool pump = c.sweep == SweepKind::Pump;
  const std::string units = r.has("scan.units") ? r.text("scan.units") : (pump ? "eps_c" : "chi2_crit");
  double unit = 1.0;
  if (units == "absolute") {
    unit = 1.0;
  } else if (pump && units == "eps_c") {
    if (c.regime.regime != Regime::WithThreshold)
      throw ValidationError("scan.units = eps_c needs a threshold for these parameters");
    unit = c.regime.eps_c;
  } else if (pump && units == "eps_c_opo") {
    unit = c.regime.eps_c_opo;
  } else if (!pump && units == "chi1") {
    unit = c.params.chi1;
  } else if (!pump && units == "chi2_crit") {
    unit = c.regime.chi2_crit;
  } else {
    throw ValidationError("scan.units '" + units + "' does not apply to a " + sweep + " sweep");
  }
  for (double v : linear_grid(r.real("scan.from"), r.real("scan.to"), r.points("scan.points")))
    c.scan_values.push_back(v * unit);
  c.scan_omega = omega_window(r, "scan", c.params);
}

void resolve_sde(const Reader& r, RunConfig& c) {
  auto& s = c.sde;
  s.representation = representation_from_string(r.text("sde.representation"));
  s.dt = r.real("sde.dt");
  s.t_final = r.real("sde.t_final");
  s.n_traj = r.count("sde.n_traj", 1);
  s.n_samples = r.count("sde.n_samples", 2);
  s.divergence_bound = r.real("sde.divergence_bound");
  const auto workers = r.count("sde.workers", 0);
  s.workers = workers > 0 ? static_cast<unsigned>(workers) : std::max(1u, std::thread::hardware_concurrency());
  c.richardson = r.flag("sde.richardson");
  validate(s);
}

}  // namespace

ConfigMap read_ini(const std::string& path) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(path, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError("config: " + std::string(e.what()));
  }
  ConfigMap out;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ValidationError("config: key '" + section + "' is outside any section");
    for (const auto& [key, value] : body) {
      const std::string name = section + "." + key;
      check_known(name);
      out[name] = value.get_value<std::string>();
    }
  }
  return out;
}

void apply_overrides(ConfigMap& m, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ValidationError("override '" + o + "' is not of the form section.key=value");
    const std::string key = o.substr(0, eq);
    check_known(key);
    m[key] = o.substr(eq + 1);
  }
}

RunConfig resolve(const ConfigMap& given, const std::string& command) {
  RunConfig c;
  ConfigMap merged = defaults();
  for (const auto& [k, v] : given) {
    check_known(k);
    merged[k] = v;
  }
  const Reader r(merged);

  auto& p = c.params;
  p.gamma0 = r.real("params.gamma0");
  p.gamma1 = r.real("params.gamma1");
  p.gamma2 = r.real("params.gamma2");
  p.gamma3 = r.real("params.gamma3");
  p.chi1 = r.real("params.chi1");
  if (count_given(r, {"params.chi2", "params.chi2_over_chi1"}) > 1)
    throw ValidationError("give only one of params.chi2 and params.chi2_over_chi1");
  if (r.has("params.chi2"))
    p.chi2 = r.real("params.chi2");
  else
    p.chi2 = (r.has("params.chi2_over_chi1") ? r.real("params.chi2_over_chi1") : 0.4) * p.chi1;

  if (count_given(r, {"params.epsilon", "params.epsilon_over_eps_c", "params.epsilon_over_eps_c_opo"}) > 1)
    throw ValidationError("give only one of params.epsilon, params.epsilon_over_eps_c, params.epsilon_over_eps_c_opo");
  p.epsilon = 0.0;
  const auto reg0 = classify_regime(p);
  if (r.has("params.epsilon")) {
    p.epsilon = r.real("params.epsilon");
  } else if (r.has("params.epsilon_over_eps_c")) {
    if (reg0.regime != Regime::WithThreshold)
      throw ValidationError(std::string("params.epsilon_over_eps_c needs a threshold; regime is ") +
                            to_string(reg0.regime));
    p.epsilon = r.real("params.epsilon_over_eps_c") * reg0.eps_c;
  } else if (r.has("params.epsilon_over_eps_c_opo")) {
    p.epsilon = r.real("params.epsilon_over_eps_c_opo") * reg0.eps_c_opo;
  }
  validate(p);
  c.regime = classify_regime(p);

  c.sde.seed = r.count("sde.seed", 0);
  for (auto& [k, v] : merged)
    if (!v.empty()) c.entries[k] = v;

  if (command == "stability-map") resolve_map(r, c);
  if (command == "spectrum") c.spectrum_omega = omega_window(r, "spectrum", p);
  if (command == "criteria-scan") resolve_scan(r, c);
  if (command == "simulate") resolve_sde(r, c);
  return c;
}

}  // namespace tricav::cli
