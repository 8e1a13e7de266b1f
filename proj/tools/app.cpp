#include "app.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <boost/version.hpp>
#include <json.hpp>

#include "tricav/criteria.hpp"
#include "tricav/model.hpp"
#include "tricav/sde.hpp"
#include "tricav/spectra.hpp"
#include "tricav/stability.hpp"

#ifndef TRICAV_VERSION
#define TRICAV_VERSION "unknown"
#endif

namespace tricav::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kCommands{"steady", "stability-map", "spectrum", "criteria-scan", "simulate"};

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

template <typename Writer>
Table table_from(Writer&& write) {
  std::ostringstream os;
  write(os);
  return parse_csv(os.str());
}

const std::vector<std::string>& steady_columns() {
  static const std::vector<std::string> c{
      "regime",   "eps_c",     "eps_c_opo", "chi2_crit", "epsilon", "above_threshold", "beta_re",
      "beta_im",  "alpha1_re", "alpha1_im", "alpha2_re", "alpha2_im", "alpha3_re",     "alpha3_im",
      "n_beta",   "n_alpha1",  "n_alpha2",  "n_alpha3",  "residual"};
  return c;
}

const std::vector<std::string>& map_columns() {
  static const std::vector<std::string> c{"chi2", "epsilon", "class", "min_real_part"};
  return c;
}

const std::vector<std::string>& richardson_columns() {
  static const std::vector<std::string> c = [] {
    std::vector<std::string> h{"time"};
    for (const char* step : {"dt", "half_dt"})
      for (auto m : kModeNames) h.push_back(std::string("n_") + m + "_" + step);
    return h;
  }();
  return c;
}

Table steady_table(const RunConfig& cfg) {
  const auto& p = cfg.params;
  const auto& reg = cfg.regime;
  const auto s = steady_state(p);
  Table t{steady_columns(), {}, {"regime"}};
  t.rows.push_back({to_string(reg.regime), num(reg.eps_c), num(reg.eps_c_opo), num(reg.chi2_crit), num(p.epsilon),
                    s.above_threshold ? "1" : "0", num(s.beta.real()), num(s.beta.imag()), num(s.alpha1.real()),
                    num(s.alpha1.imag()), num(s.alpha2.real()), num(s.alpha2.imag()), num(s.alpha3.real()),
                    num(s.alpha3.imag()), num(std::norm(s.beta)), num(std::norm(s.alpha1)), num(std::norm(s.alpha2)),
                    num(std::norm(s.alpha3)), num(mean_field_residual(p, s))});
  return t;
}

Table map_table(const RunConfig& cfg) {
  Table t{map_columns(), {}, {"class"}};
  for (const auto& cell : stability_map(cfg.params, cfg.map_chi2, cfg.map_eps, cfg.map_tolerance))
    t.rows.push_back({num(cell.chi2), num(cell.epsilon), to_string(cell.cls), num(cell.min_real_part)});
  return t;
}

Table richardson_table(const RichardsonReport& r) {
  Table t{richardson_columns(), {}, {}};
  if (r.coarse.samples.size() != r.fine.samples.size()) return t;
  for (std::size_t k = 0; k < r.coarse.samples.size(); ++k) {
    std::vector<std::string> row{num(r.coarse.samples[k].time)};
    for (double n : r.coarse.samples[k].intensity) row.push_back(num(n));
    for (double n : r.fine.samples[k].intensity) row.push_back(num(n));
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string describe_ensemble(const EnsembleMoments& m) {
  std::ostringstream os;
  os << to_string(m.representation) << ": " << m.n_used << " of " << m.n_traj << " trajectories used, "
     << m.n_divergent << " divergent (bound " << m.divergence_bound << ")";
  return os.str();
}

bool finite_cell(const std::string& s, double& v) {
  std::istringstream is(s);
  is >> v;
  return is && is.peek() == std::char_traits<char>::eof() && std::isfinite(v);
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json versions() {
  return {
      {"tricav", TRICAV_VERSION},
      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                    std::to_string(EIGEN_MINOR_VERSION)},
      {"boost", BOOST_LIB_VERSION},
      {"cli11", CLI11_VERSION},
      {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                            std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                            std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
#if defined(__VERSION__)
      {"compiler", __VERSION__},
#endif
  };
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json params_json(const RunConfig& cfg) {
  const auto& p = cfg.params;
  return {{"gamma0", p.gamma0}, {"gamma1", p.gamma1}, {"gamma2", p.gamma2}, {"gamma3", p.gamma3},
          {"chi1", p.chi1},     {"chi2", p.chi2},     {"epsilon", p.epsilon},
          {"regime", to_string(cfg.regime.regime)},   {"eps_c", finite_or_null(cfg.regime.eps_c)},
          {"eps_c_opo", cfg.regime.eps_c_opo},        {"chi2_crit", cfg.regime.chi2_crit}};
}

void print_steady(std::ostream& out, const Table& t, Format f) {
  if (f == Format::Json) {
    json j;
    for (std::size_t k = 0; k < t.columns.size(); ++k) {
      double v{};
      const auto& cell = t.rows[0][k];
      j[t.columns[k]] = finite_cell(cell, v) ? json(v) : json(cell);
    }
    out << j.dump(2) << '\n';
    return;
  }
  for (std::size_t k = 0; k < t.columns.size(); ++k) {
    double v{};
    const auto& cell = t.rows[0][k];
    out << std::left << std::setw(16) << t.columns[k];
    if (finite_cell(cell, v))
      out << std::setprecision(10) << v << '\n';
    else
      out << cell << '\n';
  }
}

std::optional<Format> format_from_string(const std::string& s) {
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  return std::nullopt;
}

Format manifest_format(const json& m) {
  const auto f = format_from_string(m.at("format").get<std::string>());
  if (!f) throw ValidationError("manifest: unknown format");
  return *f;
}

void write_outputs(const fs::path& dir, const std::string& command, Format format, const RunConfig& cfg,
                   const Outcome& outcome, double wall) {
  fs::create_directories(dir);
  json artifacts = json::array();
  for (const auto& a : outcome.artifacts) {
    const std::string file = a.kind + extension(format);
    const std::string body = render(a.table, format);
    write_file((dir / file).string(), body);
    artifacts.push_back({{"file", file}, {"kind", a.kind}, {"rows", a.table.rows.size()}, {"fnv1a64", fnv1a64(body)}});
  }
  json manifest{
      {"tool", "tricav"},
      {"command", command},
      {"format", format == Format::Json ? "json" : "csv"},
      {"created_utc", utc_now()},
      {"wall_time_s", wall},
      {"seed", cfg.sde.seed},
      {"params", params_json(cfg)},
      {"config", cfg.entries},
      {"versions", versions()},
      {"artifacts", artifacts},
      {"status", outcome.reliable ? "ok" : "unreliable"},
      {"summary", outcome.summary},
  };
  write_file((dir / "manifest.json").string(), manifest.dump(2) + "\n");
}

int check(const fs::path& dir, bool rerun, std::ostream& out, std::ostream& err) {
  json manifest;
  try {
    manifest = json::parse(read_file((dir / "manifest.json").string()));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("manifest.json: ") + e.what());
  }
  const auto command = manifest.at("command").get<std::string>();
  if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end())
    throw ValidationError("manifest: unknown command '" + command + "'");
  const Format format = manifest_format(manifest);
  const RunConfig cfg = resolve(manifest.at("config").get<ConfigMap>(), command);

  int problems = 0;
  auto report = [&](const std::string& file, const std::string& what) {
    ++problems;
    err << file << ": " << what << '\n';
  };
  for (const auto& a : manifest.at("artifacts")) {
    const auto file = a.at("file").get<std::string>();
    const auto kind = a.at("kind").get<std::string>();
    std::string body;
    try {
      body = read_file((dir / file).string());
    } catch (const ValidationError& e) {
      report(file, e.what());
      continue;
    }
    if (fnv1a64(body) != a.at("fnv1a64").get<std::string>()) report(file, "content hash differs from manifest");
    Table t;
    try {
      t = parse(body, format);
    } catch (const ValidationError& e) {
      report(file, e.what());
      continue;
    }
    if (t.rows.size() != a.at("rows").get<std::size_t>()) report(file, "row count differs from manifest");
    for (const auto& problem : validate_artifact(kind, t, cfg)) report(file, problem);
  }

  if (rerun) {
    const Outcome again = execute(command, cfg);
    const auto& listed = manifest.at("artifacts");
    if (again.artifacts.size() != listed.size()) report("manifest", "rerun produced a different artifact set");
    for (std::size_t k = 0; k < std::min(again.artifacts.size(), listed.size()); ++k) {
      const auto hash = fnv1a64(render(again.artifacts[k].table, format));
      if (hash != listed[k].at("fnv1a64").get<std::string>())
        report(listed[k].at("file").get<std::string>(), "rerun from manifest does not reproduce the artifact");
    }
  }
  if (problems > 0) {
    err << problems << " problem(s) in " << dir.string() << '\n';
    return kExitValidation;
  }
  out << "ok: " << manifest.at("artifacts").size() << " artifact(s) in " << dir.string()
      << (rerun ? " validated and reproduced" : " validated") << '\n';
  return kExitOk;
}

}  // namespace

Outcome execute(const std::string& command, const RunConfig& cfg) {
  Outcome o;
  if (command == "steady") {
    o.artifacts.push_back({"steady", steady_table(cfg)});
  } else if (command == "stability-map") {
    o.artifacts.push_back({"stability_map", map_table(cfg)});
  } else if (command == "spectrum") {
    const auto spectra = compute_spectra(cfg.params, cfg.spectrum_omega);
    o.artifacts.push_back({"spectrum", table_from([&](std::ostream& os) { write_spectrum_csv(os, spectra); })});
    const auto crit = criteria_spectrum(spectra);
    o.artifacts.push_back({"criteria", table_from([&](std::ostream& os) { write_criteria_spectrum_csv(os, crit); })});
  } else if (command == "criteria-scan") {
    const auto pts = scan_minimum(cfg.params, cfg.sweep, cfg.scan_values, cfg.scan_omega);
    Table t = table_from([&](std::ostream& os) { write_scan_csv(os, cfg.sweep, pts); });
    t.text_columns = {"skipped"};
    o.artifacts.push_back({"scan", std::move(t)});
    const auto skipped = std::count_if(pts.begin(), pts.end(), [](const ScanPoint& p) { return p.skipped; });
    if (skipped > 0) o.summary = std::to_string(skipped) + " sweep point(s) skipped";
  } else if (command == "simulate") {
    const auto m = run_ensemble(cfg.params, cfg.sde);
    o.artifacts.push_back({"moments", table_from([&](std::ostream& os) { write_moments_csv(os, m); })});
    o.reliable = m.reliable;
    o.summary = describe_ensemble(m);
    if (cfg.richardson) {
      const auto r = richardson_check(cfg.params, cfg.sde);
      o.artifacts.push_back({"richardson", richardson_table(r)});
      std::ostringstream os;
      os << "; max |n(dt) - n(dt/2)| =";
      for (double d : r.max_intensity_diff) os << ' ' << d;
      o.summary += os.str();
    }
  } else {
    throw ValidationError("unknown command '" + command + "'");
  }
  return o;
}

std::vector<std::string> validate_artifact(const std::string& kind, const Table& t, const RunConfig& cfg) {
  std::vector<std::string> problems;
  std::vector<std::string> expected;
  std::size_t rows = 0;
  std::set<std::string> text_columns;
  if (kind == "steady") {
    expected = steady_columns();
    rows = 1;
    text_columns = {"regime"};
  } else if (kind == "stability_map") {
    expected = map_columns();
    rows = cfg.map_chi2.size() * cfg.map_eps.size();
    text_columns = {"class"};
  } else if (kind == "spectrum") {
    expected = spectrum_csv_header();
    rows = cfg.spectrum_omega.size();
  } else if (kind == "criteria") {
    expected = criteria_spectrum_csv_header();
    rows = cfg.spectrum_omega.size();
  } else if (kind == "scan") {
    expected = scan_csv_header(cfg.sweep);
    rows = cfg.scan_values.size();
    text_columns = {"skipped"};
  } else if (kind == "moments") {
    expected = moments_csv_header();
    rows = t.rows.empty() ? 0 : cfg.sde.n_samples;
  } else if (kind == "richardson") {
    expected = richardson_columns();
    rows = t.rows.empty() ? 0 : cfg.sde.n_samples;
  } else {
    return {"unknown artifact kind '" + kind + "'"};
  }
  if (t.columns != expected) problems.push_back("column header does not match a " + kind + " artifact");
  if (t.rows.size() != rows)
    problems.push_back("expected " + std::to_string(rows) + " rows, found " + std::to_string(t.rows.size()));

  double prev_time = -1.0;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const std::string where = "row " + std::to_string(r + 1) + ": ";
    if (row.size() != t.columns.size()) {
      problems.push_back(where + "wrong number of fields");
      continue;
    }
    bool skipped = false;
    for (std::size_t k = 0; k < row.size(); ++k) {
      const auto& col = t.columns[k];
      const auto& cell = row[k];
      if (text_columns.count(col)) {
        try {
          if (col == "class") stability_class_from_string(cell);
          if (col == "skipped") {
            skipped = cell != "0";
            if (skipped && cell != "at-or-above-threshold" && cell != "not-linearizable")
              problems.push_back(where + "unknown skip reason '" + cell + "'");
          }
          if (col == "regime" && cell != "with-threshold" && cell != "no-threshold" && cell != "critical")
            problems.push_back(where + "unknown regime '" + cell + "'");
        } catch (const ValidationError& e) {
          problems.push_back(where + e.what());
        }
        continue;
      }
      double v{};
      if (finite_cell(cell, v)) {
        if (col == "time") {
          if (v < prev_time) problems.push_back(where + "time decreases");
          prev_time = v;
        }
        continue;
      }
      const bool allowed = (skipped && cell == "nan") || (kind == "steady" && col == "eps_c" && cell == "inf");
      if (!allowed) problems.push_back(where + col + " is not a finite number: '" + cell + "'");
    }
  }
  return problems;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Threshold, stability, spectra, entanglement witnesses and stochastic simulation for a "
               "pumped downconversion + sum-frequency cavity."};
  app.set_version_flag("--version", TRICAV_VERSION);
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::string format_name = "csv";
  std::vector<std::string> sets;
  app.add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "master seed (overrides sde.seed)");
  app.add_option("--format", format_name, "artifact format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--set", sets, "override a configuration key, e.g. --set params.epsilon=50");

  app.add_subcommand("steady", "classical steady state and thresholds");
  app.add_subcommand("stability-map", "stability classes over a (chi2, epsilon) grid");
  app.add_subcommand("spectrum", "output quadrature spectra and witness spectra");
  app.add_subcommand("criteria-scan", "witness minima over a pump or chi2 sweep");
  app.add_subcommand("simulate", "stochastic ensemble (Wigner or positive-P)");
  auto* check_cmd = app.add_subcommand("check", "validate the artifacts in a directory against its manifest");
  std::string check_dir;
  bool rerun = false;
  check_cmd->add_option("dir", check_dir, "artifact directory (default: --out)");
  check_cmd->add_flag("--rerun", rerun, "recompute every artifact from the manifest and compare");

  std::vector<std::string> argv_store{"tricav"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (command == "check") {
      const std::string dir = !check_dir.empty() ? check_dir : out_dir;
      if (dir.empty()) throw ValidationError("check needs a directory");
      return check(dir, rerun, out, err);
    }

    ConfigMap given = config_path.empty() ? ConfigMap{} : read_ini(config_path);
    apply_overrides(given, sets);
    if (seed) given["sde.seed"] = std::to_string(*seed);
    const RunConfig cfg = resolve(given, command);
    const Format format = *format_from_string(format_name);

    const auto t0 = std::chrono::steady_clock::now();
    const Outcome outcome = execute(command, cfg);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (command == "steady") print_steady(out, outcome.artifacts.front().table, format);
    const bool writes = command != "steady" || !out_dir.empty();
    if (writes) {
      const fs::path dir = out_dir.empty() ? fs::path("tricav-out") : fs::path(out_dir);
      write_outputs(dir, command, format, cfg, outcome, wall);
      if (command != "steady")
        out << command << ": wrote " << outcome.artifacts.size() << " artifact(s) to " << dir.string() << '\n';
    }
    if (!outcome.summary.empty()) out << outcome.summary << '\n';
    if (!outcome.reliable) {
      err << "error: more than 1% of trajectories diverged; results marked unreliable\n";
      return kExitNumerical;
    }
    return kExitOk;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
}

}  // namespace tricav::cli
