#ifndef TRICAV_TOOLS_CONFIG_HPP
#define TRICAV_TOOLS_CONFIG_HPP

// Run configuration for the command-line tool.
//
// Grammar: INI text with [section] headers and `key = value` lines.
// Comments take a whole line starting with ';' or '#'. Every key belongs to
// a known section; unknown sections or keys are rejected.
//
//   [params]   gamma0 gamma1 gamma2 gamma3 chi1
//              one of chi2 | chi2_over_chi1           (default chi2_over_chi1 = 0.4)
//              one of epsilon | epsilon_over_eps_c | epsilon_over_eps_c_opo
//                                                     (default epsilon = 0)
//   [map]      chi2_min chi2_max chi2_points eps_min eps_max eps_points tolerance
//   [spectrum] omega_min omega_max omega_points       (omega in units of gamma1)
//   [scan]     sweep = pump | chi2
//              units = absolute | eps_c | eps_c_opo   (pump)
//                      absolute | chi1 | chi2_crit    (chi2)
//              from to points
//              omega_min omega_max omega_points
//   [sde]      representation = wigner | positive-p
//              dt t_final n_traj seed n_samples divergence_bound
//              workers (0 = hardware concurrency) richardson (true | false)
//
// The same flat map, with "section.key" names, is what manifests record.

#include <map>
#include <string>
#include <vector>

#include "tricav/criteria.hpp"
#include "tricav/model.hpp"
#include "tricav/sde.hpp"

namespace tricav::cli {

using ConfigMap = std::map<std::string, std::string>;

struct RunConfig {
  SystemParams params;
  RegimeReport regime;

  std::vector<double> map_chi2;
  std::vector<double> map_eps;
  double map_tolerance{};

  std::vector<double> spectrum_omega;

  SweepKind sweep{SweepKind::Pump};
  std::vector<double> scan_values;  // absolute
  std::vector<double> scan_omega;

  SdeConfig sde;
  bool richardson{false};

  ConfigMap entries;  // defaults merged with every given key
};

/// Parses INI text into "section.key" entries. Throws ValidationError on
/// syntax errors, unknown keys and duplicates.
ConfigMap read_ini(const std::string& path);

/// Applies "section.key=value" overrides, rejecting unknown keys.
void apply_overrides(ConfigMap& m, const std::vector<std::string>& overrides);

/// Merges defaults and resolves [params] plus the section `command` uses
/// (map, spectrum, scan or sde). Keys of other sections are still checked
/// for existence but not interpreted.
RunConfig resolve(const ConfigMap& given, const std::string& command);

}  // namespace tricav::cli

#endif  // TRICAV_TOOLS_CONFIG_HPP
