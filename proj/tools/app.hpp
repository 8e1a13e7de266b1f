#ifndef TRICAV_TOOLS_APP_HPP
#define TRICAV_TOOLS_APP_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"
#include "table.hpp"

namespace tricav::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

struct Artifact {
  std::string kind;  // file stem as well
  Table table;
};

struct Outcome {
  std::vector<Artifact> artifacts;
  bool reliable{true};
  std::string summary;  // one-line human note, may be empty
};

/// Pure computation behind each subcommand. Deterministic in the config.
Outcome execute(const std::string& command, const RunConfig& cfg);

/// Problems found in an artifact; empty when it validates.
std::vector<std::string> validate_artifact(const std::string& kind, const Table& t, const RunConfig& cfg);

/// Entry point shared by the executable and the tests.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tricav::cli

#endif  // TRICAV_TOOLS_APP_HPP
