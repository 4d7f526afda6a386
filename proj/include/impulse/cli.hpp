#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "impulse/io.hpp"

namespace impulse {

struct RunManifest {
  std::string scenario;
  std::vector<int> ks;                // empty: the scenario's own sweep
  std::optional<std::size_t> steps;   // integrator steps per unit
  std::filesystem::path out = "out";
  OutputFormat format = OutputFormat::Csv;
  std::uint64_t seed = 20240611;      // randomized checks

  /// ks strictly increasing and positive; steps >= 1.
  void validate() const;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct RunResult {
  std::vector<CheckResult> checks;
  std::vector<std::filesystem::path> files;
  std::vector<std::string> notes;  // informational lines (endpoint values, ...)

  bool passed() const;
  /// 0 when every check passed, 1 otherwise.
  int exit_code() const { return passed() ? 0 : 1; }
};

/// Runs a built-in scenario, writes its artifacts under manifest.out and
/// evaluates the scenario's acceptance checks. Throws PreconditionError for
/// an unknown scenario id.
RunResult cmd_run_scenario(const RunManifest& manifest);

enum class BridgeChoice { Straight, TwoLeg, File };

struct CompleteOptions {
  std::filesystem::path control_file;
  std::string fields_id;
  BridgeChoice bridge = BridgeChoice::Straight;
  std::filesystem::path bridge_file;
  bool normalize = true;
  std::size_t points = 1001;  // output time grid
  std::optional<std::size_t> steps;
  std::filesystem::path out = "out";
};

struct CompleteResult {
  Trajectory solution;
  std::vector<std::filesystem::path> files;
};

/// Completes the graph of the control in `control_file` (or takes a
/// completed graph {stc, clock} as is), solves the space-time system with the
/// fields of scenario `fields_id` and writes completion.json, clock.json,
/// solution.csv and xi.csv. Throws ParseError for unreadable input.
CompleteResult cmd_complete(const CompleteOptions& options);

/// Parses "straight", "two-leg" or "file:<path>".
void parse_bridge_flag(const std::string& flag, CompleteOptions& options);

/// Entry point of impulse-gc. Exit codes: 0 pass, 1 numeric failure,
/// 2 usage error, unknown scenario or unreadable input.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace impulse
