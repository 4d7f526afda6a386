#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "impulse/limit_approx.hpp"
#include "impulse/scenarios.hpp"

namespace impulse {

using Json = nlohmann::json;

/// Malformed input document.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal string that reads back to the same double.
std::string format_double(double x);

Json to_json(const ControlPath& u);
ControlPath control_path_from_json(const Json& j);

/// {horizon, grid, v1: [[...] per cell], v2: [[...] per cell] (when present)}.
Json to_json(const OrdinaryControl& v);
OrdinaryControl ordinary_control_from_json(const Json& j);

/// {S, m, l, samples: [[s, t, u..., v1..., v2...]]}; the ψ entries of the
/// last sample repeat the last cell.
Json to_json(const SpaceTimeControl& stc);
SpaceTimeControl space_time_from_json(const Json& j);

/// Sorted [[t, s]] pairs.
Json to_json(const Clock& clock);
Clock clock_from_json(const Json& j);

Json manifest_json(const Scenario& s);

/// Column-oriented numeric table written as CSV or as a JSON array of row
/// objects.
struct Table {
  using Cell = std::variant<double, std::string>;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void write_csv(std::ostream& out) const;
  Json to_json() const;
};

Table trajectory_table(const Trajectory& x);
Table param_path_table(const ParamPath& xi);
Table report_table(const std::vector<ApproxRecord>& report);

enum class OutputFormat { Csv, Json };

/// Writes `dir/stem.csv` or `dir/stem.json`; returns the path.
std::filesystem::path write_table(const Table& table, const std::filesystem::path& dir, const std::string& stem,
                                  OutputFormat format);
std::filesystem::path write_json(const Json& doc, const std::filesystem::path& path);

Json read_json_file(const std::filesystem::path& path);

}  // namespace impulse
