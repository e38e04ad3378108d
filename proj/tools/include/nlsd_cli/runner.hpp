#pragma once

// Config ingestion, task orchestration and JSON report emission for the nlsd tool.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "nlsd/errors.hpp"

namespace nlsd::cli {

using Json = nlohmann::ordered_json;
using boost::property_tree::ptree;

/// Missing or invalid config field; `field` is the dotted path ("rep.a").
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error("config field '" + field + "': " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class Task { verify_smatrix, verify_rep, verify_rt, classify_rep, amplitude, hierarchy, boundary_derive,
                  boundary_verify, breaking_expand, breaking_classify };

std::string to_string(Task t);
Task parse_task(const std::string& s);

struct Sampling {
  std::uint64_t seed = 0;
  int count = 50;
  double lo = -10.0, hi = 10.0;
};

struct RunConfig {
  Task task = Task::verify_smatrix;
  int N = 1;
  double g = 1.0;
  Sampling sampling;
  double tol = 1e-12;
  std::string out;  // empty: stdout
  int jobs = 1;
  bool timing = false;
  std::string preset;
  /// Task-specific sections ([rep], [amplitude], [hierarchy], [boundary], [breaking], [smatrix]).
  ptree tree;

  /// ConfigError when a task-specific required field is absent or malformed.
  void validate() const;
};

/// Reads an INI file into a ptree; ConfigError on syntax errors.
ptree read_ini(const std::string& path);

/// Builds a RunConfig from a ptree. `seed` is mandatory ([run] seed).
RunConfig load_config(const ptree& tree);

struct PresetInfo {
  std::string name;
  std::string anchor;
  std::string description;
};

std::vector<PresetInfo> list_cases();
/// Config tree of a named preset; ConfigError for unknown names.
ptree preset_tree(const std::string& name);

struct CheckRecord {
  std::string name;
  std::string anchor;
  std::optional<double> residual;
  std::optional<double> tolerance;
  Json value;  // null when the record is a pure residual check
  bool pass = false;
  std::string error;  // module error message when the check could not run
};

struct Report {
  Json config;
  std::vector<CheckRecord> records;
  std::optional<double> wall_time;

  bool all_pass() const;
  Json to_json() const;
};

Report run(const RunConfig& config);

/// Writes to `path.tmp` and renames over `path`.
void write_atomic(const std::string& path, const std::string& text);

/// Dump with a trailing newline.
std::string render(const Report& r);

}  // namespace nlsd::cli
