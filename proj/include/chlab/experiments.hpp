#pragma once
// The experiment registry: named, config-driven laboratory runs that tie the
// modules together, assert their invariants with pinned tolerances, and write
// plot-ready CSVs plus a JSON report. The CLI is a thin shell over this.

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace chlab {

using json = nlohmann::json;

// One checked statement: `id` names the module invariant it exercises
// (stable across releases), pass is measured <= tolerance unless the
// assertion is structural (an exact count), in which case tolerance holds
// the expected value and measured the observed one.
struct Assertion {
  std::string id;
  std::string description;
  double      tolerance;
  double      measured;
  bool        pass;
};

struct RunReport {
  std::string              experiment;
  json                     config;      // fully-defaulted echo
  std::vector<Assertion>   assertions;
  json                     fitted;      // measured constants (rates, C's, ...)
  std::vector<std::string> notes;       // informational, never gates
  std::vector<std::string> files;       // manifest of written CSVs
  double                   wall_seconds = 0.0;

  bool pass() const;
  json to_json() const;
};

// Thrown for schema violations (unknown experiment, unknown key, bad value);
// the CLI maps it to exit code 2 as opposed to 3 for runtime failures.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Experiment {
  std::string name;
  std::string description;
  json        defaults;
  std::function<RunReport(const json& config, const std::string& outdir)> run;
};

// All seventeen experiments, in the documented order.
const std::vector<Experiment>& experiment_registry();

// Merge user config over the experiment defaults, rejecting unknown keys and
// invalid values, then dispatch. outdir receives the CSVs ("" = no files).
RunReport run_experiment(const std::string& name, const json& user_config,
                         const std::string& outdir);

// Closest registry names by edit distance (for unknown-name errors).
std::vector<std::string> nearest_experiments(const std::string& name,
                                             int count = 3);

// CSV with a header row and 17-significant-digit doubles; appends the path
// to `files`.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows,
               std::vector<std::string>& files);

}  // namespace chlab
