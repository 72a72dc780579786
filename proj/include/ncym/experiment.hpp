#pragma once

// Experiment configuration, task dispatch and the selfcheck suite.
// Reports are plain JSON with no timestamps so that reruns with the same
// configuration and seed are byte-identical.

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "ncym/chern_weil.hpp"
#include "ncym/levi_civita.hpp"
#include "ncym/yang_mills.hpp"

namespace ncym {

enum ExitCode { exit_ok = 0, exit_error = 1, exit_validation = 2, exit_nonconvergence = 3 };

/// Fills defaults and checks every key; throws Error(validation) on bad input.
nlohmann::json resolve_config(const nlohmann::json& config);

/// Objects assembled from a resolved configuration.
struct Problem {
  Geometry geo;
  std::shared_ptr<const LieBasis> basis;
  std::shared_ptr<const Representation> rep;
  std::shared_ptr<const OrdinaryConnection> conn;
  std::shared_ptr<const RiemannianStructure> riem;
};
Problem build_problem(const nlohmann::json& resolved);
/// Same problem at a different grid size.
Problem build_problem(const nlohmann::json& resolved, int N);
/// Initial state; random kinds use seed + restart.
NCConnection initial_condition(const Problem& pb, const nlohmann::json& resolved, int restart = 0);

struct RunOutcome {
  int exit_code = exit_ok;
  nlohmann::json report;
  std::map<std::string, std::string> files;  // file name -> contents
};

/// Runs the task of a configuration. Validation problems become exit code 2
/// with a report holding the message; other library errors become exit code 1.
RunOutcome run_experiment(const nlohmann::json& config);

struct CheckRow {
  std::string module;
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string note;
};
/// Fast invariant suite; filter is a module name or empty for all.
std::vector<CheckRow> run_selfcheck(const std::string& filter = "");
nlohmann::json to_json(const std::vector<CheckRow>& rows);
std::string format_table(const std::vector<CheckRow>& rows);

std::string trace_csv(const std::vector<TraceRow>& trace);

/// Column data for plotting from a report written by run_experiment.
/// kind: "trace" (solve), "slice" (slice), "profile" (chern on a sphere).
std::string plot_csv(const nlohmann::json& report, const std::string& kind);

}  // namespace ncym
