#pragma once

#include <map>
#include <string>
#include <vector>

#include "edgesim/scenario.hpp"
#include "edgesim/simulation.hpp"

namespace edgesim {

// A scenario pinned down to concrete jobs and server capacities.
struct OracleInstance {
  std::vector<Job> jobs;
  std::vector<ResourceVector> capacities;
  Slot horizon = 0;
};

OracleInstance materialize_instance(const Scenario& scenario);

// Writes the assignment/flow model for the instance in the line-oriented
// text format documented in docs/model_format.md: variable declarations,
// linear rows, explicit bilinear rows with big-M linearizations, and the
// window/storage records a plain inequality cannot carry. Oversized
// instances produce a warning comment in the header, not a failure.
std::string export_model(const Scenario& scenario);

struct Violation {
  std::string constraint;
  std::string detail;
};

struct ValidationReport {
  bool ok = false;
  double objective = 0.0;
  std::vector<Violation> violations;
  std::vector<std::string> defaulted;  // variables filled with defaults
};

// Checks a claimed assignment against every record of an exported model.
// The solution is a flat JSON object mapping variable names to values;
// missing stream variables default to zero and missing duration variables
// to their minimal consistent values (listed in `defaulted`).
ValidationReport validate_solution(const std::string& model_text,
                                   const nlohmann::json& solution);

struct BoundWitness {
  double utility = 0.0;
  // job -> server and the placements realizing the bound
  std::map<JobId, int> assignment;
  std::vector<JobRun> runs;
};

// Exhaustive assignment search over tiny instances: every job-to-server
// mapping, feasibility decided by the earliest-fill engine over all
// admission orders. The result is a certified lower bound on the true
// continuous optimum (the engine's greedy shaping is not exhaustive).
// Throws when the instance exceeds the enumerable size.
BoundWitness brute_force_bound(const Scenario& scenario);

// Expresses a finished simulation run as a solution for the exported model
// of the same scenario: each job's final placement becomes its assignment,
// realized per-slot amounts its streams. Jobs preempted mid-run and later
// re-admitted contribute only the final run.
nlohmann::json extract_solution(const SimulationResult& result,
                                const Scenario& scenario);

}  // namespace edgesim
