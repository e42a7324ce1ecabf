#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "edgesim/job.hpp"
#include "edgesim/server.hpp"

namespace edgesim {

struct Dist {
  double mean = 0.0;
  double stddev = 0.0;
};

// Job generator configuration. Normal draws every field from its own
// distribution; Bimodal splits utility into an exactly-sized high-value
// class and a low-value rest; Trace replays a CSV; Explicit carries the
// jobs inline (regression fixtures).
struct WorkloadSpec {
  enum class Kind { Normal, Bimodal, Trace, Explicit };
  Kind kind = Kind::Normal;

  Dist arrivals{14, 4};  // jobs per slot
  Dist storage{200, 20};
  Dist compute{100, 20};
  Dist uplink{80, 10};
  Dist downlink{80, 10};
  Dist deadline{10, 3};
  Dist utility{60, 20};       // low-value mode under Bimodal
  Dist utility_high{160, 20}; // high-value mode under Bimodal
  double high_fraction = 0.10;
  double output_ratio = 0.2;  // result size as a fraction of input size
  Paradigm paradigm = Paradigm::Pipeline;

  // trace replay
  std::string trace_path;
  double trace_slot_seconds = 600.0;
  std::map<std::string, double> priority_utility = {
      {"high", 160.0}, {"medium", 80.0}, {"low", 40.0}};
  std::optional<Slot> deadline_cap;  // in slots

  std::vector<Job> explicit_jobs;
};

// Server generator: explicit capacities win when present, otherwise `count`
// servers are drawn from the distributions.
struct ServerSpec {
  std::vector<ResourceVector> explicit_caps;
  int count = 8;
  Dist storage{540, 30};
  Dist compute{80, 20};
  Dist uplink{120, 30};
  Dist downlink{120, 30};
};

std::vector<Job> gen_jobs(const WorkloadSpec& spec, Slot horizon,
                          std::uint64_t seed);

std::vector<ServerState> gen_servers(const ServerSpec& spec,
                                     std::uint64_t seed);

// Reads the documented trace CSV (header
// job_id,arrival_epoch_s,storage_mb,compute_mflops,deadline_s,priority),
// quantizes arrivals into slots, maps priority to utility, and synthesizes
// the link caps and output size the trace does not carry. Throws on
// malformed rows or unknown priorities, with the line number.
std::vector<Job> load_trace(const std::string& path, const WorkloadSpec& spec,
                            std::uint64_t seed);

}  // namespace edgesim
