#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "edgesim/resources.hpp"

namespace edgesim {

using JobId = std::int64_t;
using Slot = std::int64_t;

enum class ValueClass { High, Low, Unclassified };
enum class Paradigm { Pipeline, Batch };

// A client task: what it needs, what it pays, and when it must be done.
struct Job {
  JobId id = 0;
  Slot arrival = 0;            // slot the request enters the system
  Slot deadline = 0;           // slots after arrival by which it must finish
  double utility = 0.0;        // credited in full on completion, else zero
  double input_mb = 0.0;       // data uploaded to the server
  double output_mb = 0.0;      // results downloaded back
  double compute_mflops = 0.0;
  double max_uplink = 0.0;     // client link caps, MB per slot
  double max_downlink = 0.0;
  ValueClass value_class = ValueClass::Unclassified;
  Paradigm paradigm = Paradigm::Pipeline;

  // First slot in which the job may no longer run.
  Slot expiry() const { return arrival + deadline; }

  void validate() const {
    if (deadline < 3)
      throw std::invalid_argument("job " + std::to_string(id) +
                                  ": deadline must be at least 3 slots");
    if (input_mb <= 0 || output_mb <= 0 || compute_mflops <= 0 ||
        utility <= 0)
      throw std::invalid_argument(
          "job " + std::to_string(id) +
          ": sizes, compute demand and utility must be positive");
    if (arrival < 0 || max_uplink < 0 || max_downlink < 0)
      throw std::invalid_argument("job " + std::to_string(id) +
                                  ": negative field");
  }
};

enum class DensityMode { ByDeadline, ByTimeRemaining };

// Utility per slot. ByDeadline divides by the full deadline length;
// ByTimeRemaining by the slots left until expiry, which grows as the
// deadline approaches. Throws if the job has already expired under
// ByTimeRemaining -- callers must drop such jobs.
inline double value_density(const Job& job, Slot now, DensityMode mode) {
  if (mode == DensityMode::ByDeadline) {
    return job.utility / static_cast<double>(job.deadline);
  }
  const Slot remaining = job.expiry() - now;
  if (remaining <= 0)
    throw std::domain_error("job " + std::to_string(job.id) +
                            " expired; must be dropped");
  return job.utility / static_cast<double>(remaining);
}

inline const char* to_string(ValueClass c) {
  switch (c) {
    case ValueClass::High: return "high";
    case ValueClass::Low: return "low";
    default: return "unclassified";
  }
}

inline const char* to_string(Paradigm p) {
  return p == Paradigm::Pipeline ? "pipeline" : "batch";
}

}  // namespace edgesim
