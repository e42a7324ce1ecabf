#pragma once

#include <vector>

#include "edgesim/job.hpp"
#include "edgesim/resources.hpp"

namespace edgesim {

struct SlotReservation {
  double upload = 0.0;    // MB
  double compute = 0.0;   // MFlops
  double download = 0.0;  // MB
};

// Fully materialized per-slot schedule for one admitted job. Plans are fixed
// at admission and never reshaped mid-flight; the committed ledger and the
// execution engine both read from the same reservations.
struct PlacementPlan {
  JobId job_id = 0;
  Slot start = 0;
  std::vector<SlotReservation> slots;  // index i covers slot start + i
  std::vector<double> cum_upload;      // prefix sums over `slots`
  Slot upload_end = 0;    // one past the last slot of each stream (absolute)
  Slot compute_end = 0;
  Slot download_end = 0;

  Slot end() const { return start + static_cast<Slot>(slots.size()); }

  const SlotReservation* at(Slot n) const {
    if (n < start || n >= end()) return nullptr;
    return &slots[static_cast<std::size_t>(n - start)];
  }

  // Storage occupied at slot n: everything uploaded so far stays on the
  // server until the final download slot has run, then it is released.
  double storage_held(Slot n) const {
    if (n < start || n >= end() || cum_upload.empty()) return 0.0;
    return cum_upload[static_cast<std::size_t>(n - start)];
  }

  void finalize() {
    cum_upload.resize(slots.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      acc += slots[i].upload;
      cum_upload[i] = acc;
    }
  }
};

enum class RunState { Running, Completed, Preempted };

// Execution state of a job on a server.
struct JobRun {
  Job job;
  int server_id = -1;
  PlacementPlan plan;
  Slot started_at = 0;        // == plan.start
  Slot effective_expiry = 0;  // expiry used at admission (auction-time mode
                              // may shorten the nominal one)
  Slot executed_until = 0;    // first slot not yet executed
  double uploaded = 0.0;      // cumulative realized amounts
  double processed = 0.0;
  double downloaded = 0.0;
  RunState state = RunState::Running;
  Slot preempted_after = -1;  // slots spent before preemption, -1 if none

  // Reservation actually occupied at slot n (zero once preempted).
  ResourceVector occupied_at(Slot n) const {
    if (n >= executed_until && state != RunState::Running) return {};
    const SlotReservation* r = plan.at(n);
    if (!r) return {};
    return {plan.storage_held(n), r->compute, r->upload, r->download};
  }
};

}  // namespace edgesim
