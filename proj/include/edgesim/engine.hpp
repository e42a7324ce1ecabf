#pragma once

#include <optional>
#include <vector>

#include "edgesim/clock.hpp"
#include "edgesim/server.hpp"

namespace edgesim {

// Minimum sustained per-slot rate vector that still finishes the job in
// `slots_remaining` slots: one slot of the window is lost to the compute lag
// and one to the download lag, so each stream spreads over
// slots_remaining - 2 slots. Storage is the full input size. Returns nullopt
// when the required rate exceeds the job's own link caps (or the window is
// shorter than 3 slots) -- such a job cannot run anywhere at this deadline.
std::optional<ResourceVector> footprint(const Job& job, Slot slots_remaining);

// Greedy earliest-fill placement. Builds a per-slot schedule over
// [start, until) against the server's residual capacity; succeeds only if
// all three streams finish before `until`. When `freed` is given, that run's
// reservations from `freed_from` on are treated as available (used to probe
// a preemption without mutating the ledger).
std::optional<PlacementPlan> try_place(const Job& job,
                                       const ServerState& server, Slot start,
                                       Slot until,
                                       const JobRun* freed = nullptr,
                                       Slot freed_from = 0);

enum class Phase { Upload, Compute, Download };

struct SlotEvent {
  enum Kind { PhaseEnded, Completed, StorageReleased };
  Kind kind;
  int server_id;
  JobId job_id;
  Phase phase;  // meaningful for PhaseEnded only
  Slot slot;
};

struct AdvanceResult {
  std::vector<SlotEvent> events;
  std::vector<JobRun> completed;  // runs that finished in this slot
};

// Executes every running job's reservation for the clock's current slot,
// updating cumulative progress and retiring completed runs. Events are
// ordered by job id. Oversubscription here means a scheduling bug upstream
// and trips an assertion.
AdvanceResult advance_slot(ServerState& server, const EpochClock& clock);

struct PreemptResult {
  ResourceVector freed_at_now;  // resources the job held at `now`
  JobRun run;                   // the evicted run, state Preempted
};

// Evicts a running job: reservations from `now` on leave the ledger, held
// storage is freed, and the run earns nothing. Throws on unknown id.
PreemptResult preempt(ServerState& server, JobId job_id, Slot now);

const char* to_string(Phase p);

}  // namespace edgesim
