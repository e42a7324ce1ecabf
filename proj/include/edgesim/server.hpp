#pragma once

#include <stdexcept>
#include <vector>

#include "edgesim/resources.hpp"
#include "edgesim/run.hpp"

namespace edgesim {

// An edge server: fixed capacity plus the rolling per-slot ledger of
// committed reservations for every running job. Single-writer: only the
// owning auction/engine step mutates a server.
class ServerState {
 public:
  ServerState() = default;
  ServerState(int id, ResourceVector capacity)
      : id_(id), capacity_(capacity) {}

  int id() const { return id_; }
  const ResourceVector& capacity() const { return capacity_; }

  // Capacity minus committed reservations at `slot`, floored at zero.
  ResourceVector residual(Slot slot) const {
    return (capacity_ - committed_at(slot)).floored_at_zero();
  }

  ResourceVector committed_at(Slot slot) const {
    if (slot < 0 || static_cast<std::size_t>(slot) >= ledger_.size())
      return {};
    return ledger_[static_cast<std::size_t>(slot)];
  }

  const std::vector<JobRun>& running() const { return running_; }

  JobRun* find_run(JobId id) {
    for (auto& r : running_)
      if (r.job.id == id) return &r;
    return nullptr;
  }

  bool has_job(JobId id) const {
    for (const auto& r : running_)
      if (r.job.id == id) return true;
    return false;
  }

  // Admits a run: reservations and storage holds enter the ledger for every
  // slot of the plan.
  void commit(JobRun run) {
    apply_plan(run.plan, run.plan.start, +1.0);
    running_.push_back(std::move(run));
  }

  // Removes a run from the server, erasing its ledger entries from
  // `from_slot` onward. Returns the run record.
  JobRun remove_run(JobId id, Slot from_slot) {
    for (std::size_t i = 0; i < running_.size(); ++i) {
      if (running_[i].job.id == id) {
        JobRun run = std::move(running_[i]);
        running_.erase(running_.begin() + static_cast<std::ptrdiff_t>(i));
        apply_plan(run.plan, from_slot, -1.0);
        return run;
      }
    }
    throw std::invalid_argument("no running job with id " +
                                std::to_string(id));
  }

  // Tears down the running set and ledger for a from-scratch re-admission
  // pass. The caller re-commits survivors.
  std::vector<JobRun> drain_for_rebuild() {
    std::vector<JobRun> runs = std::move(running_);
    running_.clear();
    ledger_.assign(ledger_.size(), ResourceVector{});
    return runs;
  }

  // Re-admits an in-flight run, entering only its not-yet-executed slots
  // into the ledger.
  void recommit(JobRun run, Slot from_slot) {
    apply_plan(run.plan, from_slot, +1.0);
    running_.push_back(std::move(run));
  }

 private:
  void apply_plan(const PlacementPlan& plan, Slot from, double sign) {
    const Slot first = std::max(from, plan.start);
    const Slot last = plan.end();
    if (last > static_cast<Slot>(ledger_.size()))
      ledger_.resize(static_cast<std::size_t>(last));
    for (Slot n = first; n < last; ++n) {
      const SlotReservation* r = plan.at(n);
      ResourceVector v{plan.storage_held(n), r->compute, r->upload,
                       r->download};
      ledger_[static_cast<std::size_t>(n)] += v.scaled(sign);
    }
  }

  int id_ = -1;
  ResourceVector capacity_;
  std::vector<JobRun> running_;
  std::vector<ResourceVector> ledger_;  // absolute slot -> committed sum
};

}  // namespace edgesim
