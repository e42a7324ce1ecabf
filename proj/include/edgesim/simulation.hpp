#pragma once

#include <filesystem>
#include <vector>

#include "edgesim/auction.hpp"
#include "edgesim/metrics.hpp"
#include "edgesim/scenario.hpp"

namespace edgesim {

struct QuoteRecord {
  Slot epoch;
  PriceQuote quote;
};

struct SelectRecord {
  Slot epoch;
  JobId job_id;
  bool abstained;
  int server_id;
  double price;
};

struct AdmitRecord {
  Slot epoch;
  int server_id;
  JobId job_id;
  Slot start;
  bool via_preemption;
};

struct PreemptRecord {
  Slot epoch;
  int server_id;
  JobId victim;
  JobId admitted;  // -1 when no single job displaced it (knapsack refill)
};

struct EpochStats {
  Slot epoch;
  long completed = 0;
  long admitted = 0;
  long preempted = 0;
  double completed_utility = 0.0;
};

// Everything a run produces: metrics, the final record of every run that
// ever existed, and the auction/allocation logs the reports are written
// from. All vectors are in deterministic order.
struct SimulationResult {
  Metrics metrics;
  std::vector<Job> jobs;                   // generated workload
  std::vector<ResourceVector> server_caps;
  std::vector<JobRun> finished_runs;       // completed and preempted runs
  std::vector<QuoteRecord> quotes;
  std::vector<SelectRecord> selections;
  std::vector<AdmitRecord> admissions;
  std::vector<PreemptRecord> preemptions;
  std::vector<SlotEvent> events;
  std::vector<EpochStats> per_epoch;
};

SimulationResult run_simulation(const Scenario& scenario);

// Replays a finished run against every runtime invariant: per-slot server
// capacity, pipeline proportionality, phase ordering, placement sums,
// price bands, all-or-nothing accounting, retention-mode zero preemptions,
// at-most-one-concurrent-placement, and utility conservation. Throws
// std::logic_error on the first violation.
void verify_invariants(const SimulationResult& result,
                       const Scenario& scenario);

enum class ReportFormat { Csv, Json, Both };

// Writes metrics.{json,csv}, auction_log.jsonl, alloc_trace.csv and
// timing.json under `outdir`. Every file except timing.json is
// byte-deterministic for a given scenario and seed.
void write_reports(const SimulationResult& result, const Scenario& scenario,
                   const std::filesystem::path& outdir,
                   ReportFormat format = ReportFormat::Both);

nlohmann::json metrics_to_json(const Metrics& m);

}  // namespace edgesim
