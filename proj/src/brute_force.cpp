#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "edgesim/engine.hpp"
#include "edgesim/oracle.hpp"

namespace edgesim {

namespace {

struct Feasible {
  bool ok = false;
  std::vector<JobRun> runs;
};

// Can this set of jobs all run to completion on one server of capacity
// `cap`? Jobs start uploading at their arrival (the oracle pays no bidding
// latency); every admission order is tried.
Feasible schedulable(const ResourceVector& cap,
                     const std::vector<const Job*>& jobs, Slot horizon) {
  Feasible out;
  if (jobs.empty()) {
    out.ok = true;
    return out;
  }
  std::vector<std::size_t> order(jobs.size());
  std::iota(order.begin(), order.end(), 0);
  do {
    ServerState server(0, cap);
    std::vector<JobRun> runs;
    bool all = true;
    for (std::size_t idx : order) {
      const Job& j = *jobs[idx];
      const Slot until = std::min(horizon, j.expiry());
      auto plan = try_place(j, server, j.arrival, until);
      if (!plan) {
        all = false;
        break;
      }
      JobRun run;
      run.job = j;
      run.started_at = plan->start;
      run.effective_expiry = j.expiry();
      run.executed_until = plan->end();
      run.uploaded = j.input_mb;
      run.processed = j.compute_mflops;
      run.downloaded = j.output_mb;
      run.state = RunState::Completed;
      run.plan = std::move(*plan);
      server.commit(run);
      runs.push_back(std::move(run));
    }
    if (all) {
      out.ok = true;
      out.runs = std::move(runs);
      return out;
    }
  } while (std::next_permutation(order.begin(), order.end()));
  return out;
}

}  // namespace

BoundWitness brute_force_bound(const Scenario& scenario) {
  const OracleInstance inst = materialize_instance(scenario);
  const std::size_t J = inst.jobs.size();
  const std::size_t I = inst.capacities.size();
  if (J > 7 || I > 4 || inst.horizon > 64)
    throw std::invalid_argument(
        "brute_force_bound: instance too large to enumerate (max 7 jobs, 4 "
        "servers, 64 slots)");

  const std::uint32_t full = (1u << J) - 1;

  // feasible job subsets per server, with witnesses
  std::vector<std::vector<Feasible>> feas(I);
  for (std::size_t i = 0; i < I; ++i) {
    feas[i].resize(full + 1);
    for (std::uint32_t mask = 0; mask <= full; ++mask) {
      std::vector<const Job*> subset;
      for (std::size_t b = 0; b < J; ++b)
        if (mask & (1u << b)) subset.push_back(&inst.jobs[b]);
      feas[i][mask] =
          schedulable(inst.capacities[i], subset, inst.horizon);
      if (i > 0) continue;
    }
  }

  auto mask_value = [&](std::uint32_t mask) {
    double v = 0.0;
    for (std::size_t b = 0; b < J; ++b)
      if (mask & (1u << b)) v += inst.jobs[b].utility;
    return v;
  };

  // best utility per (servers considered, jobs used); choice[i][used] is the
  // subset server i-1 took
  constexpr double kNeg = -1.0;
  std::vector<std::vector<double>> best(I + 1,
                                        std::vector<double>(full + 1, kNeg));
  std::vector<std::vector<std::uint32_t>> choice(
      I + 1, std::vector<std::uint32_t>(full + 1, 0));
  best[0][0] = 0.0;
  for (std::size_t i = 0; i < I; ++i) {
    for (std::uint32_t used = 0; used <= full; ++used) {
      if (best[i][used] < 0) continue;
      const std::uint32_t rest = full & ~used;
      std::uint32_t sub = rest;
      for (;;) {
        if (feas[i][sub].ok) {
          const double v = best[i][used] + mask_value(sub);
          if (v > best[i + 1][used | sub]) {
            best[i + 1][used | sub] = v;
            choice[i + 1][used | sub] = sub;
          }
        }
        if (sub == 0) break;
        sub = (sub - 1) & rest;
      }
    }
  }

  std::uint32_t best_mask = 0;
  for (std::uint32_t used = 0; used <= full; ++used)
    if (best[I][used] > best[I][best_mask]) best_mask = used;

  BoundWitness out;
  out.utility = std::max(0.0, best[I][best_mask]);

  std::uint32_t used = best_mask;
  for (std::size_t i = I; i-- > 0;) {
    const std::uint32_t sub = choice[i + 1][used];
    for (auto run : feas[i][sub].runs) {
      run.server_id = static_cast<int>(i);
      out.assignment[run.job.id] = static_cast<int>(i);
      out.runs.push_back(std::move(run));
    }
    used &= ~sub;
  }
  std::sort(out.runs.begin(), out.runs.end(),
            [](const JobRun& a, const JobRun& b) { return a.job.id < b.job.id; });
  return out;
}

}  // namespace edgesim
