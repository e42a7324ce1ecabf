#include <map>

#include "edgesim/oracle.hpp"

namespace edgesim {

nlohmann::json extract_solution(const SimulationResult& result,
                                const Scenario& scenario) {
  (void)scenario;
  // final run per job: the completed one if any, else the last preemption
  std::map<JobId, const JobRun*> final_run;
  for (const auto& run : result.finished_runs) {
    auto& slot = final_run[run.job.id];
    if (!slot) {
      slot = &run;
      continue;
    }
    if (run.state == RunState::Completed ||
        (slot->state != RunState::Completed &&
         run.started_at > slot->started_at))
      slot = &run;
  }

  nlohmann::json sol = nlohmann::json::object();
  for (const auto& [id, run] : final_run) {
    const Job& j = run->job;
    sol["x_" + std::to_string(run->server_id) + "_" + std::to_string(id)] = 1;
    const bool done = run->state == RunState::Completed;
    sol["tau_" + std::to_string(id)] = done ? 1 : 0;

    const Slot d_u = run->plan.upload_end - j.arrival;
    const Slot d_p = run->plan.compute_end - j.arrival;
    const Slot d_d = run->plan.download_end - j.arrival;
    sol["d_u_" + std::to_string(id)] = d_u;
    sol["d_p_" + std::to_string(id)] = d_p;
    sol["d_d_" + std::to_string(id)] = d_d;
    sol["d_t_" + std::to_string(id)] =
        done ? d_d : run->executed_until - j.arrival;

    for (Slot n = run->plan.start; n < run->executed_until; ++n) {
      const SlotReservation* r = run->plan.at(n);
      if (r->upload > 0)
        sol["sigma_" + std::to_string(id) + "_n" + std::to_string(n)] =
            r->upload;
      if (r->compute > 0)
        sol["kappa_" + std::to_string(id) + "_n" + std::to_string(n)] =
            r->compute;
      if (r->download > 0)
        sol["sigmap_" + std::to_string(id) + "_n" + std::to_string(n)] =
            r->download;
    }
  }
  return sol;
}

}  // namespace edgesim
