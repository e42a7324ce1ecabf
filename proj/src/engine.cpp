#include "edgesim/engine.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace edgesim {

namespace {

constexpr double kEps = kResourceTol;

bool stream_done(double total, double done) { return done >= total - kEps; }

// Residual view that can credit back a tentatively-preempted run.
ResourceVector residual_view(const ServerState& server, Slot n,
                             const JobRun* freed, Slot freed_from) {
  ResourceVector r = server.residual(n);
  if (freed && n >= freed_from) {
    const SlotReservation* sr = freed->plan.at(n);
    if (sr) {
      r.storage += freed->plan.storage_held(n);
      r.compute += sr->compute;
      r.uplink += sr->upload;
      r.downlink += sr->download;
    }
  }
  return r;
}

}  // namespace

std::optional<ResourceVector> footprint(const Job& job, Slot slots_remaining) {
  if (slots_remaining < 3) return std::nullopt;
  const double window = static_cast<double>(slots_remaining - 2);
  ResourceVector fp{job.input_mb, job.compute_mflops / window,
                    job.input_mb / window, job.output_mb / window};
  if (fp.uplink > job.max_uplink + kEps) return std::nullopt;
  if (fp.downlink > job.max_downlink + kEps) return std::nullopt;
  return fp;
}

std::optional<PlacementPlan> try_place(const Job& job,
                                       const ServerState& server, Slot start,
                                       Slot until, const JobRun* freed,
                                       Slot freed_from) {
  if (until - start < 3) return std::nullopt;

  const double s = job.input_mb;
  const double k = job.compute_mflops;
  const double sp = job.output_mb;

  PlacementPlan plan;
  plan.job_id = job.id;
  plan.start = start;

  double cum_u = 0.0, cum_k = 0.0, cum_d = 0.0;
  Slot last_u = -1, last_k = -1, last_d = -1;
  const bool batch = job.paradigm == Paradigm::Batch;

  for (Slot n = start; n < until; ++n) {
    const ResourceVector avail = residual_view(server, n, freed, freed_from);
    SlotReservation res;

    // upload
    if (!stream_done(s, cum_u)) {
      double up = std::min(job.max_uplink, s - cum_u);
      up = std::min(up, avail.uplink);
      up = std::min(up, std::max(0.0, avail.storage - cum_u));
      res.upload = std::max(0.0, up);
    }
    const double u_after = cum_u + res.upload;

    // held storage must fit in every slot the job is active
    if (u_after > avail.storage + kEps) return std::nullopt;

    // compute: lags the first slot; pipeline mode is capped by the fraction
    // of data already on the server, batch mode waits for the full upload
    if (n >= start + 1 && !stream_done(k, cum_k)) {
      double headroom;
      if (batch) {
        headroom = stream_done(s, cum_u) ? k - cum_k : 0.0;
      } else {
        headroom = (u_after / s) * k - cum_k;
      }
      double cp = std::min({k - cum_k, headroom, avail.compute});
      res.compute = std::max(0.0, cp);
    }
    const double k_after = cum_k + res.compute;

    // download: lags two slots; proportional to processed work in pipeline
    // mode, strictly after processing in batch mode
    if (n >= start + 2 && !stream_done(sp, cum_d)) {
      double headroom;
      if (batch) {
        headroom = stream_done(k, cum_k) ? sp - cum_d : 0.0;
      } else {
        headroom = (k_after / k) * sp - cum_d;
      }
      double dn = std::min({job.max_downlink, sp - cum_d, headroom,
                            avail.downlink});
      res.download = std::max(0.0, dn);
    }

    cum_u = u_after;
    cum_k = k_after;
    cum_d += res.download;
    if (res.upload > 0) last_u = n;
    if (res.compute > 0) last_k = n;
    if (res.download > 0) last_d = n;

    plan.slots.push_back(res);

    if (stream_done(s, cum_u) && stream_done(k, cum_k) &&
        stream_done(sp, cum_d)) {
      plan.upload_end = last_u + 1;
      plan.compute_end = last_k + 1;
      plan.download_end = last_d + 1;
      plan.slots.resize(static_cast<std::size_t>(last_d + 1 - start));
      plan.finalize();
      return plan;
    }
  }
  return std::nullopt;
}

AdvanceResult advance_slot(ServerState& server, const EpochClock& clock) {
  const Slot now = clock.current;
  AdvanceResult out;

  std::vector<JobId> order;
  for (const auto& r : server.running()) order.push_back(r.job.id);
  std::sort(order.begin(), order.end());

  for (JobId id : order) {
    JobRun* run = server.find_run(id);
    assert(run);
    const SlotReservation* res = run->plan.at(now);
    if (now < run->plan.start) continue;
    if (res) {
      run->uploaded += res->upload;
      run->processed += res->compute;
      run->downloaded += res->download;
      run->executed_until = now + 1;

      const Job& j = run->job;
      if (now + 1 == run->plan.upload_end)
        out.events.push_back(
            {SlotEvent::PhaseEnded, server.id(), id, Phase::Upload, now});
      if (now + 1 == run->plan.compute_end)
        out.events.push_back(
            {SlotEvent::PhaseEnded, server.id(), id, Phase::Compute, now});
      if (now + 1 == run->plan.download_end) {
        out.events.push_back(
            {SlotEvent::PhaseEnded, server.id(), id, Phase::Download, now});
        assert(stream_done(j.input_mb, run->uploaded) &&
               stream_done(j.compute_mflops, run->processed) &&
               stream_done(j.output_mb, run->downloaded));
        out.events.push_back(
            {SlotEvent::Completed, server.id(), id, Phase::Download, now});
        out.events.push_back({SlotEvent::StorageReleased, server.id(), id,
                              Phase::Download, now});
        JobRun done = server.remove_run(id, now + 1);
        done.state = RunState::Completed;
        done.executed_until = now + 1;
        out.completed.push_back(std::move(done));
      }
    }
  }
  return out;
}

PreemptResult preempt(ServerState& server, JobId job_id, Slot now) {
  const JobRun* run = server.find_run(job_id);
  if (!run)
    throw std::invalid_argument("preempt: no running job with id " +
                                std::to_string(job_id));
  PreemptResult out;
  out.freed_at_now = run->occupied_at(now);
  out.run = server.remove_run(job_id, now);
  out.run.state = RunState::Preempted;
  out.run.preempted_after = now - out.run.started_at;
  if (out.run.executed_until > now) out.run.executed_until = now;
  return out;
}

const char* to_string(Phase p) {
  switch (p) {
    case Phase::Upload: return "upload";
    case Phase::Compute: return "compute";
    default: return "download";
  }
}

}  // namespace edgesim
