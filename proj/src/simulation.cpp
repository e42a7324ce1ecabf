#include "edgesim/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <map>
#include <stdexcept>

#include "edgesim/rng.hpp"

namespace edgesim {

namespace {

constexpr std::uint64_t kTagRound1 = 0x5231;
constexpr std::uint64_t kTagRound2 = 0x5232;
constexpr std::uint64_t kTagSelect = 0x53454c;

enum class JobPhase { Pool, Running, Terminal };
enum class Outcome { None, Completed, Rejected, PreemptedLost, InFlight };

struct JobState {
  JobPhase phase = JobPhase::Pool;
  Outcome outcome = Outcome::None;
  long attempts = 0;  // bidding attempts so far
  bool ever_preempted = false;
};

const char* class_key(ValueClass c) { return to_string(c); }

}  // namespace

SimulationResult run_simulation(const Scenario& scenario) {
  scenario.validate();
  SimulationResult out;

  out.jobs = gen_jobs(scenario.workload, scenario.clock.horizon, scenario.seed);
  std::vector<ServerState> servers = gen_servers(scenario.servers, scenario.seed);
  for (const auto& s : servers) out.server_caps.push_back(s.capacity());

  const Slot horizon = scenario.clock.horizon;
  const double slot_s = scenario.clock.slot_seconds;
  const double cost_s =
      scenario.adjust_auction_time ? scenario.costs.get(scenario.algorithm) : 0.0;
  const bool dk = is_double_knapsack(scenario.algorithm);
  const bool preemptive = is_preemptive(scenario.algorithm);

  std::map<JobId, const Job*> job_by_id;
  std::map<JobId, JobState> state;
  std::vector<std::vector<JobId>> arrivals(static_cast<std::size_t>(horizon));
  for (const auto& j : out.jobs) {
    job_by_id[j.id] = &j;
    state[j.id] = {};
    if (j.arrival >= 0 && j.arrival < horizon)
      arrivals[static_cast<std::size_t>(j.arrival)].push_back(j.id);
  }
  for (auto& a : arrivals) std::sort(a.begin(), a.end());

  std::vector<JobId> pool;
  double wall_total = 0.0;
  long wall_count = 0;

  auto terminalize = [&](JobId id, Outcome outcome) {
    JobState& st = state[id];
    st.phase = JobPhase::Terminal;
    st.outcome = outcome;
  };

  EpochClock clock = scenario.clock;
  for (Slot epoch = 0; epoch < horizon; ++epoch) {
    clock.current = epoch;
    EpochStats stats;
    stats.epoch = epoch;

    // execute this slot on every server
    for (auto& server : servers) {
      AdvanceResult adv = advance_slot(server, clock);
      for (auto& ev : adv.events) out.events.push_back(ev);
      for (auto& run : adv.completed) {
        terminalize(run.job.id, Outcome::Completed);
        ++stats.completed;
        stats.completed_utility += run.job.utility;
        out.finished_runs.push_back(std::move(run));
      }
    }

    // last epoch's arrivals join the bidding pool
    if (epoch >= 1)
      for (JobId id : arrivals[static_cast<std::size_t>(epoch - 1)])
        pool.push_back(id);
    std::sort(pool.begin(), pool.end());

    // build this epoch's requests, dropping jobs that can no longer make it
    const Slot start = epoch + 1;
    std::vector<BidRequest> requests;
    std::vector<JobId> dropped;
    for (JobId id : pool) {
      const Job& job = *job_by_id[id];
      JobState& st = state[id];
      const Slot penalty =
          auction_penalty_slots(cost_s, slot_s, st.attempts + 1);
      const Slot eff_expiry = job.expiry() - penalty;
      const Slot until = std::min(horizon, eff_expiry);
      const auto fp = footprint(job, until - start);
      if (!fp) {
        // windows only shrink; this job is done for
        if (st.ever_preempted)
          terminalize(id, Outcome::PreemptedLost);
        else if (eff_expiry - start < 3 || until - start >= 3)
          terminalize(id, Outcome::Rejected);
        else
          terminalize(id, Outcome::InFlight);  // horizon got in the way
        dropped.push_back(id);
        continue;
      }
      ++st.attempts;
      requests.push_back({job, eff_expiry, until, *fp});
    }
    for (JobId id : dropped)
      pool.erase(std::find(pool.begin(), pool.end(), id));
    out.metrics.bids += static_cast<long>(requests.size());

    if (!requests.empty()) {
      // Round 1, independently per server
      std::vector<Round1Result> r1(servers.size());
      std::vector<double> wall(servers.size(), 0.0);
      auto run_r1 = [&](std::size_t i) {
        const auto t0 = std::chrono::steady_clock::now();
        const std::uint64_t seed = derive_seed(
            scenario.seed,
            {kTagRound1, static_cast<std::uint64_t>(epoch),
             static_cast<std::uint64_t>(servers[i].id())});
        r1[i] = dk ? round1_dk(servers[i], requests, scenario.auction, epoch,
                               seed)
                   : round1_kg(servers[i], requests, scenario.auction, epoch,
                               seed);
        wall[i] += std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
      };
      if (scenario.parallel_auctions) {
        std::vector<std::future<void>> futs;
        for (std::size_t i = 0; i < servers.size(); ++i)
          futs.push_back(std::async(std::launch::async, run_r1, i));
        for (auto& f : futs) f.get();
      } else {
        for (std::size_t i = 0; i < servers.size(); ++i) run_r1(i);
      }
      for (std::size_t i = 0; i < servers.size(); ++i)
        for (const auto& q : r1[i].quotes)
          out.quotes.push_back({epoch, q});

      // clients pick the cheapest quote
      std::vector<std::vector<BidRequest>> returning(servers.size());
      for (std::size_t r = 0; r < requests.size(); ++r) {
        const JobId id = requests[r].job.id;
        std::vector<PriceQuote> mine;
        for (std::size_t i = 0; i < servers.size(); ++i)
          mine.push_back(r1[i].quotes[r]);
        const Selection sel = client_select(
            mine, requests[r].job.utility,
            derive_seed(scenario.seed, {kTagSelect,
                                        static_cast<std::uint64_t>(epoch),
                                        static_cast<std::uint64_t>(id)}));
        out.selections.push_back(
            {epoch, id, sel.abstained, sel.server_id, sel.price});
        if (sel.abstained) {
          ++out.metrics.abstentions;
          continue;  // stays in the pool, may retry next epoch
        }
        for (std::size_t i = 0; i < servers.size(); ++i)
          if (servers[i].id() == sel.server_id)
            returning[i].push_back(requests[r]);
      }

      // Round 2, independently per server
      std::vector<Round2Result> r2(servers.size());
      auto run_r2 = [&](std::size_t i) {
        const auto t0 = std::chrono::steady_clock::now();
        if (dk) {
          const std::uint64_t seed = derive_seed(
              scenario.seed,
              {kTagRound2, static_cast<std::uint64_t>(epoch),
               static_cast<std::uint64_t>(servers[i].id())});
          r2[i] = round2_dk(servers[i], returning[i], scenario.auction, epoch,
                            preemptive, seed);
        } else {
          r2[i] = round2_kg(servers[i], returning[i], r1[i].fit_marked,
                            scenario.auction, epoch, preemptive);
        }
        wall[i] += std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
      };
      if (scenario.parallel_auctions) {
        std::vector<std::future<void>> futs;
        for (std::size_t i = 0; i < servers.size(); ++i)
          futs.push_back(std::async(std::launch::async, run_r2, i));
        for (auto& f : futs) f.get();
      } else {
        for (std::size_t i = 0; i < servers.size(); ++i) run_r2(i);
      }

      for (std::size_t i = 0; i < servers.size(); ++i) {
        wall_total += wall[i];
        ++wall_count;
        std::map<JobId, JobId> displaced_by;  // victim -> admitted
        for (const auto& pr : r2[i].preemption_pairs)
          displaced_by[pr.first] = pr.second;

        for (JobId id : r2[i].admitted) {
          bool via_preemption = false;
          for (const auto& pr : r2[i].preemption_pairs)
            if (pr.second == id) via_preemption = true;
          out.admissions.push_back(
              {epoch, servers[i].id(), id, start, via_preemption});
          ++out.metrics.admissions;
          ++stats.admitted;
          pool.erase(std::find(pool.begin(), pool.end(), id));
          state[id].phase = JobPhase::Running;
        }
        for (auto& run : r2[i].preempted) {
          const JobId id = run.job.id;
          out.preemptions.push_back({epoch, servers[i].id(), id,
                                     displaced_by.count(id)
                                         ? displaced_by[id]
                                         : JobId{-1}});
          ++out.metrics.preemption_events;
          ++stats.preempted;
          JobState& st = state[id];
          st.ever_preempted = true;
          st.phase = JobPhase::Pool;
          pool.push_back(id);  // total loss; it may bid again from scratch
          out.finished_runs.push_back(std::move(run));
        }
        // rejected requests simply stay in the pool
      }
      std::sort(pool.begin(), pool.end());
    }

    if (scenario.emit_timeseries) out.per_epoch.push_back(stats);
  }

  // horizon truncation: whatever is still undecided is reported separately
  for (JobId id : pool) terminalize(id, Outcome::InFlight);
  for (auto& [id, st] : state)
    if (st.phase == JobPhase::Pool && st.outcome == Outcome::None)
      terminalize(id, Outcome::InFlight);  // never reached a bidding epoch
  for (auto& server : servers)
    for (const auto& run : server.running())
      terminalize(run.job.id, Outcome::InFlight);

  // fold job states into metrics
  Metrics& m = out.metrics;
  for (const auto& j : out.jobs) {
    const JobState& st = state[j.id];
    ClassBreakdown& cls = m.by_class[class_key(j.value_class)];
    m.generated.add(j);
    cls.generated.add(j);
    if (st.ever_preempted) {
      m.preempted_ever.add(j);
      cls.preempted_ever.add(j);
    }
    switch (st.outcome) {
      case Outcome::Completed:
        m.completed.add(j);
        cls.completed.add(j);
        break;
      case Outcome::Rejected:
        m.rejected.add(j);
        cls.rejected.add(j);
        break;
      case Outcome::PreemptedLost:
        m.preempted_lost.add(j);
        cls.preempted_lost.add(j);
        break;
      case Outcome::InFlight:
      case Outcome::None:
        m.in_flight.add(j);
        cls.in_flight.add(j);
        break;
    }
  }
  m.mean_auction_wall_s = wall_count > 0 ? wall_total / wall_count : 0.0;

  return out;
}

// ---------------------------------------------------------------------------
// invariant replay

namespace {

[[noreturn]] void violation(const std::string& what) {
  throw std::logic_error("invariant violation: " + what);
}

void check_run(const JobRun& run, Slot horizon) {
  const Job& j = run.job;
  const PlacementPlan& p = run.plan;
  const bool batch = j.paradigm == Paradigm::Batch;

  double cum_u = 0, cum_k = 0, cum_d = 0;
  for (Slot n = p.start; n < p.end(); ++n) {
    const SlotReservation* r = p.at(n);
    if (r->upload < -kResourceTol || r->compute < -kResourceTol ||
        r->download < -kResourceTol)
      violation("negative reservation");
    if (n == p.start && (r->compute > kResourceTol || r->download > kResourceTol))
      violation("compute or download in the first slot");
    if (n == p.start + 1 && r->download > kResourceTol)
      violation("download in the second slot");
    cum_u += r->upload;
    cum_k += r->compute;
    cum_d += r->download;
    if (cum_k > cum_u / j.input_mb * j.compute_mflops + 1e-6)
      violation("processing ahead of uploaded data (job " +
                std::to_string(j.id) + ")");
    if (cum_d > cum_k / j.compute_mflops * j.output_mb + 1e-6)
      violation("download ahead of processed work (job " +
                std::to_string(j.id) + ")");
    if (batch) {
      const bool mixes =
          (r->upload > kResourceTol) + (r->compute > kResourceTol) +
              (r->download > kResourceTol) >
          1;
      if (mixes) violation("batch slot mixes phases");
    }
  }
  if (cum_u > j.input_mb + 1e-6 || cum_k > j.compute_mflops + 1e-6 ||
      cum_d > j.output_mb + 1e-6)
    violation("plan overshoots job totals");

  if (!(p.upload_end <= p.compute_end && p.compute_end <= p.download_end))
    violation("phase ends out of order");
  if (p.download_end > std::min(horizon, run.effective_expiry))
    violation("plan ends past the deadline");

  if (run.state == RunState::Completed) {
    if (std::abs(cum_u - j.input_mb) > 1e-6 ||
        std::abs(cum_k - j.compute_mflops) > 1e-6 ||
        std::abs(cum_d - j.output_mb) > 1e-6)
      violation("completed run did not cover the job");
    if (p.upload_end <= p.start || p.compute_end <= p.start + 1 ||
        p.download_end <= p.start + 2)
      violation("phase shorter than one slot");
  }
  if (run.state == RunState::Preempted) {
    if (run.downloaded >= j.output_mb - kResourceTol)
      violation("preempted run delivered all results");
    if (run.preempted_after < 0 ||
        run.started_at + run.preempted_after >= p.download_end + 1)
      violation("preemption after the planned end");
  }
}

}  // namespace

void verify_invariants(const SimulationResult& result,
                       const Scenario& scenario) {
  std::map<JobId, const Job*> job_by_id;
  for (const auto& j : result.jobs) job_by_id[j.id] = &j;

  // per-slot capacity replay over realized occupancy
  std::map<int, std::map<Slot, ResourceVector>> used;
  std::map<JobId, std::vector<std::pair<Slot, Slot>>> intervals;
  for (const auto& run : result.finished_runs) {
    check_run(run, scenario.clock.horizon);
    for (Slot n = run.plan.start; n < run.executed_until; ++n) {
      used[run.server_id][n] += run.occupied_at(n);
    }
    intervals[run.job.id].emplace_back(run.started_at, run.executed_until);
  }
  for (std::size_t i = 0; i < result.server_caps.size(); ++i) {
    const auto it = used.find(static_cast<int>(i));
    if (it == used.end()) continue;
    for (const auto& [slot, load] : it->second)
      if (!load.fits_within(result.server_caps[i], 1e-6))
        violation("server " + std::to_string(i) + " oversubscribed at slot " +
                  std::to_string(slot));
  }

  // a job holds at most one placement at a time
  for (auto& [id, spans] : intervals) {
    std::sort(spans.begin(), spans.end());
    for (std::size_t k = 1; k < spans.size(); ++k)
      if (spans[k].first < spans[k - 1].second)
        violation("job " + std::to_string(id) + " placed twice concurrently");
  }

  // price bands
  const bool dk = is_double_knapsack(scenario.algorithm);
  const AuctionConfig& cfg = scenario.auction;
  for (const auto& qr : result.quotes) {
    const Job* j = job_by_id.at(qr.quote.job_id);
    const double u = j->utility;
    switch (qr.quote.tag) {
      case QuoteTag::FitMarked:
        if (std::abs(qr.quote.price - (1.0 - cfg.fit_discount) * u) > 1e-9)
          violation("fit-marked price off the discount");
        break;
      case QuoteTag::PreemptCandidate:
        if (dk) {
          if (std::abs(qr.quote.price - u) > 1e-9)
            violation("dk candidate price must equal utility");
        } else {
          const double floor =
              u * (1.0 - cfg.percentile_weight - cfg.congestion_weight);
          if (qr.quote.price < floor - 1e-9 || qr.quote.price > u + 1e-9)
            violation("preempt-candidate price out of band");
        }
        break;
      case QuoteTag::Rejected:
        if (qr.quote.price <= u)
          violation("rejected price not above utility");
        break;
    }
  }

  // retention never preempts
  if (!is_preemptive(scenario.algorithm)) {
    if (result.metrics.preemption_events != 0 || !result.preemptions.empty())
      violation("retention run preempted");
    for (const auto& run : result.finished_runs)
      if (run.state == RunState::Preempted)
        violation("retention run left a preempted record");
  }

  // all-or-nothing credit
  double credited = 0.0;
  for (const auto& run : result.finished_runs)
    if (run.state == RunState::Completed) credited += run.job.utility;
  if (std::abs(credited - result.metrics.completed.utility) > 1e-6)
    violation("completed utility does not match finished runs");

  // conservation
  const Metrics& m = result.metrics;
  const long sum_counts = m.completed.count + m.rejected.count +
                          m.preempted_lost.count + m.in_flight.count;
  if (sum_counts != m.generated.count)
    violation("outcome counts do not partition the workload");
  const double sum_util = m.completed.utility + m.rejected.utility +
                          m.preempted_lost.utility + m.in_flight.utility;
  if (std::abs(sum_util - m.generated.utility) > 1e-6)
    violation("outcome utilities do not sum to generated utility");
}

// ---------------------------------------------------------------------------
// reports

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

nlohmann::json bucket_json(const OutcomeBucket& b) {
  return {{"count", b.count}, {"utility", b.utility}};
}

}  // namespace

nlohmann::json metrics_to_json(const Metrics& m) {
  nlohmann::json out;
  out["generated"] = bucket_json(m.generated);
  out["completed"] = bucket_json(m.completed);
  out["rejected"] = bucket_json(m.rejected);
  out["preempted_lost"] = bucket_json(m.preempted_lost);
  out["in_flight"] = bucket_json(m.in_flight);
  out["preempted_ever"] = bucket_json(m.preempted_ever);
  out["preemption_events"] = m.preemption_events;
  out["admissions"] = m.admissions;
  out["bids"] = m.bids;
  out["abstentions"] = m.abstentions;
  nlohmann::json cls;
  for (const auto& [key, c] : m.by_class) {
    cls[key] = {{"generated", bucket_json(c.generated)},
                {"completed", bucket_json(c.completed)},
                {"rejected", bucket_json(c.rejected)},
                {"preempted_lost", bucket_json(c.preempted_lost)},
                {"in_flight", bucket_json(c.in_flight)},
                {"preempted_ever", bucket_json(c.preempted_ever)}};
  }
  out["by_class"] = cls;
  return out;
}

void write_reports(const SimulationResult& result, const Scenario& scenario,
                   const std::filesystem::path& outdir, ReportFormat format) {
  std::filesystem::create_directories(outdir);
  const Metrics& m = result.metrics;

  if (format != ReportFormat::Csv) {
    nlohmann::json top;
    top["scenario"] = scenario.name;
    top["algorithm"] = to_string(scenario.algorithm);
    top["seed"] = scenario.seed;
    top["adjust_auction_time"] = scenario.adjust_auction_time;
    top["metrics"] = metrics_to_json(m);
    std::ofstream(outdir / "metrics.json") << top.dump(2) << "\n";
  }

  if (format != ReportFormat::Json) {
    std::ofstream csv(outdir / "metrics.csv");
    csv << "metric,count,utility\n";
    auto row = [&](const char* name, const OutcomeBucket& b) {
      csv << name << "," << b.count << "," << fmt(b.utility) << "\n";
    };
    row("generated", m.generated);
    row("completed", m.completed);
    row("rejected", m.rejected);
    row("preempted_lost", m.preempted_lost);
    row("in_flight", m.in_flight);
    row("preempted_ever", m.preempted_ever);
    csv << "preemption_events," << m.preemption_events << ",\n";
    csv << "admissions," << m.admissions << ",\n";
    csv << "bids," << m.bids << ",\n";
    csv << "abstentions," << m.abstentions << ",\n";

    std::ofstream cls(outdir / "metrics_by_class.csv");
    cls << "class,outcome,count,utility\n";
    for (const auto& [key, c] : m.by_class) {
      auto crow = [&](const char* name, const OutcomeBucket& b) {
        cls << key << "," << name << "," << b.count << "," << fmt(b.utility)
            << "\n";
      };
      crow("generated", c.generated);
      crow("completed", c.completed);
      crow("rejected", c.rejected);
      crow("preempted_lost", c.preempted_lost);
      crow("in_flight", c.in_flight);
      crow("preempted_ever", c.preempted_ever);
    }
  }

  // auction log, grouped by epoch
  {
    std::ofstream log(outdir / "auction_log.jsonl");
    std::size_t iq = 0, is = 0, ia = 0, ip = 0;
    for (Slot e = 0; e < scenario.clock.horizon; ++e) {
      for (; iq < result.quotes.size() && result.quotes[iq].epoch == e; ++iq) {
        const auto& q = result.quotes[iq].quote;
        nlohmann::json j{{"t", "quote"},       {"epoch", e},
                         {"server", q.server_id}, {"job", q.job_id},
                         {"price", q.price},   {"tag", to_string(q.tag)}};
        log << j.dump() << "\n";
      }
      for (; is < result.selections.size() && result.selections[is].epoch == e;
           ++is) {
        const auto& s = result.selections[is];
        nlohmann::json j{{"t", "select"},
                         {"epoch", e},
                         {"job", s.job_id},
                         {"abstained", s.abstained},
                         {"server", s.server_id},
                         {"price", s.price}};
        log << j.dump() << "\n";
      }
      for (; ia < result.admissions.size() && result.admissions[ia].epoch == e;
           ++ia) {
        const auto& a = result.admissions[ia];
        nlohmann::json j{{"t", "admit"},     {"epoch", e},
                         {"server", a.server_id}, {"job", a.job_id},
                         {"start", a.start}, {"preemptive", a.via_preemption}};
        log << j.dump() << "\n";
      }
      for (; ip < result.preemptions.size() &&
             result.preemptions[ip].epoch == e;
           ++ip) {
        const auto& p = result.preemptions[ip];
        nlohmann::json j{{"t", "preempt"},
                         {"epoch", e},
                         {"server", p.server_id},
                         {"victim", p.victim},
                         {"admitted", p.admitted}};
        log << j.dump() << "\n";
      }
    }
  }

  // per-slot allocation trace for invariant replay
  {
    struct Row {
      Slot slot;
      int server;
      JobId job;
      double up, cp, dn, held;
    };
    std::vector<Row> rows;
    for (const auto& run : result.finished_runs)
      for (Slot n = run.plan.start; n < run.executed_until; ++n) {
        const SlotReservation* r = run.plan.at(n);
        rows.push_back({n, run.server_id, run.job.id, r->upload, r->compute,
                        r->download, run.plan.storage_held(n)});
      }
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
      if (a.slot != b.slot) return a.slot < b.slot;
      if (a.server != b.server) return a.server < b.server;
      return a.job < b.job;
    });
    std::ofstream trace(outdir / "alloc_trace.csv");
    trace << "slot,server,job,upload,compute,download,storage_held\n";
    for (const auto& r : rows)
      trace << r.slot << "," << r.server << "," << r.job << "," << fmt(r.up)
            << "," << fmt(r.cp) << "," << fmt(r.dn) << "," << fmt(r.held)
            << "\n";
  }

  if (scenario.emit_timeseries) {
    std::ofstream ts(outdir / "timeseries.csv");
    ts << "epoch,completed,admitted,preempted,completed_utility\n";
    for (const auto& s : result.per_epoch)
      ts << s.epoch << "," << s.completed << "," << s.admitted << ","
         << s.preempted << "," << fmt(s.completed_utility) << "\n";
  }

  // wall-clock timing is measured, not simulated; it lives apart so the
  // files above stay byte-identical across runs
  {
    nlohmann::json t{{"mean_auction_wall_s", m.mean_auction_wall_s}};
    std::ofstream(outdir / "timing.json") << t.dump(2) << "\n";
  }
}

}  // namespace edgesim
