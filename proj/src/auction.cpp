#include "edgesim/auction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "edgesim/rng.hpp"

namespace edgesim {

namespace {

double density_remaining(const JobRun& run, Slot now) {
  const Slot remaining = run.effective_expiry - now;
  return run.job.utility / static_cast<double>(std::max<Slot>(1, remaining));
}

double density_remaining(const BidRequest& r, Slot now) {
  const Slot remaining = r.effective_expiry - now;
  return r.job.utility / static_cast<double>(std::max<Slot>(1, remaining));
}

double density_deadline(const BidRequest& r) {
  return r.job.utility / static_cast<double>(std::max<Slot>(1, r.effective_deadline()));
}

// descending density, job id breaks ties
void sort_requests_by_density(std::vector<BidRequest>& v, Slot now) {
  std::stable_sort(v.begin(), v.end(),
                   [now](const BidRequest& a, const BidRequest& b) {
                     const double da = density_remaining(a, now);
                     const double db = density_remaining(b, now);
                     if (da != db) return da > db;
                     return a.job.id < b.job.id;
                   });
}

// True when the job could fit an empty server of this size at its current
// window; failing this, no admission there is ever possible.
bool possible_on(const ServerState& server, const BidRequest& r) {
  return r.footprint.fits_within(server.capacity());
}

std::vector<KnapsackItem> request_items(const std::vector<BidRequest>& reqs) {
  std::vector<KnapsackItem> items;
  items.reserve(reqs.size());
  for (const auto& r : reqs)
    items.push_back({r.job.id, r.job.utility, r.footprint});
  return items;
}

bool contains(const std::vector<JobId>& ids, JobId id) {
  return std::binary_search(ids.begin(), ids.end(), id);
}

}  // namespace

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::KgPreempt: return "kg-preempt";
    case Algorithm::KgRetain: return "kg-retain";
    case Algorithm::DkPreempt: return "dk-preempt";
    default: return "dk-retain";
  }
}

std::optional<Algorithm> algorithm_from_string(const std::string& s) {
  if (s == "kg-preempt") return Algorithm::KgPreempt;
  if (s == "kg-retain") return Algorithm::KgRetain;
  if (s == "dk-preempt") return Algorithm::DkPreempt;
  if (s == "dk-retain") return Algorithm::DkRetain;
  return std::nullopt;
}

const char* to_string(QuoteTag t) {
  switch (t) {
    case QuoteTag::FitMarked: return "fit";
    case QuoteTag::PreemptCandidate: return "preempt";
    default: return "rejected";
  }
}

void AuctionConfig::validate() const {
  if (percentile_weight < 0 || congestion_weight < 0 || fit_discount <= 0 ||
      preempt_margin < 0 || reject_markup <= 0)
    throw std::invalid_argument("auction config: weights must be positive");
  if (percentile_weight + congestion_weight >= fit_discount)
    throw std::invalid_argument(
        "auction config: percentile_weight + congestion_weight must stay "
        "below fit_discount");
}

double percentile(const BidRequest& request, const std::vector<JobRun>& running,
                  Slot now) {
  if (running.empty()) return 1.0;
  const double mine = density_deadline(request);
  std::size_t below = 0;
  for (const auto& run : running)
    if (density_remaining(run, now) < mine) ++below;
  return static_cast<double>(below) / static_cast<double>(running.size());
}

double congestion(const ResourceVector& footprint,
                  const ResourceVector& residual) {
  auto ratio = [](double need, double avail) {
    if (need <= 0.0) return 0.0;
    if (avail <= 0.0) return 1.0;
    return std::min(1.0, need / avail);
  };
  return (ratio(footprint.storage, residual.storage) +
          ratio(footprint.compute, residual.compute) +
          ratio(footprint.uplink, residual.uplink) +
          ratio(footprint.downlink, residual.downlink)) /
         4.0;
}

Round1Result round1_kg(const ServerState& server,
                       const std::vector<BidRequest>& requests,
                       const AuctionConfig& config, Slot now,
                       std::uint64_t seed) {
  Round1Result out;
  const Slot start = now + 1;
  const ResourceVector residual = server.residual(start);

  out.fit_marked = ga_knapsack(request_items(requests), residual, seed);

  for (const auto& r : requests) {
    PriceQuote q;
    q.server_id = server.id();
    q.job_id = r.job.id;
    if (contains(out.fit_marked, r.job.id)) {
      q.tag = QuoteTag::FitMarked;
      q.price = r.job.utility * (1.0 - config.fit_discount);
    } else if (possible_on(server, r)) {
      const double pct = percentile(r, server.running(), now);
      const double cong = congestion(r.footprint, residual);
      const double discount = config.percentile_weight * pct +
                              config.congestion_weight * (1.0 - cong);
      q.tag = QuoteTag::PreemptCandidate;
      q.price = r.job.utility * (1.0 - discount);
    } else {
      q.tag = QuoteTag::Rejected;
      q.price = r.job.utility * (1.0 + config.reject_markup);
    }
    out.quotes.push_back(q);
  }
  return out;
}

Round1Result round1_dk(const ServerState& server,
                       const std::vector<BidRequest>& requests,
                       const AuctionConfig& config, Slot now,
                       std::uint64_t seed) {
  Round1Result out;
  const Slot start = now + 1;
  const ResourceVector residual = server.residual(start);

  out.fit_marked = ga_knapsack(request_items(requests), residual, seed);

  for (const auto& r : requests) {
    PriceQuote q;
    q.server_id = server.id();
    q.job_id = r.job.id;
    if (contains(out.fit_marked, r.job.id)) {
      q.tag = QuoteTag::FitMarked;
      q.price = r.job.utility * (1.0 - config.fit_discount);
    } else if (possible_on(server, r)) {
      q.tag = QuoteTag::PreemptCandidate;
      q.price = r.job.utility;  // no discount, no rejection
    } else {
      q.tag = QuoteTag::Rejected;
      q.price = r.job.utility * (1.0 + config.reject_markup);
    }
    out.quotes.push_back(q);
  }
  return out;
}

Selection client_select(const std::vector<PriceQuote>& quotes, double utility,
                        std::uint64_t seed) {
  Selection sel;
  if (quotes.empty()) return sel;
  double min_price = quotes.front().price;
  for (const auto& q : quotes) min_price = std::min(min_price, q.price);
  if (min_price > utility + kResourceTol) return sel;  // nothing worth taking

  std::vector<const PriceQuote*> tied;
  for (const auto& q : quotes)
    if (q.price <= min_price + kResourceTol) tied.push_back(&q);

  Rng rng(seed);
  const PriceQuote* pick = tied[rng.below(tied.size())];
  sel.abstained = false;
  sel.server_id = pick->server_id;
  sel.price = pick->price;
  return sel;
}

namespace {

bool margin_test(const BidRequest& candidate, const JobRun& victim,
                 const AuctionConfig& config, Slot now) {
  const double mine = candidate.job.utility /
                      static_cast<double>(std::max<Slot>(1, candidate.effective_deadline()));
  const double theirs = density_remaining(victim, now);
  if (config.margin_mode == AuctionConfig::MarginMode::BoostNew)
    return mine * (1.0 + config.preempt_margin) >= theirs;
  return mine >= (1.0 + config.preempt_margin) * theirs;
}

// Space the victim occupies from the candidate's perspective: its held
// storage plus its per-slot reservation at the candidate's start slot.
ResourceVector victim_space(const JobRun& victim, Slot start) {
  return victim.occupied_at(start);
}

JobRun make_run(const BidRequest& r, int server_id, PlacementPlan plan) {
  JobRun run;
  run.job = r.job;
  run.server_id = server_id;
  run.started_at = plan.start;
  run.effective_expiry = r.effective_expiry;
  run.executed_until = plan.start;
  run.plan = std::move(plan);
  return run;
}

}  // namespace

Round2Result round2_kg(ServerState& server, std::vector<BidRequest> returning,
                       const std::vector<JobId>& fit_marked,
                       const AuctionConfig& config, Slot now,
                       bool allow_preemption) {
  Round2Result out;
  const Slot start = now + 1;

  std::vector<JobId> marked = fit_marked;
  std::sort(marked.begin(), marked.end());

  // victims are the jobs that were already running when the round began
  std::vector<JobId> victim_order;
  {
    std::vector<const JobRun*> runs;
    for (const auto& r : server.running()) runs.push_back(&r);
    std::stable_sort(runs.begin(), runs.end(),
                     [now](const JobRun* a, const JobRun* b) {
                       const double da = density_remaining(*a, now);
                       const double db = density_remaining(*b, now);
                       if (da != db) return da < db;  // weakest first
                       return a->job.id < b->job.id;
                     });
    for (const JobRun* r : runs) victim_order.push_back(r->job.id);
  }

  std::vector<BidRequest> fit, queue;
  for (auto& r : returning)
    (contains(marked, r.job.id) ? fit : queue).push_back(std::move(r));

  sort_requests_by_density(fit, now);
  for (auto& r : fit) {
    if (auto plan = try_place(r.job, server, start, r.until)) {
      server.commit(make_run(r, server.id(), std::move(*plan)));
      out.admitted.push_back(r.job.id);
    } else {
      queue.push_back(std::move(r));  // marked but crowded out: requeue
    }
  }

  sort_requests_by_density(queue, now);
  for (const auto& r : queue) {
    if (auto plan = try_place(r.job, server, start, r.until)) {
      server.commit(make_run(r, server.id(), std::move(*plan)));
      out.admitted.push_back(r.job.id);
      continue;
    }
    bool admitted = false;
    if (allow_preemption) {
      for (JobId victim_id : victim_order) {
        const JobRun* victim = server.find_run(victim_id);
        if (!victim) continue;  // already evicted
        if (!margin_test(r, *victim, config, now)) continue;
        const ResourceVector room =
            victim_space(*victim, start) + server.residual(start);
        if (!r.footprint.fits_within(room)) continue;
        if (auto plan = try_place(r.job, server, start, r.until, victim,
                                  start)) {
          PreemptResult evicted = preempt(server, victim_id, start);
          out.preempted.push_back(std::move(evicted.run));
          out.preemption_pairs.emplace_back(victim_id, r.job.id);
          server.commit(make_run(r, server.id(), std::move(*plan)));
          out.admitted.push_back(r.job.id);
          admitted = true;
          break;  // at most one victim per admitted job
        }
      }
    }
    if (!admitted) out.rejected.push_back(r.job.id);
  }
  return out;
}

ResourceVector remaining_footprint(const JobRun& run, Slot start) {
  const Slot remaining = std::max<Slot>(3, run.effective_expiry - start);
  const double window = static_cast<double>(remaining - 2);
  const double rem_u = std::max(0.0, run.job.input_mb - run.uploaded);
  const double rem_k = std::max(0.0, run.job.compute_mflops - run.processed);
  const double rem_d = std::max(0.0, run.job.output_mb - run.downloaded);
  return {run.job.input_mb, rem_k / window, rem_u / window, rem_d / window};
}

Round2Result round2_dk(ServerState& server, std::vector<BidRequest> returning,
                       const AuctionConfig& config, Slot now,
                       bool allow_preemption, std::uint64_t seed) {
  (void)config;
  Round2Result out;
  const Slot start = now + 1;

  if (!allow_preemption) {
    // knapsack over residual capacity, returning jobs only
    std::vector<JobId> picked =
        ga_knapsack(request_items(returning), server.residual(start), seed);
    sort_requests_by_density(returning, now);
    for (const auto& r : returning) {
      if (contains(picked, r.job.id)) {
        if (auto plan = try_place(r.job, server, start, r.until)) {
          server.commit(make_run(r, server.id(), std::move(*plan)));
          out.admitted.push_back(r.job.id);
          continue;
        }
      }
      out.rejected.push_back(r.job.id);
    }
    return out;
  }

  // preemptive: re-auction the whole server over total capacity
  std::vector<KnapsackItem> items;
  for (const auto& run : server.running())
    items.push_back({run.job.id, run.job.utility,
                     remaining_footprint(run, start)});
  for (const auto& r : returning)
    items.push_back({r.job.id, r.job.utility, r.footprint});

  std::vector<JobId> picked = ga_knapsack(items, server.capacity(), seed);

  struct Entry {
    JobId id;
    double score;
    bool running;
    const BidRequest* request;  // null for running entries
  };
  std::vector<Entry> order;
  for (const auto& run : server.running()) {
    const double base = contains(picked, run.job.id) ? 1000.0 : 1.0;
    order.push_back({run.job.id, base + density_remaining(run, now), true,
                     nullptr});
  }
  for (const auto& r : returning) {
    const double base = contains(picked, r.job.id) ? 1000.0 : 1.0;
    order.push_back({r.job.id, base + density_remaining(r, now), false, &r});
  }
  std::stable_sort(order.begin(), order.end(), [](const Entry& a, const Entry& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  });

  std::vector<JobRun> previous = server.drain_for_rebuild();
  auto find_previous = [&](JobId id) -> JobRun* {
    for (auto& run : previous)
      if (run.job.id == id) return &run;
    return nullptr;
  };

  for (const auto& entry : order) {
    if (entry.running) {
      JobRun* run = find_previous(entry.id);
      // the run keeps its existing plan if the refilled ledger still has room
      bool fits = true;
      for (Slot n = start; n < run->plan.end() && fits; ++n) {
        const SlotReservation* r = run->plan.at(n);
        ResourceVector need{run->plan.storage_held(n), r->compute, r->upload,
                            r->download};
        fits = need.fits_within(server.residual(n));
      }
      if (fits) {
        server.recommit(std::move(*run), start);
        run->job.id = -1;  // consumed
      }
    } else {
      const BidRequest& r = *entry.request;
      if (auto plan = try_place(r.job, server, start, r.until)) {
        server.commit(make_run(r, server.id(), std::move(*plan)));
        out.admitted.push_back(r.job.id);
      } else {
        out.rejected.push_back(r.job.id);
      }
    }
  }

  // whatever was not re-admitted is preempted
  for (auto& run : previous) {
    if (run.job.id < 0) continue;
    run.state = RunState::Preempted;
    run.preempted_after = start - run.started_at;
    if (run.executed_until > start) run.executed_until = start;
    out.preemption_pairs.emplace_back(run.job.id, -1);
    out.preempted.push_back(std::move(run));
  }
  return out;
}

}  // namespace edgesim
