#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "edgesim/engine.hpp"
#include "edgesim/knapsack.hpp"
#include "edgesim/server.hpp"

namespace edgesim {

enum class Algorithm { KgPreempt, KgRetain, DkPreempt, DkRetain };

inline bool is_preemptive(Algorithm a) {
  return a == Algorithm::KgPreempt || a == Algorithm::DkPreempt;
}
inline bool is_double_knapsack(Algorithm a) {
  return a == Algorithm::DkPreempt || a == Algorithm::DkRetain;
}
std::string to_string(Algorithm a);
std::optional<Algorithm> algorithm_from_string(const std::string& s);

enum class QuoteTag { FitMarked, PreemptCandidate, Rejected };
const char* to_string(QuoteTag t);

struct PriceQuote {
  int server_id = -1;
  JobId job_id = 0;
  double price = 0.0;
  QuoteTag tag = QuoteTag::Rejected;
};

struct AuctionConfig {
  double percentile_weight = 0.025;  // c1
  double congestion_weight = 0.025;  // c2
  double fit_discount = 0.10;
  double preempt_margin = 0.05;
  double reject_markup = 0.10;  // rejected jobs are priced above utility
  // BoostNew applies the margin to the candidate's side of the preemption
  // test (new * (1+m) >= running); RequireAbove demands the candidate
  // strictly clear the running job by the margin (new >= (1+m) * running).
  enum class MarginMode { BoostNew, RequireAbove };
  MarginMode margin_mode = MarginMode::BoostNew;

  void validate() const;  // throws unless c1 + c2 < fit_discount
};

// Bid-time view of one requesting job. `effective_expiry` already reflects
// any auction-duration deadline reduction; `until` additionally caps the
// placement window at the simulation horizon. `footprint` is taken at
// until - start slots remaining.
struct BidRequest {
  Job job;
  Slot effective_expiry = 0;
  Slot until = 0;
  ResourceVector footprint;

  Slot effective_deadline() const { return effective_expiry - job.arrival; }
};

// Fraction of running jobs whose utility per remaining slot is strictly
// below the requesting job's utility per deadline slot. Empty server -> 1.
double percentile(const BidRequest& request, const std::vector<JobRun>& running,
                  Slot now);

// Mean over the four dimensions of min(1, footprint / residual); an
// exhausted dimension counts as 1, so the result stays in [0, 1].
double congestion(const ResourceVector& footprint,
                  const ResourceVector& residual);

struct Round1Result {
  std::vector<PriceQuote> quotes;    // one per request, request order
  std::vector<JobId> fit_marked;     // knapsack members, remembered for R2
};

// Round-1 pricing with the greedy Round-2 in mind: knapsack members get the
// fit discount, the rest get a small percentile/congestion-driven discount
// capped below the fit discount, and jobs that could not fit even an empty
// server are priced above their utility.
Round1Result round1_kg(const ServerState& server,
                       const std::vector<BidRequest>& requests,
                       const AuctionConfig& config, Slot now,
                       std::uint64_t seed);

// Round-1 pricing for the double-knapsack variants: members get the fit
// discount, other feasible jobs are quoted at exactly their utility, and
// impossible jobs are priced above it.
Round1Result round1_dk(const ServerState& server,
                       const std::vector<BidRequest>& requests,
                       const AuctionConfig& config, Slot now,
                       std::uint64_t seed);

struct Selection {
  bool abstained = true;
  int server_id = -1;
  double price = 0.0;
};

// Cheapest quote wins; ties are broken uniformly at random. If every quote
// is priced above the job's utility the client abstains for this epoch.
Selection client_select(const std::vector<PriceQuote>& quotes, double utility,
                        std::uint64_t seed);

struct Round2Result {
  std::vector<JobId> admitted;
  std::vector<JobRun> preempted;    // evicted runs, state Preempted
  std::vector<JobId> rejected;
  std::vector<std::pair<JobId, JobId>> preemption_pairs;  // victim, admitted
};

// Greedy Round 2: fit-marked returners are admitted first, the rest are
// tried against residual capacity in descending utility/time-remaining
// order; in preemptive mode a failing job may evict the weakest running job
// that passes the value-margin and space tests (at most one victim each).
Round2Result round2_kg(ServerState& server, std::vector<BidRequest> returning,
                       const std::vector<JobId>& fit_marked,
                       const AuctionConfig& config, Slot now,
                       bool allow_preemption);

// Knapsack Round 2. Preemptive mode re-auctions the whole server: a
// knapsack over total capacity ranks running and returning jobs together
// (members score 1000 + density, the rest 1 + density) and the server is
// refilled in score order; running jobs that no longer fit are preempted.
// Retention mode runs the knapsack over residual capacity on returning jobs
// only.
Round2Result round2_dk(ServerState& server, std::vector<BidRequest> returning,
                       const AuctionConfig& config, Slot now,
                       bool allow_preemption, std::uint64_t seed);

// Knapsack weight standing in for an in-flight run: remaining stream totals
// spread over the remaining window.
ResourceVector remaining_footprint(const JobRun& run, Slot start);

}  // namespace edgesim
