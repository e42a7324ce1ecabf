#pragma once

#include <filesystem>
#include <string>

#include "edgesim/auction.hpp"
#include "edgesim/clock.hpp"
#include "edgesim/workload.hpp"

#include "json.hpp"

namespace edgesim {

// Per-algorithm auction duration in seconds, used by the
// deadline-adjustment mode.
struct AuctionCosts {
  double kg_preempt = 2.0;
  double kg_retain = 1.0;
  double dk_preempt = 5.0;
  double dk_retain = 4.0;

  double get(Algorithm a) const {
    switch (a) {
      case Algorithm::KgPreempt: return kg_preempt;
      case Algorithm::KgRetain: return kg_retain;
      case Algorithm::DkPreempt: return dk_preempt;
      default: return dk_retain;
    }
  }
};

struct Scenario {
  std::string name = "scenario";
  std::uint64_t seed = 1;
  Algorithm algorithm = Algorithm::KgPreempt;
  EpochClock clock{0, 1.0, 100};
  ServerSpec servers;
  WorkloadSpec workload;
  AuctionConfig auction;
  bool adjust_auction_time = false;
  AuctionCosts costs;
  bool parallel_auctions = false;
  bool emit_timeseries = false;

  void validate() const;
};

Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& s);
Scenario load_scenario_file(const std::filesystem::path& path);

// Deadline slots consumed by `attempts` auctions of duration `cost_s`.
inline Slot auction_penalty_slots(double cost_s, double slot_seconds,
                                  long attempts) {
  if (cost_s <= 0.0 || attempts <= 0) return 0;
  return static_cast<Slot>(
      std::ceil(cost_s / slot_seconds * static_cast<double>(attempts)));
}

// Enables the auction-duration deadline reduction with the given costs.
// A zero cost leaves behavior identical to the unadjusted run.
Scenario adjust_for_auction_time(Scenario s, const AuctionCosts& costs);

nlohmann::json job_to_json(const Job& j);
Job job_from_json(const nlohmann::json& j);

}  // namespace edgesim
