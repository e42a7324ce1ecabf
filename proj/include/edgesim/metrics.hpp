#pragma once

#include <map>
#include <string>

#include "edgesim/job.hpp"

namespace edgesim {

struct OutcomeBucket {
  long count = 0;
  double utility = 0.0;

  void add(const Job& j) {
    ++count;
    utility += j.utility;
  }
};

struct ClassBreakdown {
  OutcomeBucket generated, completed, rejected, preempted_lost, in_flight,
      preempted_ever;
};

// Run-level accounting. Every generated job lands in exactly one of
// completed / rejected / preempted_lost / in_flight; preempted_ever
// additionally counts jobs preempted at least once whatever their final
// outcome (the figure-style "Preempted" column).
struct Metrics {
  OutcomeBucket generated, completed, rejected, preempted_lost, in_flight,
      preempted_ever;
  std::map<std::string, ClassBreakdown> by_class;

  long preemption_events = 0;
  long admissions = 0;
  long bids = 0;
  long abstentions = 0;

  // measured, and therefore excluded from the deterministic reports
  double mean_auction_wall_s = 0.0;
};

}  // namespace edgesim
