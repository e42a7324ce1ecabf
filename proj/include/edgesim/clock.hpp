#pragma once

#include <cassert>

#include "edgesim/job.hpp"

namespace edgesim {

// Discrete simulation clock. One epoch per slot: each slot carries one full
// two-round auction plus one step of execution.
struct EpochClock {
  Slot current = 0;
  double slot_seconds = 1.0;
  Slot horizon = 0;

  void advance() {
    assert(current < horizon);
    ++current;
  }

  Slot remaining() const { return horizon - current; }
};

}  // namespace edgesim
