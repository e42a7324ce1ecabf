#pragma once

#include <cstdint>
#include <vector>

#include "edgesim/resources.hpp"

namespace edgesim {

// One candidate for a multi-dimensional 0/1 knapsack: value is a job's
// stated utility, weight its per-slot footprint.
struct KnapsackItem {
  std::int64_t id = 0;
  double value = 0.0;
  ResourceVector weight;
};

struct GaKnapsackConfig {
  int generations = 30;
  int population = 0;          // 0 -> max(50, 2 * items)
  double crossover_rate = 0.8;
  double mutation_rate = 0.0;  // 0 -> 1 / items
  int elitism = 1;
};

// Genetic-algorithm knapsack: bitstring population, fitness = total value
// with a death penalty for infeasible selections, tournament selection,
// single-point crossover, per-bit mutation. The all-ones individual is
// seeded into the initial population when it is feasible, so instances
// where everything fits are solved exactly. Deterministic given the seed.
// Returns the selected ids, sorted ascending; the selection always fits
// within `capacity`.
std::vector<std::int64_t> ga_knapsack(const std::vector<KnapsackItem>& items,
                                      const ResourceVector& capacity,
                                      std::uint64_t seed,
                                      const GaKnapsackConfig& config = {});

// Exhaustive enumeration, at most 20 items (throws above). Ties on value are
// broken toward the lexicographically smallest sorted id set.
std::vector<std::int64_t> exact_knapsack(const std::vector<KnapsackItem>& items,
                                         const ResourceVector& capacity);

double selection_value(const std::vector<KnapsackItem>& items,
                       const std::vector<std::int64_t>& ids);

}  // namespace edgesim
