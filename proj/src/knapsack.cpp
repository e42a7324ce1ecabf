#include "edgesim/knapsack.hpp"

#include <algorithm>
#include <stdexcept>

#include "edgesim/rng.hpp"

namespace edgesim {

namespace {

using Genome = std::vector<std::uint8_t>;

double fitness(const Genome& g, const std::vector<KnapsackItem>& items,
               const ResourceVector& capacity) {
  ResourceVector load;
  double value = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g[i]) continue;
    load += items[i].weight;
    value += items[i].value;
  }
  if (!load.fits_within(capacity)) return 0.0;  // death penalty
  return value;
}

std::vector<std::int64_t> genome_ids(const Genome& g,
                                     const std::vector<KnapsackItem>& items) {
  std::vector<std::int64_t> ids;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g[i]) ids.push_back(items[i].id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace

std::vector<std::int64_t> ga_knapsack(const std::vector<KnapsackItem>& items,
                                      const ResourceVector& capacity,
                                      std::uint64_t seed,
                                      const GaKnapsackConfig& config) {
  const std::size_t n = items.size();
  if (n == 0) return {};
  if (config.generations < 1)
    throw std::invalid_argument("ga_knapsack: generations must be >= 1");

  const int pop_size = config.population > 0
                           ? config.population
                           : std::max<int>(50, 2 * static_cast<int>(n));
  const double mut = config.mutation_rate > 0.0
                         ? config.mutation_rate
                         : 1.0 / static_cast<double>(n);
  Rng rng(seed);

  std::vector<Genome> pop(static_cast<std::size_t>(pop_size));
  for (auto& g : pop) {
    g.resize(n);
    for (auto& bit : g) bit = rng.chance(0.5) ? 1 : 0;
  }
  // anchor individuals: everything (exact when it fits) and nothing
  // (feasible whatever the capacity)
  pop[0].assign(n, 1);
  if (fitness(pop[0], items, capacity) == 0.0) pop[0].assign(n, 0);
  if (pop.size() > 1) pop[1].assign(n, 0);

  std::vector<double> fit(pop.size());
  Genome best;
  double best_fit = -1.0;

  auto evaluate = [&] {
    for (std::size_t i = 0; i < pop.size(); ++i) {
      fit[i] = fitness(pop[i], items, capacity);
      if (fit[i] > best_fit) {
        best_fit = fit[i];
        best = pop[i];
      }
    }
  };
  evaluate();

  auto tournament = [&]() -> const Genome& {
    const std::size_t a = rng.below(pop.size());
    const std::size_t b = rng.below(pop.size());
    return fit[a] >= fit[b] ? pop[a] : pop[b];
  };

  for (int gen = 1; gen < config.generations; ++gen) {
    std::vector<Genome> next;
    next.reserve(pop.size());
    for (int e = 0; e < config.elitism && !best.empty(); ++e)
      next.push_back(best);
    while (next.size() < pop.size()) {
      Genome child = tournament();
      if (rng.chance(config.crossover_rate) && n > 1) {
        const Genome& other = tournament();
        const std::size_t cut = 1 + rng.below(n - 1);
        std::copy(other.begin() + static_cast<std::ptrdiff_t>(cut),
                  other.end(),
                  child.begin() + static_cast<std::ptrdiff_t>(cut));
      }
      for (auto& bit : child)
        if (rng.chance(mut)) bit ^= 1;
      next.push_back(std::move(child));
    }
    pop = std::move(next);
    evaluate();
  }

  if (best.empty() || best_fit <= 0.0) return {};
  return genome_ids(best, items);
}

std::vector<std::int64_t> exact_knapsack(const std::vector<KnapsackItem>& items,
                                         const ResourceVector& capacity) {
  const std::size_t n = items.size();
  if (n > 20)
    throw std::invalid_argument(
        "exact_knapsack: at most 20 items (got " + std::to_string(n) + ")");
  if (n == 0) return {};

  std::uint32_t best_mask = 0;
  double best_value = 0.0;

  auto ids_of = [&](std::uint32_t mask) {
    std::vector<std::int64_t> ids;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) ids.push_back(items[i].id);
    std::sort(ids.begin(), ids.end());
    return ids;
  };

  const std::uint32_t limit = 1u << n;
  for (std::uint32_t mask = 1; mask < limit; ++mask) {
    ResourceVector load;
    double value = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        load += items[i].weight;
        value += items[i].value;
      }
    }
    if (!load.fits_within(capacity)) continue;
    if (value > best_value + kResourceTol) {
      best_value = value;
      best_mask = mask;
    } else if (std::abs(value - best_value) <= kResourceTol &&
               best_mask != 0) {
      if (ids_of(mask) < ids_of(best_mask)) best_mask = mask;
    }
  }
  return ids_of(best_mask);
}

double selection_value(const std::vector<KnapsackItem>& items,
                       const std::vector<std::int64_t>& ids) {
  double v = 0.0;
  for (const auto& it : items)
    if (std::find(ids.begin(), ids.end(), it.id) != ids.end()) v += it.value;
  return v;
}

}  // namespace edgesim
