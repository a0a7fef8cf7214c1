#pragma once

#include "pdpomdp/belief.hpp"
#include "pdpomdp/model_io.hpp"
#include "pdpomdp/strategy.hpp"

#include <cstdint>
#include <optional>

namespace pdpomdp {

/// Optimal probability of reaching TOP within n actions, by exhaustive
/// unfolding with memoized beliefs. Throws Error(NodeBudgetExceeded).
Rational naive_lower_bound(const Pomdp& normalized, const SubBelief& b, std::size_t n,
                           std::uint64_t node_budget = 2'000'000);

struct ExactOptions {
  std::size_t cap = 100000;
  double tolerance = 1e-12;
  std::size_t max_iterations = 1000000;
};

/// Maximal reachability probability when finitely many beliefs are
/// reachable from b. Throws Error(NotFinite) beyond the cap.
double exact_finite_belief_value(const Pomdp& normalized, const SubBelief& b, const ExactOptions& options = {});

struct SimulationReport {
  std::uint64_t runs = 0;
  std::uint64_t horizon = 0;
  std::uint64_t hits = 0;
  double estimate = 0;
  double interval_low = 0;
  double interval_high = 0;
  std::uint64_t seed = 0;
};

/// Wilson score interval at 95%.
std::pair<double, double> wilson_interval(std::uint64_t hits, std::uint64_t runs);

SimulationReport simulate(const Pomdp& normalized, const SubBelief& b, const StrategySpec& strategy,
                          std::uint64_t runs, std::uint64_t horizon, std::uint64_t seed);

struct GeneratorConfig {
  std::size_t states = 4;
  std::size_t actions = 2;
  std::size_t observations = 2;
  /// Observations per (state, action), capped by `observations`.
  std::size_t branching = 2;
  std::uint64_t seed = 0;
  /// One observation per state, revealing the successor.
  bool fully_observable = false;
};

/// Random posterior-deterministic model with an initial belief and one
/// target. Weights have denominators at most 16.
ModelFile generate_random_pd(const GeneratorConfig& config);

}  // namespace pdpomdp
