#pragma once

#include "pdpomdp/belief.hpp"
#include "pdpomdp/model.hpp"

#include <vector>

namespace pdpomdp {

/// Result of collapsing the targets into a fresh absorbing observable TOP
/// and the value-0 states into a fresh absorbing observable BOT.
struct Normalization {
  Pomdp model;
  /// Old state id -> new state id (targets map to TOP, value-0 states to BOT).
  std::vector<StateId> state_map;
  std::vector<StateId> merged_into_bot;
  /// True when the input already had the normal form and was kept as is.
  bool already_normal = false;

  SubBelief map_belief(const SubBelief& b) const;
};

/// Throws Error(EmptyTargets) for an empty target set.
Normalization normalize(const Pomdp& m, const std::vector<StateId>& targets);

/// Throws Error(NotNormalized) unless m carries normal-form marks.
void require_normalized(const Pomdp& m);

}  // namespace pdpomdp
