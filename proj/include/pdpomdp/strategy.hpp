#pragma once

#include "pdpomdp/model.hpp"
#include "pdpomdp/sec.hpp"

#include <map>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace pdpomdp {

/// Finite-state controller. Memory states are indices into `memory`.
struct StrategySpec {
  std::vector<std::string> memory;
  std::size_t start = 0;
  /// Per memory state, a distribution over actions.
  std::vector<std::vector<std::pair<ActionId, Rational>>> choose;
  /// (memory, action, observation) -> memory. Missing entries keep the memory state.
  std::map<std::tuple<std::size_t, ActionId, ObsId>, std::size_t> update;

  std::size_t next(std::size_t mem, ActionId a, ObsId o) const;
};

/// Throws ValidationError when a distribution does not sum to 1 or an index is out of range.
void validate_strategy(const Pomdp& m, const StrategySpec& s);

/// Parses
///
///   memory: m0 m1
///   start: m0
///   choose: m0 a 1/2
///   update: m0 a o1 -> m1
///
/// against the model's identifiers. Throws SyntaxError or ValidationError.
StrategySpec parse_strategy(const Pomdp& m, std::string_view text);

/// Plays `wait` k times, then `switch_to` forever. Observing one of the
/// escape observations jumps to a memory state that plays the mapped action.
StrategySpec wait_then_switch(const Pomdp& m, std::size_t k, ActionId wait, ActionId switch_to,
                              const std::vector<std::pair<ObsId, ActionId>>& escapes = {});

/// Tracks the current support inside f and picks uniformly from f(S).
/// Leaving the domain keeps the last choice set.
StrategySpec uniform_in_sec(const Pomdp& m, const Sec& f, Support start);

}  // namespace pdpomdp
