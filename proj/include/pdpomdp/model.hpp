#pragma once

#include "pdpomdp/rational.hpp"
#include "pdpomdp/support.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pdpomdp {

struct Transition {
  ObsId obs;
  StateId next;
  Rational prob;
};

/// Identifies the absorbing, observable target and sink of a normalized model.
struct NormalizedMarks {
  StateId top;
  StateId bot;
  ObsId top_obs;
  ObsId bot_obs;
};

/// Finite POMDP with an exact sparse kernel T(o, q' | q, a).
/// Construct through validate(); the invariants below are then guaranteed:
/// every row sums to exactly 1, probabilities are positive, and no
/// (observation, successor) pair repeats within a row.
struct Pomdp {
  std::string name;
  std::vector<std::string> states;
  std::vector<std::string> actions;
  std::vector<std::string> observations;
  /// trans[q][a], sorted by (obs, next).
  std::vector<std::vector<std::vector<Transition>>> trans;
  std::optional<NormalizedMarks> normalized;

  std::size_t num_states() const { return states.size(); }
  std::size_t num_actions() const { return actions.size(); }
  std::size_t num_observations() const { return observations.size(); }

  const std::vector<Transition>& out(StateId q, ActionId a) const { return trans[q][a]; }

  /// Marginal T(o | q, a).
  Rational obs_probability(StateId q, ActionId a, ObsId o) const;

  std::optional<StateId> find_state(std::string_view name) const;
  std::optional<ActionId> find_action(std::string_view name) const;
  std::optional<ObsId> find_observation(std::string_view name) const;

  /// Smallest positive probability in the transition table.
  Rational min_probability() const;
};

struct RawEdge {
  std::string obs;
  std::string next;
  Rational prob;
};

struct RawRow {
  std::string state;
  std::string action;
  std::vector<RawEdge> edges;
};

/// Unchecked, name-based model description.
struct RawModel {
  std::string name;
  std::vector<std::string> states;
  std::vector<std::string> actions;
  std::vector<std::string> observations;
  std::vector<RawRow> rows;
};

/// Builds a Pomdp or throws ValidationError listing every violation.
Pomdp validate(const RawModel& raw);

/// Converts back to a name-based description (rows in state/action order).
RawModel to_raw(const Pomdp& m);

struct DeterminismWitness {
  StateId state;
  ActionId action;
  ObsId obs;
  StateId first;
  StateId second;
};

/// nullopt when the model is posterior-deterministic.
std::optional<DeterminismWitness> check_posterior_deterministic(const Pomdp& m);

/// States with no path to any target in the underlying transition graph.
std::vector<StateId> value_zero_states(const Pomdp& m, const std::vector<StateId>& targets);

bool is_valid_identifier(std::string_view s);

}  // namespace pdpomdp
