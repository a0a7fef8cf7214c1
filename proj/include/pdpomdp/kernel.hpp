#pragma once

#include "pdpomdp/model.hpp"

#include <optional>
#include <vector>

namespace pdpomdp {

/// Dense (state, action, observation) view of a model used by the support
/// analyses: successor sets and observation marginals.
class Kernel {
 public:
  /// Throws Error(TooManyStates) beyond kMaxSupportStates states.
  explicit Kernel(const Pomdp& m);

  std::size_t num_states() const { return states_; }
  std::size_t num_actions() const { return actions_; }
  std::size_t num_observations() const { return observations_; }

  Support successors(StateId q, ActionId a, ObsId o) const { return succ_[index(q, a, o)]; }
  const Rational& obs_probability(StateId q, ActionId a, ObsId o) const { return prob_[index(q, a, o)]; }

  /// The unique successor in a posterior-deterministic model.
  std::optional<StateId> successor(StateId q, ActionId a, ObsId o) const;

  /// delta(S, a, o); empty when no state of S can emit o under a.
  Support step(Support s, ActionId a, ObsId o) const;

  Support all_states() const;

 private:
  std::size_t index(StateId q, ActionId a, ObsId o) const {
    return (static_cast<std::size_t>(q) * actions_ + a) * observations_ + o;
  }

  std::size_t states_;
  std::size_t actions_;
  std::size_t observations_;
  std::vector<Support> succ_;
  std::vector<Rational> prob_;
};

/// support_step: delta(S, a, o) computed directly on a model.
Support support_step(const Pomdp& m, Support s, ActionId a, ObsId o);

}  // namespace pdpomdp
