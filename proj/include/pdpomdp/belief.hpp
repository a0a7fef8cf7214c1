#pragma once

#include "pdpomdp/model.hpp"

#include <string>
#include <utility>
#include <vector>

namespace pdpomdp {

/// Map from states to positive exact masses with total at most 1.
/// Entries are kept sorted by state id, so equality is exact and structural.
class SubBelief {
 public:
  using Entry = std::pair<StateId, Rational>;

  SubBelief() = default;

  /// Throws Error(InvalidArgument) on duplicate states, non-positive masses or total > 1.
  static SubBelief from_entries(std::vector<Entry> entries);
  static SubBelief dirac(StateId q, const Rational& mass = 1);

  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  const Rational& mass() const { return mass_; }
  Rational at(StateId q) const;
  const Rational& min_entry() const;

  Support support() const;
  std::vector<StateId> support_states() const;

  SubBelief scaled(const Rational& factor) const;

  /// Canonical text, e.g. "q1:1/2,q2:1/2" with numeric ids.
  std::string key() const;
  std::string format(const std::vector<std::string>& names) const;

  friend bool operator==(const SubBelief& a, const SubBelief& b) { return a.entries_ == b.entries_; }
  friend bool operator<(const SubBelief& a, const SubBelief& b) { return a.entries_ < b.entries_; }

 private:
  std::vector<Entry> entries_;
  Rational mass_ = 0;
};

/// T(o | b, a) for the normalized belief b / ||b||.
Rational obs_probability(const Pomdp& m, const SubBelief& b, ActionId a, ObsId o);

/// Conditional update rescaled to keep ||b||. Throws ZeroObservationProbability.
SubBelief belief_update(const Pomdp& m, const SubBelief& b, ActionId a, ObsId o);

/// Drops entries below eta. Throws EmptyResult when nothing survives.
SubBelief cut(const SubBelief& b, const Rational& eta);

SubBelief restrict(const SubBelief& b, Support s);

}  // namespace pdpomdp
