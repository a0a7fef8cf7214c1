#include "pdpomdp/belief.hpp"
#include "pdpomdp/error.hpp"

#include <algorithm>
#include <map>

namespace pdpomdp {

SubBelief SubBelief::from_entries(std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const Entry& x, const Entry& y) { return x.first < y.first; });
  SubBelief b;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i > 0 && entries[i].first == entries[i - 1].first) {
      throw Error(ErrorKind::InvalidArgument, "sub-belief lists a state twice");
    }
    if (entries[i].second <= 0) {
      throw Error(ErrorKind::InvalidArgument, "sub-belief masses must be positive");
    }
    b.mass_ += entries[i].second;
  }
  if (b.mass_ > 1) throw Error(ErrorKind::InvalidArgument, "sub-belief mass exceeds 1");
  b.entries_ = std::move(entries);
  return b;
}

SubBelief SubBelief::dirac(StateId q, const Rational& mass) { return from_entries({{q, mass}}); }

Rational SubBelief::at(StateId q) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), q,
                             [](const Entry& e, StateId s) { return e.first < s; });
  if (it == entries_.end() || it->first != q) return 0;
  return it->second;
}

const Rational& SubBelief::min_entry() const {
  if (entries_.empty()) throw Error(ErrorKind::EmptyResult, "empty sub-belief has no minimum");
  const Rational* best = &entries_.front().second;
  for (const auto& e : entries_) {
    if (e.second < *best) best = &e.second;
  }
  return *best;
}

Support SubBelief::support() const {
  Support s;
  for (const auto& e : entries_) {
    if (e.first >= kMaxSupportStates) throw Error(ErrorKind::TooManyStates, "state id beyond 64");
    s = s.with(e.first);
  }
  return s;
}

std::vector<StateId> SubBelief::support_states() const {
  std::vector<StateId> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.first);
  return out;
}

SubBelief SubBelief::scaled(const Rational& factor) const {
  std::vector<Entry> out = entries_;
  for (auto& e : out) e.second *= factor;
  return from_entries(std::move(out));
}

std::string SubBelief::key() const {
  std::string out;
  for (const auto& e : entries_) {
    if (!out.empty()) out += ',';
    out += std::to_string(e.first);
    out += ':';
    out += exact_string(e.second);
  }
  return out;
}

std::string SubBelief::format(const std::vector<std::string>& names) const {
  std::string out = "{";
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i > 0) out += ", ";
    out += names.at(entries_[i].first) + ":" + exact_string(entries_[i].second);
  }
  return out + "}";
}

Rational obs_probability(const Pomdp& m, const SubBelief& b, ActionId a, ObsId o) {
  if (b.empty()) return 0;
  Rational total = 0;
  for (const auto& [q, mass] : b.entries()) {
    for (const auto& t : m.out(q, a)) {
      if (t.obs == o) total += mass * t.prob;
    }
  }
  return total / b.mass();
}

SubBelief belief_update(const Pomdp& m, const SubBelief& b, ActionId a, ObsId o) {
  std::map<StateId, Rational> acc;
  Rational total = 0;
  for (const auto& [q, mass] : b.entries()) {
    for (const auto& t : m.out(q, a)) {
      if (t.obs != o) continue;
      Rational w = mass * t.prob;
      acc[t.next] += w;
      total += w;
    }
  }
  if (total == 0) {
    throw Error(ErrorKind::ZeroObservationProbability,
                "observation '" + m.observations.at(o) + "' has probability 0 under action '" +
                    m.actions.at(a) + "'");
  }
  Rational factor = b.mass() / total;
  std::vector<SubBelief::Entry> entries;
  entries.reserve(acc.size());
  for (auto& [q, w] : acc) entries.emplace_back(q, w * factor);
  return SubBelief::from_entries(std::move(entries));
}

SubBelief cut(const SubBelief& b, const Rational& eta) {
  if (eta <= 0) throw Error(ErrorKind::InvalidArgument, "cut threshold must be positive");
  std::vector<SubBelief::Entry> kept;
  for (const auto& e : b.entries()) {
    if (e.second >= eta) kept.push_back(e);
  }
  if (kept.empty()) throw Error(ErrorKind::EmptyResult, "every entry falls below the cut threshold");
  return SubBelief::from_entries(std::move(kept));
}

SubBelief restrict(const SubBelief& b, Support s) {
  std::vector<SubBelief::Entry> kept;
  for (const auto& e : b.entries()) {
    if (e.first < kMaxSupportStates && s.contains(e.first)) kept.push_back(e);
  }
  return SubBelief::from_entries(std::move(kept));
}

}  // namespace pdpomdp
