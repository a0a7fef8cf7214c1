#include "pdpomdp/model.hpp"
#include "pdpomdp/error.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <tuple>
#include <unordered_map>

namespace pdpomdp {

namespace {

template <class Id>
std::optional<Id> find_in(const std::vector<std::string>& names, std::string_view name) {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return std::nullopt;
  return static_cast<Id>(it - names.begin());
}

std::unordered_map<std::string, std::uint32_t> index_names(const std::vector<std::string>& names,
                                                           const char* what,
                                                           std::vector<Issue>& issues) {
  std::unordered_map<std::string, std::uint32_t> index;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!is_valid_identifier(names[i])) {
      issues.push_back({ErrorKind::UnknownIdentifier,
                        std::string("malformed ") + what + " identifier '" + names[i] + "'"});
    }
    if (!index.emplace(names[i], static_cast<std::uint32_t>(i)).second) {
      issues.push_back({ErrorKind::DuplicateIdentifier,
                        std::string("duplicate ") + what + " '" + names[i] + "'"});
    }
  }
  return index;
}

}  // namespace

bool is_valid_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto alpha = [](char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; };
  if (!alpha(s.front())) return false;
  return std::all_of(s.begin(), s.end(), [&](char c) { return alpha(c) || (c >= '0' && c <= '9'); });
}

Rational Pomdp::obs_probability(StateId q, ActionId a, ObsId o) const {
  Rational total = 0;
  for (const auto& t : trans[q][a]) {
    if (t.obs == o) total += t.prob;
  }
  return total;
}

std::optional<StateId> Pomdp::find_state(std::string_view n) const { return find_in<StateId>(states, n); }
std::optional<ActionId> Pomdp::find_action(std::string_view n) const { return find_in<ActionId>(actions, n); }
std::optional<ObsId> Pomdp::find_observation(std::string_view n) const {
  return find_in<ObsId>(observations, n);
}

Rational Pomdp::min_probability() const {
  std::optional<Rational> best;
  for (const auto& row : trans) {
    for (const auto& edges : row) {
      for (const auto& t : edges) {
        if (!best || t.prob < *best) best = t.prob;
      }
    }
  }
  return best.value_or(Rational(1));
}

Pomdp validate(const RawModel& raw) {
  std::vector<Issue> issues;
  if (raw.states.empty()) issues.push_back({ErrorKind::UnknownIdentifier, "model declares no states"});
  if (raw.actions.empty()) issues.push_back({ErrorKind::UnknownIdentifier, "model declares no actions"});
  auto state_ix = index_names(raw.states, "state", issues);
  auto action_ix = index_names(raw.actions, "action", issues);
  auto obs_ix = index_names(raw.observations, "observation", issues);

  Pomdp m;
  m.name = raw.name;
  m.states = raw.states;
  m.actions = raw.actions;
  m.observations = raw.observations;
  m.trans.assign(raw.states.size(), std::vector<std::vector<Transition>>(raw.actions.size()));
  std::vector<std::vector<bool>> seen(raw.states.size(), std::vector<bool>(raw.actions.size(), false));

  for (const auto& row : raw.rows) {
    auto qi = state_ix.find(row.state);
    auto ai = action_ix.find(row.action);
    if (qi == state_ix.end()) {
      issues.push_back({ErrorKind::UnknownIdentifier, "unknown state '" + row.state + "'"});
    }
    if (ai == action_ix.end()) {
      issues.push_back({ErrorKind::UnknownIdentifier, "unknown action '" + row.action + "'"});
    }
    if (qi == state_ix.end() || ai == action_ix.end()) continue;
    const std::string where = "(" + row.state + ", " + row.action + ")";
    if (seen[qi->second][ai->second]) {
      issues.push_back({ErrorKind::DuplicateTransition, "transition row " + where + " given twice"});
      continue;
    }
    seen[qi->second][ai->second] = true;

    auto& edges = m.trans[qi->second][ai->second];
    Rational total = 0;
    for (const auto& e : row.edges) {
      auto oi = obs_ix.find(e.obs);
      auto ni = state_ix.find(e.next);
      if (oi == obs_ix.end()) {
        issues.push_back({ErrorKind::UnknownIdentifier, "unknown observation '" + e.obs + "' in " + where});
      }
      if (ni == state_ix.end()) {
        issues.push_back({ErrorKind::UnknownIdentifier, "unknown state '" + e.next + "' in " + where});
      }
      if (e.prob <= 0) {
        issues.push_back({ErrorKind::NonPositiveProbability,
                          "non-positive probability " + exact_string(e.prob) + " in " + where});
      }
      total += e.prob;
      if (oi == obs_ix.end() || ni == state_ix.end() || e.prob <= 0) continue;
      bool dup = std::any_of(edges.begin(), edges.end(), [&](const Transition& t) {
        return t.obs == oi->second && t.next == ni->second;
      });
      if (dup) {
        issues.push_back({ErrorKind::DuplicateEdge,
                          "duplicate edge (" + e.obs + ", " + e.next + ") in " + where});
        continue;
      }
      edges.push_back({oi->second, ni->second, e.prob});
    }
    if (total != 1) {
      issues.push_back({ErrorKind::DistributionSum,
                        "probabilities of " + where + " sum to " + exact_string(total) + ", not 1"});
    }
    std::sort(edges.begin(), edges.end(), [](const Transition& x, const Transition& y) {
      return std::tie(x.obs, x.next) < std::tie(y.obs, y.next);
    });
  }

  for (std::size_t q = 0; q < raw.states.size(); ++q) {
    for (std::size_t a = 0; a < raw.actions.size(); ++a) {
      if (!seen[q][a]) {
        issues.push_back({ErrorKind::MissingTransition,
                          "missing transition row for (" + raw.states[q] + ", " + raw.actions[a] + ")"});
      }
    }
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return m;
}

RawModel to_raw(const Pomdp& m) {
  RawModel raw;
  raw.name = m.name;
  raw.states = m.states;
  raw.actions = m.actions;
  raw.observations = m.observations;
  for (StateId q = 0; q < m.num_states(); ++q) {
    for (ActionId a = 0; a < m.num_actions(); ++a) {
      RawRow row{m.states[q], m.actions[a], {}};
      for (const auto& t : m.out(q, a)) {
        row.edges.push_back({m.observations[t.obs], m.states[t.next], t.prob});
      }
      raw.rows.push_back(std::move(row));
    }
  }
  return raw;
}

std::optional<DeterminismWitness> check_posterior_deterministic(const Pomdp& m) {
  for (StateId q = 0; q < m.num_states(); ++q) {
    for (ActionId a = 0; a < m.num_actions(); ++a) {
      std::map<ObsId, StateId> first;
      for (const auto& t : m.out(q, a)) {
        auto [it, inserted] = first.emplace(t.obs, t.next);
        if (!inserted && it->second != t.next) {
          return DeterminismWitness{q, a, t.obs, std::min(it->second, t.next),
                                    std::max(it->second, t.next)};
        }
      }
    }
  }
  return std::nullopt;
}

std::vector<StateId> value_zero_states(const Pomdp& m, const std::vector<StateId>& targets) {
  std::vector<std::vector<StateId>> preds(m.num_states());
  for (StateId q = 0; q < m.num_states(); ++q) {
    for (ActionId a = 0; a < m.num_actions(); ++a) {
      for (const auto& t : m.out(q, a)) preds[t.next].push_back(q);
    }
  }
  std::vector<bool> reaches(m.num_states(), false);
  std::deque<StateId> queue;
  for (StateId t : targets) {
    if (!reaches[t]) {
      reaches[t] = true;
      queue.push_back(t);
    }
  }
  while (!queue.empty()) {
    StateId q = queue.front();
    queue.pop_front();
    for (StateId p : preds[q]) {
      if (!reaches[p]) {
        reaches[p] = true;
        queue.push_back(p);
      }
    }
  }
  std::vector<StateId> zero;
  for (StateId q = 0; q < m.num_states(); ++q) {
    if (!reaches[q]) zero.push_back(q);
  }
  return zero;
}

std::string format_support(Support s, const std::vector<std::string>& names) {
  std::string out = "{";
  bool first = true;
  for (StateId q : s.states()) {
    if (!first) out += ",";
    first = false;
    out += q < names.size() ? names[q] : std::to_string(q);
  }
  return out + "}";
}

}  // namespace pdpomdp
