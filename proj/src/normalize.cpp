#include "pdpomdp/normalize.hpp"
#include "pdpomdp/error.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace pdpomdp {

namespace {

std::string fresh_name(std::string base, const std::vector<std::string>& taken) {
  while (std::find(taken.begin(), taken.end(), base) != taken.end()) base += "_";
  return base;
}

/// Observation that identifies s if s is absorbing and observable.
std::optional<ObsId> observable_sink_obs(const Pomdp& m, StateId s) {
  std::optional<ObsId> obs;
  for (ActionId a = 0; a < m.num_actions(); ++a) {
    const auto& row = m.out(s, a);
    if (row.size() != 1 || row.front().next != s) return std::nullopt;
    if (obs && *obs != row.front().obs) return std::nullopt;
    obs = row.front().obs;
  }
  if (!obs) return std::nullopt;
  for (StateId q = 0; q < m.num_states(); ++q) {
    for (ActionId a = 0; a < m.num_actions(); ++a) {
      for (const auto& t : m.out(q, a)) {
        if ((t.next == s) != (t.obs == *obs)) return std::nullopt;
      }
    }
  }
  return obs;
}

}  // namespace

SubBelief Normalization::map_belief(const SubBelief& b) const {
  std::map<StateId, Rational> acc;
  for (const auto& [q, mass] : b.entries()) acc[state_map.at(q)] += mass;
  std::vector<SubBelief::Entry> entries(acc.begin(), acc.end());
  return SubBelief::from_entries(std::move(entries));
}

void require_normalized(const Pomdp& m) {
  if (!m.normalized) {
    throw Error(ErrorKind::NotNormalized, "analysis requires a normalized model");
  }
}

Normalization normalize(const Pomdp& m, const std::vector<StateId>& targets) {
  if (targets.empty()) throw Error(ErrorKind::EmptyTargets, "target set is empty");
  std::vector<StateId> zero = value_zero_states(m, targets);

  Normalization result;
  if (targets.size() == 1 && zero.size() == 1) {
    auto top_obs = observable_sink_obs(m, targets.front());
    auto bot_obs = observable_sink_obs(m, zero.front());
    if (top_obs && bot_obs && *top_obs != *bot_obs) {
      result.model = m;
      result.model.normalized = NormalizedMarks{targets.front(), zero.front(), *top_obs, *bot_obs};
      result.state_map.resize(m.num_states());
      for (StateId q = 0; q < m.num_states(); ++q) result.state_map[q] = q;
      result.merged_into_bot = zero;
      result.already_normal = true;
      return result;
    }
  }

  enum class Kind { Keep, Target, Zero };
  std::vector<Kind> kind(m.num_states(), Kind::Keep);
  for (StateId t : targets) kind.at(t) = Kind::Target;
  for (StateId z : zero) kind[z] = Kind::Zero;

  Pomdp& out = result.model;
  out.name = m.name;
  out.actions = m.actions;
  out.observations = m.observations;
  result.state_map.assign(m.num_states(), 0);
  for (StateId q = 0; q < m.num_states(); ++q) {
    if (kind[q] == Kind::Keep) {
      result.state_map[q] = static_cast<StateId>(out.states.size());
      out.states.push_back(m.states[q]);
    }
  }
  const auto top = static_cast<StateId>(out.states.size());
  const auto bot = top + 1;
  out.states.push_back(fresh_name("TOP", m.states));
  out.states.push_back(fresh_name("BOT", m.states));
  const auto top_obs = static_cast<ObsId>(out.observations.size());
  const auto bot_obs = top_obs + 1;
  out.observations.push_back(fresh_name("obs_TOP", m.observations));
  out.observations.push_back(fresh_name("obs_BOT", m.observations));
  for (StateId q = 0; q < m.num_states(); ++q) {
    if (kind[q] == Kind::Target) result.state_map[q] = top;
    if (kind[q] == Kind::Zero) result.state_map[q] = bot;
  }
  result.merged_into_bot = zero;

  out.trans.assign(out.states.size(), std::vector<std::vector<Transition>>(m.num_actions()));
  for (StateId q = 0; q < m.num_states(); ++q) {
    if (kind[q] != Kind::Keep) continue;
    for (ActionId a = 0; a < m.num_actions(); ++a) {
      Rational to_top = 0;
      Rational to_bot = 0;
      auto& row = out.trans[result.state_map[q]][a];
      for (const auto& t : m.out(q, a)) {
        switch (kind[t.next]) {
          case Kind::Keep: row.push_back({t.obs, result.state_map[t.next], t.prob}); break;
          case Kind::Target: to_top += t.prob; break;
          case Kind::Zero: to_bot += t.prob; break;
        }
      }
      if (to_top > 0) row.push_back({top_obs, top, to_top});
      if (to_bot > 0) row.push_back({bot_obs, bot, to_bot});
      std::sort(row.begin(), row.end(), [](const Transition& x, const Transition& y) {
        return std::tie(x.obs, x.next) < std::tie(y.obs, y.next);
      });
    }
  }
  for (ActionId a = 0; a < m.num_actions(); ++a) {
    out.trans[top][a] = {{top_obs, top, Rational(1)}};
    out.trans[bot][a] = {{bot_obs, bot, Rational(1)}};
  }
  out.normalized = NormalizedMarks{top, bot, top_obs, bot_obs};
  return result;
}

}  // namespace pdpomdp
