#include "pdpomdp/sec.hpp"
#include "pdpomdp/error.hpp"
#include "pdpomdp/graph.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>
#include <tuple>

namespace pdpomdp {

std::string to_string(Axiom axiom) {
  switch (axiom) {
    case Axiom::NonEmptiness: return "non-emptiness";
    case Axiom::Closure: return "closure";
    case Axiom::StrongConnectivity: return "strong connectivity";
  }
  return "unknown";
}

std::string AxiomViolation::describe(const Pomdp& m) const {
  std::string out = to_string(axiom) + " fails at " + format_support(support, m.states);
  if (action) out += " action " + m.actions[*action];
  if (obs) out += " observation " + m.observations[*obs];
  if (target) {
    out += axiom == Axiom::Closure ? " leads to " : " cannot reach ";
    out += format_support(*target, m.states);
  }
  return out;
}

namespace {

// Supports reachable from s while playing actions of f only.
std::set<Support> reach_inside(const Kernel& k, const Sec& f, Support s) {
  std::set<Support> seen{s};
  std::vector<Support> stack{s};
  while (!stack.empty()) {
    Support t = stack.back();
    stack.pop_back();
    auto it = f.find(t);
    if (it == f.end()) continue;
    for (ActionId a : it->second) {
      for (ObsId o = 0; o < k.num_observations(); ++o) {
        Support next = k.step(t, a, o);
        if (!next.empty() && seen.insert(next).second) stack.push_back(next);
      }
    }
  }
  return seen;
}

}  // namespace

std::optional<AxiomViolation> check_sec(const Kernel& k, const Sec& f) {
  if (f.empty()) throw Error(ErrorKind::EmptyDomain, "an SEC needs a non-empty domain");
  for (const auto& [s, actions] : f) {
    if (actions.empty()) return AxiomViolation{Axiom::NonEmptiness, s, std::nullopt, std::nullopt, std::nullopt};
  }
  for (const auto& [s, actions] : f) {
    for (ActionId a : actions) {
      for (ObsId o = 0; o < k.num_observations(); ++o) {
        Support next = k.step(s, a, o);
        if (!next.empty() && !f.contains(next)) return AxiomViolation{Axiom::Closure, s, a, o, next};
      }
    }
  }
  for (const auto& [s, actions] : f) {
    auto seen = reach_inside(k, f, s);
    for (const auto& entry : f) {
      if (!seen.contains(entry.first)) {
        return AxiomViolation{Axiom::StrongConnectivity, s, std::nullopt, std::nullopt, entry.first};
      }
    }
  }
  return std::nullopt;
}

bool is_sec(const Kernel& k, const Sec& f) { return !check_sec(k, f).has_value(); }

Sec sec_union(const Sec& f, const Sec& g) {
  bool shared = std::any_of(f.begin(), f.end(), [&](const auto& e) { return g.contains(e.first); });
  if (!shared) throw Error(ErrorKind::DisjointDomains, "the SEC domains do not intersect");
  Sec out = f;
  for (const auto& [s, actions] : g) {
    auto& into = out[s];
    std::vector<ActionId> merged;
    std::set_union(into.begin(), into.end(), actions.begin(), actions.end(), std::back_inserter(merged));
    into = std::move(merged);
  }
  return out;
}

SecDecomposition maximal_sec_decomposition(const SupportGraph& g) {
  const std::size_t n = g.size();
  const std::size_t A = g.kernel().num_actions();
  std::vector<std::vector<char>> allowed(n, std::vector<char>(A, 1));
  std::vector<char> alive(n, 1);
  std::vector<std::size_t> comp;
  for (bool changed = true; changed;) {
    changed = false;
    std::size_t count = 0;
    comp = strongly_connected_components(
        n,
        [&](std::size_t v, std::vector<std::size_t>& out) {
          if (!alive[v]) return;
          for (ActionId a = 0; a < A; ++a) {
            if (!allowed[v][a]) continue;
            for (std::size_t w : g.successors(v, a)) out.push_back(w);
          }
        },
        count);
    for (std::size_t v = 0; v < n; ++v) {
      if (!alive[v]) continue;
      bool any = false;
      for (ActionId a = 0; a < A; ++a) {
        if (!allowed[v][a]) continue;
        for (std::size_t w : g.successors(v, a)) {
          if (!alive[w] || comp[w] != comp[v]) {
            allowed[v][a] = 0;
            changed = true;
            break;
          }
        }
        any = any || allowed[v][a];
      }
      if (!any) {
        alive[v] = 0;
        changed = true;
      }
    }
  }

  SecDecomposition d;
  d.sec_of_node.assign(n, std::nullopt);
  std::map<std::size_t, std::size_t> index_of_comp;
  for (std::size_t v = 0; v < n; ++v) {
    if (!alive[v]) continue;
    auto [it, inserted] = index_of_comp.emplace(comp[v], d.secs.size());
    if (inserted) d.secs.emplace_back();
    auto& actions = d.secs[it->second][g.node(v)];
    for (ActionId a = 0; a < A; ++a) {
      if (allowed[v][a]) actions.push_back(a);
    }
    d.sec_of_node[v] = it->second;
  }
  return d;
}

Partition indistinguishability_partition(const Kernel& k, const Sec& f, Support s) {
  const auto states = s.states();
  const std::size_t n = states.size();

  auto distinguishable = [&](StateId q, StateId q2) {
    using Triple = std::tuple<std::uint64_t, StateId, StateId>;
    std::set<Triple> seen{{s.bits(), q, q2}};
    std::deque<Triple> queue{{s.bits(), q, q2}};
    while (!queue.empty()) {
      auto [bits, r, r2] = queue.front();
      queue.pop_front();
      auto it = f.find(Support(bits));
      if (it == f.end()) continue;
      for (ActionId a : it->second) {
        for (ObsId o = 0; o < k.num_observations(); ++o) {
          const Rational& p = k.obs_probability(r, a, o);
          if (p != k.obs_probability(r2, a, o)) return true;
          if (p == 0) continue;
          StateId n1 = *k.successor(r, a, o);
          StateId n2 = *k.successor(r2, a, o);
          if (n1 == n2) continue;
          if (n2 < n1) std::swap(n1, n2);
          Triple next{k.step(Support(bits), a, o).bits(), n1, n2};
          if (seen.insert(next).second) queue.push_back(next);
        }
      }
    }
    return false;
  };

  std::vector<std::vector<char>> same(n, std::vector<char>(n, 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      same[i][j] = same[j][i] = !distinguishable(states[i], states[j]);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!same[i][j]) continue;
      for (std::size_t l = 0; l < n; ++l) {
        if (same[j][l] && !same[i][l]) {
          throw Error(ErrorKind::Internal, "indistinguishability is not transitive");
        }
      }
    }
  }

  Partition p{s, {}};
  std::vector<char> placed(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (placed[i]) continue;
    Support block;
    for (std::size_t j = i; j < n; ++j) {
      if (!placed[j] && same[i][j]) {
        block = block.with(states[j]);
        placed[j] = 1;
      }
    }
    p.blocks.push_back(block);
  }
  return p;
}

bool is_distinguishing(const Kernel& k, const Sec& f) {
  if (f.empty()) throw Error(ErrorKind::EmptyDomain, "an SEC needs a non-empty domain");
  return indistinguishability_partition(k, f, f.begin()->first).blocks.size() >= 2;
}

bool distinguishing_consistent(const Kernel& k, const Sec& f) {
  bool first = is_distinguishing(k, f);
  return std::all_of(f.begin(), f.end(), [&](const auto& e) {
    return (indistinguishability_partition(k, f, e.first).blocks.size() >= 2) == first;
  });
}

SecReport describe_sec(const Pomdp& m, const Kernel& k, Sec f) {
  SecReport r;
  r.distinguishing = is_distinguishing(k, f);
  if (m.normalized && f.size() == 1) {
    Support s = f.begin()->first;
    r.trivial = s == Support::singleton(m.normalized->top) || s == Support::singleton(m.normalized->bot);
  }
  r.bottom = std::all_of(f.begin(), f.end(), [&](const auto& e) { return e.second.size() == k.num_actions(); });
  r.sec = std::move(f);
  return r;
}

SecReport maximal_sec_of(const Pomdp& m, Support s) {
  SupportGraph g = explore(m, {s});
  auto d = maximal_sec_decomposition(g);
  auto index = d.sec_of_node[*g.find(s)];
  if (!index) {
    throw Error(ErrorKind::NotInAnySec, format_support(s, m.states) + " belongs to no SEC");
  }
  return describe_sec(m, g.kernel(), d.secs[*index]);
}

std::vector<SubBelief> reachable_beliefs_inside(const Pomdp& m, const Sec& f, const SubBelief& b,
                                                std::size_t cap) {
  std::set<SubBelief> seen{b};
  std::vector<SubBelief> order{b};
  for (std::size_t i = 0; i < order.size(); ++i) {
    const SubBelief cur = order[i];
    auto it = f.find(cur.support());
    if (it == f.end()) {
      throw Error(ErrorKind::InvalidArgument,
                  "belief support " + format_support(cur.support(), m.states) + " is outside the SEC");
    }
    for (ActionId a : it->second) {
      for (ObsId o = 0; o < m.num_observations(); ++o) {
        if (obs_probability(m, cur, a, o) == 0) continue;
        SubBelief next = belief_update(m, cur, a, o);
        if (seen.insert(next).second) {
          if (order.size() >= cap) {
            throw Error(ErrorKind::NodeBudgetExceeded,
                        "more than " + std::to_string(cap) + " beliefs reachable inside the SEC");
          }
          order.push_back(std::move(next));
        }
      }
    }
  }
  std::sort(order.begin(), order.end());
  return order;
}

std::vector<std::pair<SubBelief, ActionId>> enumerate_exit_frontier(const Pomdp& m, const Sec& f,
                                                                    const SubBelief& b, std::size_t cap) {
  std::vector<std::pair<SubBelief, ActionId>> out;
  for (const SubBelief& c : reachable_beliefs_inside(m, f, b, cap)) {
    const auto& inside = f.at(c.support());
    for (ActionId a = 0; a < m.num_actions(); ++a) {
      if (!std::binary_search(inside.begin(), inside.end(), a)) out.emplace_back(c, a);
    }
  }
  if (out.empty()) {
    throw Error(ErrorKind::NoExit, "no action leaves the SEC from " + b.format(m.states));
  }
  return out;
}

}  // namespace pdpomdp
