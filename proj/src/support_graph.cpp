#include "pdpomdp/graph.hpp"
#include "pdpomdp/support_graph.hpp"
#include "pdpomdp/error.hpp"

#include <algorithm>
#include <numeric>

namespace pdpomdp {

std::vector<std::size_t> strongly_connected_components(
    std::size_t vertices,
    const std::function<void(std::size_t, std::vector<std::size_t>&)>& successors,
    std::size_t& component_count) {
  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(vertices, kUnset), low(vertices, 0), comp(vertices, kUnset);
  std::vector<bool> on_stack(vertices, false);
  std::vector<std::size_t> stack;
  std::size_t counter = 0;
  component_count = 0;

  struct Frame {
    std::size_t v;
    std::vector<std::size_t> succ;
    std::size_t next;
  };
  std::vector<Frame> call;
  for (std::size_t root = 0; root < vertices; ++root) {
    if (index[root] != kUnset) continue;
    call.push_back({root, {}, 0});
    successors(root, call.back().succ);
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.next < f.succ.size()) {
        std::size_t w = f.succ[f.next++];
        if (index[w] == kUnset) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          Frame child{w, {}, 0};
          successors(w, child.succ);
          call.push_back(std::move(child));
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      std::size_t v = f.v;
      if (low[v] == index[v]) {
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = component_count;
        } while (w != v);
        ++component_count;
      }
      call.pop_back();
      if (!call.empty()) {
        std::size_t parent = call.back().v;
        low[parent] = std::min(low[parent], low[v]);
      }
    }
  }
  return comp;
}

SupportGraph::SupportGraph(Kernel kernel, std::size_t node_budget)
    : kernel_(std::move(kernel)), budget_(node_budget) {}

std::optional<std::size_t> SupportGraph::find(Support s) const {
  auto it = index_.find(s.bits());
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t SupportGraph::intern(Support s, std::vector<std::size_t>& frontier) {
  auto [it, inserted] = index_.emplace(s.bits(), nodes_.size());
  if (inserted) {
    if (nodes_.size() >= budget_) {
      index_.erase(it);
      throw Error(ErrorKind::NodeBudgetExceeded,
                  "support graph exceeds the node budget of " + std::to_string(budget_));
    }
    nodes_.push_back(s);
    edges_.resize(nodes_.size() * kernel_.num_actions() * kernel_.num_observations(), -1);
    frontier.push_back(it->second);
  }
  return it->second;
}

std::size_t SupportGraph::add_root(Support root) {
  if (root.empty()) throw Error(ErrorKind::InvalidArgument, "support roots must be non-empty");
  std::vector<std::size_t> frontier;
  std::size_t id = intern(root, frontier);
  const std::size_t A = kernel_.num_actions();
  const std::size_t O = kernel_.num_observations();
  while (!frontier.empty()) {
    std::size_t n = frontier.back();
    frontier.pop_back();
    for (ActionId a = 0; a < A; ++a) {
      for (ObsId o = 0; o < O; ++o) {
        Support next = kernel_.step(nodes_[n], a, o);
        if (next.empty()) continue;
        std::size_t target = intern(next, frontier);
        edges_[(n * A + a) * O + o] = static_cast<std::int64_t>(target);
      }
    }
  }
  return id;
}

void SupportGraph::add_all_supports() {
  const std::size_t n = kernel_.num_states();
  if (n >= 63 || (std::uint64_t{1} << n) - 1 > budget_) {
    throw Error(ErrorKind::NodeBudgetExceeded,
                "the full support lattice of " + std::to_string(n) + " states exceeds the node budget");
  }
  for (std::uint64_t bits = 1; bits < (std::uint64_t{1} << n); ++bits) {
    if (!find(Support(bits))) add_root(Support(bits));
  }
}

std::vector<std::size_t> SupportGraph::successors(std::size_t node, ActionId a) const {
  std::vector<std::size_t> out;
  for (ObsId o = 0; o < kernel_.num_observations(); ++o) {
    if (auto s = successor(node, a, o)) out.push_back(*s);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

SupportGraph explore(const Pomdp& m, const std::vector<Support>& roots, std::size_t node_budget) {
  SupportGraph g(Kernel(m), node_budget);
  for (Support r : roots) g.add_root(r);
  return g;
}

bool RankTable::below(std::size_t lower, std::size_t upper) const {
  if (lower == upper) return false;
  if (cardinality[lower] < cardinality[upper]) return true;
  // Same or larger size: only reachability can order them.
  std::vector<bool> seen(members.size(), false);
  std::vector<std::size_t> stack{upper};
  seen[upper] = true;
  while (!stack.empty()) {
    std::size_t c = stack.back();
    stack.pop_back();
    for (std::size_t d : reach_below[c]) {
      if (d == lower) return true;
      if (!seen[d]) {
        seen[d] = true;
        stack.push_back(d);
      }
    }
  }
  return false;
}

RankTable rank_table(const SupportGraph& g) {
  RankTable t;
  const std::size_t n = g.size();
  const std::size_t A = g.kernel().num_actions();
  std::size_t count = 0;
  auto succ = [&](std::size_t v, std::vector<std::size_t>& out) {
    for (ActionId a = 0; a < A; ++a) {
      for (std::size_t w : g.successors(v, a)) out.push_back(w);
    }
  };
  t.class_of = strongly_connected_components(n, succ, count);
  t.members.assign(count, {});
  t.cardinality.assign(count, 0);
  t.reach_below.assign(count, {});
  for (std::size_t v = 0; v < n; ++v) t.members[t.class_of[v]].push_back(v);
  for (std::size_t c = 0; c < count; ++c) {
    t.cardinality[c] = g.node(t.members[c].front()).size();
    for (std::size_t v : t.members[c]) {
      if (g.node(v).size() != t.cardinality[c]) {
        throw Error(ErrorKind::Internal, "mutually reachable supports of different sizes");
      }
    }
  }
  for (std::size_t v = 0; v < n; ++v) {
    std::vector<std::size_t> out;
    succ(v, out);
    for (std::size_t w : out) {
      if (t.class_of[w] != t.class_of[v]) t.reach_below[t.class_of[v]].push_back(t.class_of[w]);
    }
  }
  for (auto& edges : t.reach_below) {
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  }

  // Heights: every class of strictly smaller size lies below, and so does
  // every class reachable from it. Tarjan numbering puts reachable classes
  // first, so sorting by (size, component number) is a topological order.
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return t.cardinality[x] < t.cardinality[y]; });
  t.rank.assign(count, 0);
  std::optional<std::uint64_t> best_smaller;  // max rank among strictly smaller sizes
  std::optional<std::uint64_t> best_current;  // max rank among the current size
  std::size_t current_size = 0;
  for (std::size_t c : order) {
    if (t.cardinality[c] != current_size) {
      if (best_current) best_smaller = std::max(best_smaller.value_or(0), *best_current);
      best_current.reset();
      current_size = t.cardinality[c];
    }
    std::uint64_t r = best_smaller ? *best_smaller + 1 : 0;
    for (std::size_t d : t.reach_below[c]) r = std::max(r, t.rank[d] + 1);
    t.rank[c] = r;
    best_current = std::max(best_current.value_or(0), r);
  }
  return t;
}

}  // namespace pdpomdp
