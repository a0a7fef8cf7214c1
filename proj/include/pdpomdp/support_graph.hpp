#pragma once

#include "pdpomdp/kernel.hpp"

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

namespace pdpomdp {

inline constexpr std::size_t kDefaultSupportBudget = std::size_t{1} << 20;

/// The deterministic belief-support automaton restricted to the supports
/// reachable from the registered roots. Roots accumulate; every call keeps
/// the node set closed under all (action, observation) pairs.
class SupportGraph {
 public:
  explicit SupportGraph(Kernel kernel, std::size_t node_budget = kDefaultSupportBudget);

  /// Adds root and its forward closure. Throws Error(NodeBudgetExceeded).
  std::size_t add_root(Support root);
  /// Registers every non-empty subset of the state space.
  void add_all_supports();

  const Kernel& kernel() const { return kernel_; }
  std::size_t size() const { return nodes_.size(); }
  Support node(std::size_t i) const { return nodes_[i]; }
  const std::vector<Support>& nodes() const { return nodes_; }
  std::optional<std::size_t> find(Support s) const;

  /// Index of delta(node, a, o), or nullopt when that support is empty.
  std::optional<std::size_t> successor(std::size_t node, ActionId a, ObsId o) const {
    auto v = edges_[(node * kernel_.num_actions() + a) * kernel_.num_observations() + o];
    if (v < 0) return std::nullopt;
    return static_cast<std::size_t>(v);
  }

  /// All distinct successor nodes of a node under one action.
  std::vector<std::size_t> successors(std::size_t node, ActionId a) const;

 private:
  std::size_t intern(Support s, std::vector<std::size_t>& frontier);

  Kernel kernel_;
  std::size_t budget_;
  std::vector<Support> nodes_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
  std::vector<std::int64_t> edges_;
};

/// Forward closure of the roots.
SupportGraph explore(const Pomdp& m, const std::vector<Support>& roots,
                     std::size_t node_budget = kDefaultSupportBudget);

/// Equivalence classes of mutual reachability, the order they inherit from
/// reachability extended by support size, and the height of every class.
struct RankTable {
  std::vector<std::size_t> class_of;               // per graph node
  std::vector<std::vector<std::size_t>> members;   // per class
  std::vector<std::size_t> cardinality;            // support size of the members
  std::vector<std::vector<std::size_t>> reach_below;  // direct reachability edges between classes
  std::vector<std::uint64_t> rank;

  std::size_t num_classes() const { return members.size(); }
  std::uint64_t rank_of_node(std::size_t node) const { return rank[class_of[node]]; }
  /// Strict order on classes: `lower` lies strictly below `upper`.
  bool below(std::size_t lower, std::size_t upper) const;
};

RankTable rank_table(const SupportGraph& g);

}  // namespace pdpomdp
