#pragma once

#include "pdpomdp/belief.hpp"
#include "pdpomdp/kernel.hpp"
#include "pdpomdp/sec.hpp"
#include "pdpomdp/support_graph.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace pdpomdp {

inline constexpr std::uint64_t kDefaultNodeBudget = 2'000'000;

struct ApproxParams {
  Rational epsilon;
  Rational eta;
  Integer big_n;
  Rational p_min;
  Rational c;
  std::size_t num_states = 0;

  /// Parameters for a normalized model.
  static ApproxParams make(const Pomdp& normalized, const Rational& epsilon);
  static ApproxParams make(std::size_t num_states, const Rational& p_min, const Rational& epsilon);
};

/// Smallest integer n with n >= (N/c) * ((|Q|+1) ln 2 + ln(1/eps)), where both
/// logarithms are replaced by upward-rounded rational bounds.
Integer certified_depth(const ApproxParams& p);

/// Shared, read-only analyses of one normalized model: the support graph
/// (the whole lattice when it fits), ranks, maximal SECs and partitions.
class AnalysisContext {
 public:
  /// roots are only used when the full lattice exceeds the support budget.
  AnalysisContext(Pomdp normalized, const std::vector<Support>& roots,
                  std::size_t support_budget = kDefaultSupportBudget);

  const Pomdp& model() const { return model_; }
  const Kernel& kernel() const { return graph_.kernel(); }
  const SupportGraph& graph() const { return graph_; }
  const RankTable& ranks() const { return ranks_; }
  const SecDecomposition& secs() const { return secs_; }
  const std::vector<SecReport>& reports() const { return reports_; }
  bool full_lattice() const { return full_; }

  std::uint64_t rank(Support s) const;
  Rational rank(const SubBelief& b) const;
  /// Index of the maximal SEC containing s.
  std::optional<std::size_t> sec_of(Support s) const;
  const Partition& partition(std::size_t sec, Support s) const;

  bool is_top(Support s) const { return s == Support::singleton(model_.normalized->top); }
  bool is_bot(Support s) const { return s == Support::singleton(model_.normalized->bot); }

 private:
  std::size_t node(Support s) const;

  Pomdp model_;
  SupportGraph graph_;
  bool full_ = false;
  RankTable ranks_;
  SecDecomposition secs_;
  std::vector<SecReport> reports_;
  mutable std::map<std::pair<std::size_t, std::uint64_t>, Partition> partitions_;
};

enum class Rule {
  Observation = 1,  // (b, a): one child per observation
  Terminal = 2,     // supp b is {TOP} or {BOT}
  Cut = 3,
  Split = 4,        // distinguishing maximal SEC
  Exit = 5,         // non-distinguishing maximal SEC
  Actions = 6,
  EmptyCut,         // cut removed everything
  Frontier,         // depth exhausted
};

std::string to_string(Rule r);

struct Label {
  SubBelief belief;
  std::optional<ActionId> action;

  std::string key() const;
  std::string format(const Pomdp& m) const;
  friend bool operator==(const Label&, const Label&) = default;
};

struct Child {
  Rational weight;
  Label label;
};

struct Expansion {
  Rule rule;
  std::vector<Child> children;
};

struct Stats {
  Rational value;
  Rational rankhat;
  friend bool operator==(const Stats&, const Stats&) = default;
};

struct UnfoldNode {
  Label label;
  Rule rule = Rule::Frontier;
  std::vector<std::pair<Rational, std::unique_ptr<UnfoldNode>>> children;
  Stats stats;
};

struct UnfoldOptions {
  bool memo = true;
  std::uint64_t node_budget = kDefaultNodeBudget;
  std::size_t frontier_cap = 100000;
};

class Unfolder {
 public:
  Unfolder(const AnalysisContext& ctx, Rational eta, UnfoldOptions options = {});

  /// Applies the first matching rule. Leaves (rule 2 and empty cuts) have no children.
  const Expansion& expand(const Label& label);

  /// Statistics of the tree rooted at label, truncated after depth edges.
  /// Throws Error(NodeBudgetExceeded).
  Stats evaluate(const Label& root, std::uint64_t depth);

  /// Explicit tree without memoization, for inspection and cross-checks.
  std::unique_ptr<UnfoldNode> build_tree(const Label& root, std::uint64_t depth);

  /// Statistics of a node whose children are not explored.
  Stats leaf_stats(const Label& label) const;

  std::uint64_t nodes_expanded() const { return expanded_; }
  const Rational& eta() const { return eta_; }
  const AnalysisContext& context() const { return ctx_; }

 private:
  Expansion compute(const Label& label);
  Stats combine(const Expansion& e, const std::vector<Stats>& children) const;
  void count_expansion();

  const AnalysisContext& ctx_;
  Rational eta_;
  UnfoldOptions options_;
  std::uint64_t expanded_ = 0;
  std::unordered_map<std::string, Expansion> expansions_;
  std::unordered_map<std::string, Stats> memo_;
};

enum class Mode { Anytime, Certified };

struct ApproxOptions {
  Mode mode = Mode::Anytime;
  bool memo = true;
  std::uint64_t node_budget = kDefaultNodeBudget;
  /// Receives "depth width" progress lines when set.
  std::ostream* progress = nullptr;
};

struct ApproxResult {
  ApproxParams params;
  Rational lower;
  Rational upper;
  std::uint64_t depth = 0;
  std::uint64_t nodes_expanded = 0;
  bool converged = false;
  std::optional<Integer> certified_depth;

  Rational width() const { return upper - lower; }
};

/// Bounds for b (mass 1) in a normalized posterior-deterministic model.
/// Throws Error(NotPosteriorDeterministic) or Error(NotNormalized). A
/// budget overrun returns the best bounds found with converged = false.
ApproxResult approximate(const Pomdp& normalized, const SubBelief& b, const Rational& epsilon,
                         const ApproxOptions& options = {});

/// Upper bound at one depth: min(V + rankhat + |supp b| eta, ||b||).
Rational upper_bound(const Stats& s, const SubBelief& b, const Rational& eta);

enum class Verdict { CaseI, CaseII };

struct Decision {
  Verdict verdict;
  ApproxResult bounds;
};

/// CaseII when the upper bound is below v + eps, otherwise CaseI.
Verdict classify(const ApproxResult& bounds, const Rational& v, const Rational& epsilon);

/// Throws Error(NodeBudgetExceeded) when the bounds do not converge.
Decision decide(const Pomdp& normalized, const SubBelief& b, const Rational& v, const Rational& epsilon,
                const ApproxOptions& options = {});

}  // namespace pdpomdp
