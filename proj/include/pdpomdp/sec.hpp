#pragma once

#include "pdpomdp/belief.hpp"
#include "pdpomdp/kernel.hpp"
#include "pdpomdp/support_graph.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pdpomdp {

/// Support end component: partial map from supports to non-empty action sets
/// (kept sorted).
using Sec = std::map<Support, std::vector<ActionId>>;

enum class Axiom { NonEmptiness, Closure, StrongConnectivity };

std::string to_string(Axiom axiom);

struct AxiomViolation {
  Axiom axiom;
  Support support;
  std::optional<ActionId> action;
  std::optional<ObsId> obs;
  /// Closure: the escaping successor. Strong connectivity: the unreachable support.
  std::optional<Support> target;

  std::string describe(const Pomdp& m) const;
};

/// nullopt when f is an SEC. Throws Error(EmptyDomain).
std::optional<AxiomViolation> check_sec(const Kernel& k, const Sec& f);
bool is_sec(const Kernel& k, const Sec& f);

/// Pointwise union. Throws Error(DisjointDomains).
Sec sec_union(const Sec& f, const Sec& g);

struct SecDecomposition {
  std::vector<Sec> secs;
  /// Per graph node, the index of its maximal SEC.
  std::vector<std::optional<std::size_t>> sec_of_node;
};

/// Maximal SECs among the nodes of a closed support graph, via the
/// end-component fixpoint.
SecDecomposition maximal_sec_decomposition(const SupportGraph& g);

struct Partition {
  Support support;
  std::vector<Support> blocks;  // ordered by smallest member
};

/// Blocks of (f, S)-indistinguishable states. Throws Error(Internal) if the
/// computed pair relation is not transitive.
Partition indistinguishability_partition(const Kernel& k, const Sec& f, Support s);

/// Decided at the first support of the domain.
bool is_distinguishing(const Kernel& k, const Sec& f);
/// True when every support of the domain gives the same answer.
bool distinguishing_consistent(const Kernel& k, const Sec& f);

struct SecReport {
  Sec sec;
  bool maximal = true;
  bool distinguishing = false;
  bool trivial = false;
  bool bottom = false;
};

SecReport describe_sec(const Pomdp& m, const Kernel& k, Sec f);

/// Throws Error(NotInAnySec).
SecReport maximal_sec_of(const Pomdp& m, Support s);

/// R_f(b): beliefs reachable from b by actions of f. Throws
/// Error(NodeBudgetExceeded) beyond cap beliefs.
std::vector<SubBelief> reachable_beliefs_inside(const Pomdp& m, const Sec& f, const SubBelief& b,
                                                std::size_t cap = 100000);

/// Pairs (b', a) with b' in R_f(b) and a outside f(supp b'). Throws
/// Error(NoExit) when there are none.
std::vector<std::pair<SubBelief, ActionId>> enumerate_exit_frontier(const Pomdp& m, const Sec& f,
                                                                    const SubBelief& b,
                                                                    std::size_t cap = 100000);

}  // namespace pdpomdp
