#include "pdpomdp/dot.hpp"

#include <sstream>

namespace pdpomdp {

namespace {

constexpr const char* kPalette[] = {"lightblue", "palegreen", "khaki", "lightpink", "plum",
                                    "lightsalmon", "aquamarine", "wheat", "thistle", "lightcyan"};

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

std::string support_graph_dot(const AnalysisContext& ctx) {
  const Pomdp& m = ctx.model();
  const SupportGraph& g = ctx.graph();
  std::ostringstream out;
  out << "digraph supports {\n  node [shape=box, style=filled, fillcolor=white];\n";
  for (std::size_t v = 0; v < g.size(); ++v) {
    out << "  n" << v << " [label=" << quote(format_support(g.node(v), m.states) + "\\nrank " +
                                             std::to_string(ctx.ranks().rank_of_node(v)));
    if (auto sec = ctx.secs().sec_of_node[v]) {
      out << ", fillcolor=" << kPalette[*sec % std::size(kPalette)];
      if (ctx.reports()[*sec].distinguishing) out << ", peripheries=2";
    }
    out << "];\n";
  }
  for (std::size_t v = 0; v < g.size(); ++v) {
    for (ActionId a = 0; a < m.num_actions(); ++a) {
      for (ObsId o = 0; o < m.num_observations(); ++o) {
        if (auto w = g.successor(v, a, o)) {
          out << "  n" << v << " -> n" << *w << " [label=" << quote(m.actions[a] + "/" + m.observations[o])
              << "];\n";
        }
      }
    }
  }
  out << "}\n";
  return out.str();
}

std::string tree_dot(Unfolder& unfolder, const Label& root, std::uint64_t depth) {
  const Pomdp& m = unfolder.context().model();
  auto tree = unfolder.build_tree(root, depth);
  std::ostringstream out;
  out << "digraph unfolding {\n  node [shape=box];\n";
  std::size_t next_id = 0;
  auto visit = [&](auto& self, const UnfoldNode& node) -> std::size_t {
    std::size_t id = next_id++;
    out << "  x" << id << " [label="
        << quote(node.label.format(m) + "\\n" + to_string(node.rule) + "  V " + exact_string(node.stats.value) +
                 "  rank " + exact_string(node.stats.rankhat));
    if (node.label.action) out << ", shape=ellipse";
    out << "];\n";
    for (const auto& [weight, child] : node.children) {
      std::size_t c = self(self, *child);
      out << "  x" << id << " -> x" << c << " [label=" << quote(exact_string(weight)) << "];\n";
    }
    return id;
  };
  visit(visit, *tree);
  out << "}\n";
  return out.str();
}

}  // namespace pdpomdp
