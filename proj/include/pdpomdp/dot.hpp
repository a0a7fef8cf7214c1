#pragma once

#include "pdpomdp/unfolder.hpp"

#include <string>

namespace pdpomdp {

/// Support graph in Graphviz syntax. Supports are filled by maximal SEC;
/// supports of distinguishing SECs get a double border.
std::string support_graph_dot(const AnalysisContext& ctx);

/// The unfolding tree below root, cut after depth edges.
std::string tree_dot(Unfolder& unfolder, const Label& root, std::uint64_t depth);

}  // namespace pdpomdp
