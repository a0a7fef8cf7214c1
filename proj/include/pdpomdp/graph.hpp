#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace pdpomdp {

/// Iterative Tarjan. Returns the component of every vertex; components are
/// numbered in reverse topological order (a component only reaches
/// components with a smaller or equal number).
std::vector<std::size_t> strongly_connected_components(
    std::size_t vertices,
    const std::function<void(std::size_t, std::vector<std::size_t>&)>& successors,
    std::size_t& component_count);

}  // namespace pdpomdp
