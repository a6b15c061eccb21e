#pragma once

#include <cstddef>
#include <vector>

namespace divnorm {

// Strongly connected components of a digraph given as adjacency lists.
// Components come out in reverse topological order of the condensation
// (sinks first), each sorted ascending.
std::vector<std::vector<std::size_t>> strongly_connected_components(
    const std::vector<std::vector<std::size_t>>& graph);

}  // namespace divnorm
