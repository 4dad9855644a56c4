#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace signstab::graphalgo {

/// Strongly connected components (Tarjan), returned in reverse topological
/// order of the condensation. Vertices are 0-based; adjacency lists must not
/// contain duplicates for deterministic output ordering.
std::vector<std::vector<int>> tarjan_scc(const std::vector<std::vector<int>>& adj);

/// Topological order of a DAG, or nullopt when the graph has a cycle.
std::optional<std::vector<int>> topological_order(
    const std::vector<std::vector<int>>& adj);

struct CycleEnumeration {
  std::vector<std::vector<int>> cycles;  // each starts at its smallest vertex
  bool truncated = false;
};

/// Elementary circuits of length >= min_length (Johnson's algorithm).
/// Self-loops are ignored. Stops after `cap` circuits have been recorded and
/// sets the truncation flag.
CycleEnumeration johnson_cycles(const std::vector<std::vector<int>>& adj,
                                std::size_t min_length, std::size_t cap);

}  // namespace signstab::graphalgo
