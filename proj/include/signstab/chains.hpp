#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "signstab/network.hpp"

namespace signstab {

/// Thrown when an operation's structural precondition fails (a cycle of
/// length >= 3 is present). Carries witness cycles.
struct PreconditionError : std::runtime_error {
  std::vector<std::vector<int>> witness_cycles;
  PreconditionError(const std::string& msg, std::vector<std::vector<int>> cycles)
      : std::runtime_error(msg), witness_cycles(std::move(cycles)) {}
};

/// One growth step of a feedback chain: `node` joins by a reciprocal pair
/// with `attached_to`, which is already in the chain.
struct InsertionStep {
  int node = 0;
  int attached_to = 0;
};

/// A negative feedback chain: nodes connected by a tree of reciprocal pairs,
/// recorded in the order the recursive construction inserts them.
struct Chain {
  std::vector<int> nodes;  // insertion order; nodes[0] = root, nodes[1] = partner
  int root = 0;
  int root_partner = 0;
  std::vector<std::pair<int, int>> pairs;  // canonical (i < j)
  std::vector<InsertionStep> steps;        // growth after the root pair
};

struct CascadeVertex {
  bool is_singleton = false;
  int index = 0;  // chain index, or node id for singletons
};

/// Partition of the network into feedback chains and singleton nodes, plus
/// the acyclic cascade structure among them.
struct ChainDecomposition {
  std::vector<Chain> chains;
  std::vector<int> singletons;  // node ids
  std::vector<CascadeVertex> vertices;
  std::vector<std::pair<int, int>> cascade_edges;  // vertex index pairs
  std::vector<int> vertex_of;                      // node id (1-based) -> vertex index
  std::vector<int> topo_order;                     // vertex indices

  std::string vertex_name(int v) const;
};

/// Splits the network into feedback chains (connected components of the
/// reciprocal-pair graph) and the cascade DAG formed by the remaining
/// one-directional edges. Each chain's spanning tree is rooted at the lowest
/// node of its lowest pair and ordered breadth-first, mirroring the recursive
/// metric construction. Requires find_long_cycles(net) empty; condition (i)
/// on the pairs is the caller's responsibility.
ChainDecomposition decompose_chains(const SignedNetwork& net);

}  // namespace signstab
