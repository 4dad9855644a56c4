#include "signstab/chains.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "signstab/graph_algo.hpp"

namespace signstab {

std::string ChainDecomposition::vertex_name(int v) const {
  const CascadeVertex& cv = vertices[static_cast<std::size_t>(v)];
  if (cv.is_singleton) return "node " + std::to_string(cv.index);
  std::string name = "chain {";
  const Chain& chain = chains[static_cast<std::size_t>(cv.index)];
  std::vector<int> sorted = chain.nodes;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    if (k) name += ",";
    name += std::to_string(sorted[k]);
  }
  return name + "}";
}

ChainDecomposition decompose_chains(const SignedNetwork& net) {
  CycleList cycles = find_long_cycles(net);
  if (!cycles.cycles.empty())
    throw PreconditionError("network contains cycles of length 3 or more",
                            cycles.cycles);

  const int n = net.n;

  // Reciprocal-pair graph (undirected), derived from the edge structure.
  std::vector<std::set<int>> mates(static_cast<std::size_t>(n + 1));
  std::vector<std::pair<int, int>> all_pairs;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j)
      if (net.has_edge(i, j) && net.has_edge(j, i)) {
        mates[static_cast<std::size_t>(i)].insert(j);
        mates[static_cast<std::size_t>(j)].insert(i);
        all_pairs.emplace_back(i, j);
      }

  ChainDecomposition dec;
  dec.vertex_of.assign(static_cast<std::size_t>(n + 1), -1);

  std::vector<bool> visited(static_cast<std::size_t>(n + 1), false);
  for (int start = 1; start <= n; ++start) {
    if (visited[static_cast<std::size_t>(start)]) continue;
    if (mates[static_cast<std::size_t>(start)].empty()) {
      visited[static_cast<std::size_t>(start)] = true;
      dec.singletons.push_back(start);
      continue;
    }

    // Component of the pair graph.
    std::set<int> comp;
    std::vector<int> frontier{start};
    comp.insert(start);
    while (!frontier.empty()) {
      int u = frontier.back();
      frontier.pop_back();
      for (int v : mates[static_cast<std::size_t>(u)])
        if (comp.insert(v).second) frontier.push_back(v);
    }
    for (int v : comp) visited[static_cast<std::size_t>(v)] = true;

    Chain chain;
    for (auto [i, j] : all_pairs)
      if (comp.count(i)) chain.pairs.emplace_back(i, j);

    // With no long cycles the pair graph restricted to a component is a tree.
    if (chain.pairs.size() != comp.size() - 1)
      throw PreconditionError(
          "reciprocal pairs form a cycle of two-node feedbacks",
          cycles.cycles);

    chain.root = chain.pairs.front().first;
    chain.root_partner = chain.pairs.front().second;
    chain.nodes = {chain.root, chain.root_partner};

    std::set<int> in_chain{chain.root, chain.root_partner};
    std::vector<int> queue{chain.root, chain.root_partner};
    std::size_t head = 0;
    while (head < queue.size()) {
      int u = queue[head++];
      for (int v : mates[static_cast<std::size_t>(u)]) {
        if (in_chain.count(v)) continue;
        in_chain.insert(v);
        chain.nodes.push_back(v);
        chain.steps.push_back({v, u});
        queue.push_back(v);
      }
    }

    dec.chains.push_back(std::move(chain));
  }

  // Cascade vertices: chains first (in discovery order, i.e. by lowest node),
  // then singleton nodes.
  for (std::size_t c = 0; c < dec.chains.size(); ++c) {
    dec.vertices.push_back({false, static_cast<int>(c)});
    for (int node : dec.chains[c].nodes)
      dec.vertex_of[static_cast<std::size_t>(node)] =
          static_cast<int>(dec.vertices.size()) - 1;
  }
  for (int node : dec.singletons) {
    dec.vertices.push_back({true, node});
    dec.vertex_of[static_cast<std::size_t>(node)] =
        static_cast<int>(dec.vertices.size()) - 1;
  }

  // One-directional edges define the cascade.
  std::set<std::pair<int, int>> edge_set;
  for (int u = 1; u <= n; ++u) {
    for (int w = 1; w <= n; ++w) {
      if (u == w || !net.has_edge(u, w)) continue;
      if (net.has_edge(w, u)) continue;  // reciprocal pair, internal to a chain
      int vu = dec.vertex_of[static_cast<std::size_t>(u)];
      int vw = dec.vertex_of[static_cast<std::size_t>(w)];
      if (vu == vw)
        throw PreconditionError(
            "one-directional edge inside a chain implies a long cycle",
            cycles.cycles);
      edge_set.insert({vu, vw});
    }
  }
  dec.cascade_edges.assign(edge_set.begin(), edge_set.end());

  std::vector<std::vector<int>> dag(dec.vertices.size());
  for (auto [u, v] : dec.cascade_edges) dag[static_cast<std::size_t>(u)].push_back(v);
  auto topo = graphalgo::topological_order(dag);
  if (!topo)
    throw PreconditionError("cascade graph of chains is not acyclic",
                            cycles.cycles);
  dec.topo_order = *topo;
  return dec;
}

}  // namespace signstab
