#include "signstab/graph_algo.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace signstab::graphalgo {

std::vector<std::vector<int>> tarjan_scc(const std::vector<std::vector<int>>& adj) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> number(static_cast<std::size_t>(n), -1);
  std::vector<int> low(static_cast<std::size_t>(n), -1);
  std::vector<bool> on_stack(static_cast<std::size_t>(n), false);
  std::vector<int> stack;
  std::vector<std::vector<int>> sccs;
  int counter = 0;

  std::function<void(int)> dfs = [&](int v) {
    number[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (int w : adj[static_cast<std::size_t>(v)]) {
      if (number[w] == -1) {
        dfs(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], number[w]);
      }
    }
    if (low[v] == number[v]) {
      std::vector<int> scc;
      int w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        scc.push_back(w);
      } while (w != v);
      std::sort(scc.begin(), scc.end());
      sccs.push_back(std::move(scc));
    }
  };

  for (int v = 0; v < n; ++v)
    if (number[v] == -1) dfs(v);
  return sccs;
}

std::optional<std::vector<int>> topological_order(
    const std::vector<std::vector<int>>& adj) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> indegree(static_cast<std::size_t>(n), 0);
  for (const auto& succ : adj)
    for (int w : succ) ++indegree[static_cast<std::size_t>(w)];

  std::vector<int> ready;
  for (int v = 0; v < n; ++v)
    if (indegree[static_cast<std::size_t>(v)] == 0) ready.push_back(v);

  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(n));
  while (!ready.empty()) {
    // smallest-first for deterministic output
    auto it = std::min_element(ready.begin(), ready.end());
    int v = *it;
    ready.erase(it);
    order.push_back(v);
    for (int w : adj[static_cast<std::size_t>(v)])
      if (--indegree[static_cast<std::size_t>(w)] == 0) ready.push_back(w);
  }
  if (static_cast<int>(order.size()) != n) return std::nullopt;
  return order;
}

namespace {

struct JohnsonState {
  const std::vector<std::vector<int>>* adj = nullptr;  // subgraph adjacency
  int start = 0;
  std::size_t min_length = 3;
  std::size_t cap = 100;
  std::vector<bool> blocked;
  std::vector<std::set<int>> block_map;
  std::vector<int> path;
  CycleEnumeration* out = nullptr;
  bool stop = false;

  void unblock(int v) {
    blocked[static_cast<std::size_t>(v)] = false;
    auto& bs = block_map[static_cast<std::size_t>(v)];
    while (!bs.empty()) {
      int w = *bs.begin();
      bs.erase(bs.begin());
      if (blocked[static_cast<std::size_t>(w)]) unblock(w);
    }
  }

  bool circuit(int v) {
    bool found = false;
    path.push_back(v);
    blocked[static_cast<std::size_t>(v)] = true;
    for (int w : (*adj)[static_cast<std::size_t>(v)]) {
      if (stop) break;
      if (w == start) {
        found = true;
        if (path.size() >= min_length) {
          out->cycles.push_back(path);
          if (out->cycles.size() >= cap) {
            out->truncated = true;
            stop = true;
          }
        }
      } else if (!blocked[static_cast<std::size_t>(w)]) {
        if (circuit(w)) found = true;
      }
    }
    if (found) {
      unblock(v);
    } else {
      for (int w : (*adj)[static_cast<std::size_t>(v)])
        block_map[static_cast<std::size_t>(w)].insert(v);
    }
    path.pop_back();
    return found;
  }
};

}  // namespace

CycleEnumeration johnson_cycles(const std::vector<std::vector<int>>& adj_in,
                                std::size_t min_length, std::size_t cap) {
  const int n = static_cast<int>(adj_in.size());
  // Drop self-loops and duplicates, keep successors sorted.
  std::vector<std::vector<int>> adj(adj_in.size());
  for (int v = 0; v < n; ++v) {
    std::vector<int> succ;
    for (int w : adj_in[static_cast<std::size_t>(v)])
      if (w != v) succ.push_back(w);
    std::sort(succ.begin(), succ.end());
    succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
    adj[static_cast<std::size_t>(v)] = std::move(succ);
  }

  CycleEnumeration out;
  int s = 0;
  while (s < n) {
    // Induced subgraph on {s, ..., n-1}.
    std::vector<std::vector<int>> induced(adj.size());
    for (int v = s; v < n; ++v)
      for (int w : adj[static_cast<std::size_t>(v)])
        if (w >= s) induced[static_cast<std::size_t>(v)].push_back(w);

    auto sccs = tarjan_scc(induced);
    // Least vertex belonging to an SCC with at least two vertices.
    int least = n;
    const std::vector<int>* comp = nullptr;
    for (const auto& scc : sccs) {
      if (scc.size() < 2 || scc.front() < s) continue;
      if (scc.front() < least) {
        least = scc.front();
        comp = &scc;
      }
    }
    if (!comp) break;

    // Adjacency restricted to that component.
    std::vector<bool> in_comp(adj.size(), false);
    for (int v : *comp) in_comp[static_cast<std::size_t>(v)] = true;
    std::vector<std::vector<int>> comp_adj(adj.size());
    for (int v : *comp)
      for (int w : induced[static_cast<std::size_t>(v)])
        if (in_comp[static_cast<std::size_t>(w)])
          comp_adj[static_cast<std::size_t>(v)].push_back(w);

    JohnsonState state;
    state.adj = &comp_adj;
    state.start = least;
    state.min_length = min_length;
    state.cap = cap;
    state.blocked.assign(adj.size(), false);
    state.block_map.assign(adj.size(), {});
    state.out = &out;
    state.circuit(least);
    if (state.stop) break;

    s = least + 1;
  }
  return out;
}

}  // namespace signstab::graphalgo
