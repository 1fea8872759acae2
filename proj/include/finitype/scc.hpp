#pragma once

// Iterative Tarjan strongly-connected components. Component ids come out in
// reverse topological order: every edge leaving a component points to a
// component with a smaller id.

#include <algorithm>
#include <utility>
#include <vector>

namespace finitype {

// adj must not contain parallel duplicates. Returns (component id per node,
// component count).
inline std::pair<std::vector<int>, int> scc_partition(const std::vector<std::vector<int>>& adj) {
  size_t n = adj.size();
  std::vector<int> comp(n, -1), low(n), num(n, -1), stk;
  std::vector<bool> on_stack(n, false);
  int counter = 0, ncomp = 0;
  struct Frame {
    int v;
    size_t edge;
  };
  for (size_t s = 0; s < n; ++s) {
    if (num[s] >= 0) continue;
    std::vector<Frame> call{{static_cast<int>(s), 0}};
    while (!call.empty()) {
      auto& fr = call.back();
      int v = fr.v;
      if (fr.edge == 0) {
        num[v] = low[v] = counter++;
        stk.push_back(v);
        on_stack[static_cast<size_t>(v)] = true;
      }
      if (fr.edge < adj[static_cast<size_t>(v)].size()) {
        int w = adj[static_cast<size_t>(v)][fr.edge++];
        if (num[w] < 0)
          call.push_back({w, 0});
        else if (on_stack[static_cast<size_t>(w)])
          low[v] = std::min(low[v], num[w]);
      } else {
        if (low[v] == num[v]) {
          while (true) {
            int w = stk.back();
            stk.pop_back();
            on_stack[static_cast<size_t>(w)] = false;
            comp[static_cast<size_t>(w)] = ncomp;
            if (w == v) break;
          }
          ++ncomp;
        }
        call.pop_back();
        if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      }
    }
  }
  return {std::move(comp), ncomp};
}

inline std::vector<std::vector<int>> dedup_adjacency(std::vector<std::vector<int>> adj) {
  for (auto& row : adj) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
  return adj;
}

}  // namespace finitype
