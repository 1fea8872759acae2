#pragma once

// Path products over the characteristic-vector graph, its decomposition into
// loop classes (strongly connected components carrying a cycle), the unique
// essential class, and the positive-type search.

#include <finitype/netstructure.hpp>

#include <algorithm>
#include <deque>
#include <functional>
#include <set>

namespace finitype {

// More than one terminal strongly connected component: the model guarantees a
// unique essential class, so this indicates corrupt input or an internal bug.
struct ModelViolationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline const GraphEdge& find_edge(const VectorGraph& g, int parent, int child) {
  for (const auto& e : g.nodes[static_cast<size_t>(parent)].children)
    if (e.child == child) return e;
  throw NetError("no edge " + std::to_string(parent + 1) + " -> " + std::to_string(child + 1));
}

// Left-to-right product of the primitive matrices along a node path. A
// one-node path yields the identity on that node's neighbours.
inline TransMatrix path_matrix(const VectorGraph& g, const std::vector<int>& path) {
  if (path.empty()) throw NetError("empty path");
  TransMatrix acc = TransMatrix::identity(
      g.field(), static_cast<int>(g.nodes[static_cast<size_t>(path[0])].red.nbs.size()));
  for (size_t k = 1; k < path.size(); ++k) acc = acc * find_edge(g, path[k - 1], path[k]).matrix;
  return acc;
}

// Exact total mass estimate P of the net interval reached by an admissible
// path from the root: the 1-norm of the path product.
inline FieldElement pn_of_path(const VectorGraph& g, const std::vector<int>& path) {
  if (path.empty() || path[0] != 0) throw NetError("path must start at the root vector");
  return path_matrix(g, path).norm1();
}

// ---------------------------------------------------------------------------
// loop classes and the essential class
// ---------------------------------------------------------------------------

inline VectorGraph& decompose(VectorGraph& g) {
  size_t n = g.nodes.size();
  std::vector<std::vector<int>> adj(n);
  for (size_t i = 0; i < n; ++i)
    for (const auto& e : g.nodes[i].children) adj[i].push_back(e.child);
  adj = dedup_adjacency(std::move(adj));

  auto [comp, ncomp] = scc_partition(adj);
  g.scc_of = comp;

  std::vector<size_t> comp_size(static_cast<size_t>(ncomp), 0);
  for (size_t i = 0; i < n; ++i) ++comp_size[static_cast<size_t>(comp[i])];
  std::vector<bool> cyclic(static_cast<size_t>(ncomp), false);
  std::vector<bool> terminal(static_cast<size_t>(ncomp), true);
  for (size_t i = 0; i < n; ++i)
    for (int w : adj[i]) {
      int ci = comp[i], cw = comp[static_cast<size_t>(w)];
      if (ci == cw) {
        if (comp_size[static_cast<size_t>(ci)] > 1 || static_cast<int>(i) == w)
          cyclic[static_cast<size_t>(ci)] = true;
      } else {
        terminal[static_cast<size_t>(ci)] = false;
      }
    }

  // loop classes ordered by their smallest node id, members ascending
  std::vector<std::vector<int>> classes(static_cast<size_t>(ncomp));
  for (size_t i = 0; i < n; ++i) classes[static_cast<size_t>(comp[i])].push_back(static_cast<int>(i));
  std::vector<int> loop_comp_ids;
  for (int c = 0; c < ncomp; ++c)
    if (cyclic[static_cast<size_t>(c)]) loop_comp_ids.push_back(c);
  std::sort(loop_comp_ids.begin(), loop_comp_ids.end(),
            [&](int a, int b) { return classes[static_cast<size_t>(a)][0] < classes[static_cast<size_t>(b)][0]; });

  g.loop_classes.clear();
  int essential = -1;
  int terminal_count = 0;
  for (size_t k = 0; k < loop_comp_ids.size(); ++k) {
    int c = loop_comp_ids[k];
    g.loop_classes.push_back(classes[static_cast<size_t>(c)]);
    if (terminal[static_cast<size_t>(c)]) {
      ++terminal_count;
      essential = static_cast<int>(k);
    }
  }
  // a terminal SCC in a graph where every node has a child is necessarily
  // cyclic, so counting over loop classes sees every terminal SCC
  for (int c = 0; c < ncomp; ++c)
    if (terminal[static_cast<size_t>(c)] && !cyclic[static_cast<size_t>(c)])
      throw ModelViolationError("terminal acyclic component: graph was not pruned");
  if (terminal_count != 1)
    throw ModelViolationError("expected exactly one terminal loop class, found " +
                              std::to_string(terminal_count));
  g.essential_class = essential;
  return g;
}

inline const std::vector<int>& essential_nodes(const VectorGraph& g) {
  if (!g.decomposed()) throw NetError("graph not decomposed");
  return g.loop_classes[static_cast<size_t>(g.essential_class)];
}

inline bool in_essential_class(const VectorGraph& g, int node) {
  const auto& cls = essential_nodes(g);
  return std::binary_search(cls.begin(), cls.end(), node);
}

// ---------------------------------------------------------------------------
// positive type
// ---------------------------------------------------------------------------

struct PositiveTypeResult {
  bool positive = false;
  std::vector<int> witness;  // node path whose product is entrywise positive
};

// Breadth-first search over zero/nonzero patterns of path products confined
// to the given class. The pattern space is finite, so no coefficient growth.
inline PositiveTypeResult is_positive_type(const VectorGraph& g, const std::vector<int>& cls,
                                           int max_path_len) {
  std::set<int> members(cls.begin(), cls.end());

  struct State {
    int node;
    std::vector<bool> pattern;  // rows = start-node neighbours
    int rows;
    std::vector<int> path;
  };
  auto all_true = [](const std::vector<bool>& p) {
    for (bool b : p)
      if (!b) return false;
    return true;
  };
  auto bool_mul = [](const std::vector<bool>& a, int ar, int ac, const std::vector<bool>& b,
                     int bc) {
    std::vector<bool> c(static_cast<size_t>(ar) * static_cast<size_t>(bc), false);
    for (int i = 0; i < ar; ++i)
      for (int k = 0; k < ac; ++k) {
        if (!a[static_cast<size_t>(i) * ac + k]) continue;
        for (int j = 0; j < bc; ++j)
          if (b[static_cast<size_t>(k) * bc + j]) c[static_cast<size_t>(i) * bc + j] = true;
      }
    return c;
  };

  std::set<std::pair<std::pair<int, int>, std::vector<bool>>> seen;  // ((start, node), pattern)
  std::deque<State> queue;
  for (int s : cls) {
    int rows = static_cast<int>(g.nodes[static_cast<size_t>(s)].red.nbs.size());
    std::vector<bool> ident(static_cast<size_t>(rows) * static_cast<size_t>(rows), false);
    for (int i = 0; i < rows; ++i) ident[static_cast<size_t>(i) * rows + i] = true;
    queue.push_back(State{s, std::move(ident), rows, {s}});
  }
  while (!queue.empty()) {
    State st = std::move(queue.front());
    queue.pop_front();
    if (static_cast<int>(st.path.size()) - 1 >= max_path_len) continue;
    int cols = static_cast<int>(g.nodes[static_cast<size_t>(st.node)].red.nbs.size());
    for (const auto& e : g.nodes[static_cast<size_t>(st.node)].children) {
      if (!members.count(e.child)) continue;
      auto epat = e.matrix.support();
      auto next = bool_mul(st.pattern, st.rows, cols, epat, e.matrix.cols());
      State ns{e.child, std::move(next), st.rows, st.path};
      ns.path.push_back(e.child);
      if (all_true(ns.pattern)) return PositiveTypeResult{true, ns.path};
      auto key = std::make_pair(std::make_pair(st.path[0], ns.node), ns.pattern);
      if (seen.insert(key).second) queue.push_back(std::move(ns));
    }
  }
  return PositiveTypeResult{};
}

// ---------------------------------------------------------------------------
// cycle enumeration
// ---------------------------------------------------------------------------

// Vertex-simple cycles of length <= max_len inside the node set, each reported
// once, based at its smallest node id, as a closed node path (first == last).
inline std::vector<std::vector<int>> simple_cycles(const VectorGraph& g,
                                                   const std::vector<int>& cls, int max_len) {
  std::set<int> members(cls.begin(), cls.end());
  std::vector<std::vector<int>> out;
  std::vector<int> path;
  std::set<int> on_path;

  std::function<void(int, int)> dfs = [&](int start, int v) {
    if (static_cast<int>(path.size()) > max_len) return;
    for (const auto& e : g.nodes[static_cast<size_t>(v)].children) {
      int w = e.child;
      if (!members.count(w) || w < start) continue;
      if (w == start) {
        auto cyc = path;
        cyc.push_back(start);
        out.push_back(cyc);
        continue;
      }
      if (on_path.count(w)) continue;
      path.push_back(w);
      on_path.insert(w);
      dfs(start, w);
      on_path.erase(w);
      path.pop_back();
    }
  };
  for (int s : cls) {
    path = {s};
    on_path = {s};
    dfs(s, s);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// All closed walks of length 1..max_len inside the node set, based at the
// smallest node they visit (so each rotation class appears at least once and
// usually once).
inline std::vector<std::vector<int>> closed_walks(const VectorGraph& g,
                                                  const std::vector<int>& cls, int max_len) {
  std::set<int> members(cls.begin(), cls.end());
  std::vector<std::vector<int>> out;
  std::vector<int> path;

  std::function<void(int, int)> dfs = [&](int start, int v) {
    if (static_cast<int>(path.size()) > max_len) return;
    for (const auto& e : g.nodes[static_cast<size_t>(v)].children) {
      int w = e.child;
      if (!members.count(w) || w < start) continue;
      if (w == start) {
        auto cyc = path;
        cyc.push_back(start);
        out.push_back(cyc);
      }
      if (static_cast<int>(path.size()) < max_len) {
        path.push_back(w);
        dfs(start, w);
        path.pop_back();
      }
    }
  };
  for (int s : cls) {
    path = {s};
    dfs(s, s);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace finitype
