#pragma once

// Net intervals, neighbour sets, characteristic vectors, and the finite
// directed graph they generate.
//
// Everything is computed in parent-normalized coordinates: a net interval of
// generation n with left endpoint A and normalized length l is represented as
// [0, l], and a covering basic interval as the affine map x -> L*x - a whose
// image of [0,1], rescaled by r_min^n and shifted by A, is the actual basic
// interval. Children of a characteristic vector depend only on (l, neighbour
// set), which is what makes the closure finite for finite-type systems.

#include <finitype/ifs.hpp>
#include <finitype/matrix.hpp>
#include <finitype/scc.hpp>

#include <deque>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace finitype {

struct NetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when the closure exceeds the vector cap: evidence the system is not
// of finite type (or the cap is too small).
struct NotFiniteTypeError : std::runtime_error {
  size_t vectors_found;
  explicit NotFiniteTypeError(size_t n)
      : std::runtime_error("characteristic-vector closure exceeded the cap after " +
                           std::to_string(n) + " vectors: not finite type at this bound"),
        vectors_found(n) {}
};

struct Neighbour {
  FieldElement a;  // r_min^-n (A - S_sigma(0)) for the covering word sigma
  FieldElement L;  // r_min^-n r_sigma, may be negative

  bool operator==(const Neighbour& o) const { return a == o.a && L == o.L; }
};

// Ascending by position, ties broken by the signed normalized length.
inline bool neighbour_less(const Neighbour& x, const Neighbour& y) {
  int c = compare(x.a, y.a);
  if (c != 0) return c < 0;
  return compare(x.L, y.L) < 0;
}

struct ReducedVector {
  FieldElement length;
  std::vector<Neighbour> nbs;

  bool operator==(const ReducedVector& o) const { return length == o.length && nbs == o.nbs; }

  std::string key() const {
    std::string k = length.str();
    for (const auto& nb : nbs) {
      k += '|';
      k += nb.a.str();
      k += ';';
      k += nb.L.str();
    }
    return k;
  }
};

struct CharVector {
  ReducedVector red;
  int sibling = 1;

  bool operator==(const CharVector& o) const { return sibling == o.sibling && red == o.red; }
};

inline CharVector root_vector(const FieldPtr& f) {
  ReducedVector red{FieldElement::one(f),
                    {Neighbour{FieldElement::zero(f), FieldElement::one(f)}}};
  return CharVector{std::move(red), 1};
}

// One candidate child of a reduced vector: its reduced vector, its endpoints
// in the parent's normalized coordinates, and the primitive transition matrix
// (rows = parent neighbours, cols = child neighbours, entries = sums of
// extension-word probabilities).
struct RawChild {
  ReducedVector red;
  FieldElement lo, hi;
  TransMatrix matrix;
};

// Children of a reduced vector, via the constructive argument: every
// generation-(n+1) basic interval meeting the net interval's interior factors
// through a covering neighbour map composed with a one-generation extension
// word relative to that neighbour's length.
inline std::vector<RawChild> children_of(const IFS& ifs, const ReducedVector& red) {
  const auto& f = ifs.field();
  const FieldElement rmin = ifs.r_min();
  auto zero = FieldElement::zero(f);

  struct Cover {
    int parent_nb;
    FieldElement slope, off;  // composed map in parent-normalized coordinates
    FieldElement lo, hi;      // its image of [0,1]
    FieldElement prob;        // p_tau
  };
  std::vector<Cover> covers;
  for (int i = 0; i < static_cast<int>(red.nbs.size()); ++i) {
    const auto& nb = red.nbs[static_cast<size_t>(i)];
    for (const auto& tau : ifs.relative_generation_words(nb.L.abs(), 1)) {
      auto mt = ifs.compose(tau);
      FieldElement slope = nb.L * mt.slope;
      FieldElement off = nb.L * mt.offset - nb.a;
      FieldElement e1 = off, e2 = slope + off;
      bool swap = compare(e1, e2) > 0;
      covers.push_back({i, slope, off, swap ? e2 : e1, swap ? e1 : e2, ifs.word_prob(tau)});
    }
  }

  // candidate endpoints inside [0, l]
  std::vector<FieldElement> pts{zero, red.length};
  for (const auto& c : covers) {
    for (const auto& e : {c.lo, c.hi}) {
      if (e.sign() > 0 && compare(e, red.length) < 0) pts.push_back(e);
    }
  }
  std::sort(pts.begin(), pts.end(),
            [](const FieldElement& a, const FieldElement& b) { return a < b; });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const FieldElement& a, const FieldElement& b) { return a == b; }),
            pts.end());

  std::vector<RawChild> out;
  for (size_t k = 0; k + 1 < pts.size(); ++k) {
    const FieldElement& u = pts[k];
    const FieldElement& v = pts[k + 1];
    std::vector<const Cover*> covering;
    for (const auto& c : covers)
      if (compare(c.lo, u) <= 0 && compare(c.hi, v) >= 0) covering.push_back(&c);
    if (covering.empty()) continue;  // gap between consecutive endpoints: misses the attractor

    std::vector<Neighbour> nbs;
    for (const auto* c : covering) {
      Neighbour nb{(u - c->off) / rmin, c->slope / rmin};
      bool seen = false;
      for (const auto& existing : nbs)
        if (existing == nb) {
          seen = true;
          break;
        }
      if (!seen) nbs.push_back(nb);
    }
    std::sort(nbs.begin(), nbs.end(), neighbour_less);

    TransMatrix t(f, static_cast<int>(red.nbs.size()), static_cast<int>(nbs.size()));
    for (const auto* c : covering) {
      Neighbour nb{(u - c->off) / rmin, c->slope / rmin};
      int col = -1;
      for (int j = 0; j < static_cast<int>(nbs.size()); ++j)
        if (nbs[static_cast<size_t>(j)] == nb) {
          col = j;
          break;
        }
      t.at(c->parent_nb, col) += c->prob;
    }
    if (!t.columns_nonzero()) throw NetError("internal: zero column in a primitive matrix");

    out.push_back(RawChild{ReducedVector{(v - u) / rmin, std::move(nbs)}, u, v, std::move(t)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// the characteristic-vector graph
// ---------------------------------------------------------------------------

struct GraphEdge {
  int child;            // node id
  TransMatrix matrix;   // primitive transition matrix
  FieldElement lo, hi;  // child endpoints in parent-normalized coordinates
};

struct GraphNode {
  ReducedVector red;
  int sibling = 1;
  int reduced_id = 0;  // discovery index of the reduced class, 0-based
  std::vector<GraphEdge> children;  // left to right
};

struct VectorGraph {
  IFS ifs;
  std::vector<GraphNode> nodes;  // index = node id; 0 is the root
  size_t reduced_count = 0;
  std::vector<std::vector<int>> reduced_children;  // reduced ids, left to right
  std::vector<FieldElement> reduced_lengths;
  bool pruned = false;

  // filled by decompose()
  std::vector<int> scc_of;                     // per node, SCC index
  std::vector<std::vector<int>> loop_classes;  // SCCs containing a cycle, by smallest node id
  int essential_class = -1;                    // index into loop_classes

  const FieldPtr& field() const { return ifs.field(); }
  bool decomposed() const { return essential_class >= 0; }
};

namespace detail {

struct ReducedClosure {
  std::vector<ReducedVector> classes;           // by discovery
  std::vector<std::vector<RawChild>> children;  // candidate children per class
  std::unordered_map<std::string, int> index;
  std::vector<bool> live;  // reaches a cycle in the candidate graph
};

inline ReducedClosure reduced_closure(const IFS& ifs, size_t max_vectors) {
  ReducedClosure rc;
  auto root = root_vector(ifs.field()).red;
  rc.classes.push_back(root);
  rc.index.emplace(root.key(), 0);
  for (size_t head = 0; head < rc.classes.size(); ++head) {
    auto kids = children_of(ifs, rc.classes[head]);
    for (const auto& k : kids) {
      auto key = k.red.key();
      if (rc.index.emplace(key, static_cast<int>(rc.classes.size())).second) {
        rc.classes.push_back(k.red);
        if (rc.classes.size() > max_vectors) throw NotFiniteTypeError(rc.classes.size());
      }
    }
    rc.children.push_back(std::move(kids));
  }

  // liveness: a class survives iff a cycle is reachable from it in the
  // candidate graph (Tarjan SCCs, then reachability over the condensation)
  size_t n = rc.classes.size();
  std::vector<std::vector<int>> adj(n);
  for (size_t i = 0; i < n; ++i)
    for (const auto& k : rc.children[i]) adj[i].push_back(rc.index.at(k.red.key()));
  adj = dedup_adjacency(std::move(adj));

  auto [comp, ncomp] = scc_partition(adj);

  std::vector<bool> comp_cyclic(static_cast<size_t>(ncomp), false);
  std::vector<size_t> comp_size(static_cast<size_t>(ncomp), 0);
  for (size_t i = 0; i < n; ++i) ++comp_size[static_cast<size_t>(comp[i])];
  for (size_t i = 0; i < n; ++i)
    for (int w : adj[i]) {
      if (comp[i] == comp[static_cast<size_t>(w)] &&
          (comp_size[static_cast<size_t>(comp[i])] > 1 || static_cast<int>(i) == w))
        comp_cyclic[static_cast<size_t>(comp[i])] = true;
    }
  // Tarjan numbers components in reverse topological order, so one forward
  // pass over components propagates liveness from successors.
  std::vector<bool> comp_live = comp_cyclic;
  for (int c = 0; c < ncomp; ++c) {
    if (comp_live[static_cast<size_t>(c)]) continue;
    for (size_t i = 0; i < n && !comp_live[static_cast<size_t>(c)]; ++i) {
      if (comp[i] != c) continue;
      for (int w : adj[i])
        if (comp_live[static_cast<size_t>(comp[static_cast<size_t>(w)])]) {
          comp_live[static_cast<size_t>(c)] = true;
          break;
        }
    }
  }
  rc.live.resize(n);
  for (size_t i = 0; i < n; ++i) rc.live[i] = comp_live[static_cast<size_t>(comp[i])];
  return rc;
}

inline VectorGraph assemble(const IFS& ifs, const ReducedClosure& rc, bool prune,
                            size_t max_vectors) {
  VectorGraph g{ifs, {}, 0, {}, {}, prune, {}, {}, -1};

  // survivors keep their relative discovery order as reduced ids
  size_t n = rc.classes.size();
  std::vector<int> red_id(n, -1);
  int next_red = 0;
  std::vector<std::vector<const RawChild*>> kept(n);
  for (size_t i = 0; i < n; ++i) {
    if (prune && !rc.live[i]) continue;
    red_id[i] = -2;  // reachable survivor ids assigned below in BFS order
    for (const auto& k : rc.children[i]) {
      int ci = rc.index.at(k.red.key());
      if (prune && !rc.live[static_cast<size_t>(ci)]) continue;
      kept[i].push_back(&k);
    }
  }
  if (prune && !rc.live[0]) throw NetError("internal: the root vector was pruned");

  // full closure over (reduced, sibling)
  std::map<std::pair<int, int>, int> node_index;  // (closure class index, sibling) -> node id
  std::deque<std::pair<int, int>> queue;
  auto intern = [&](int cls, int sib) {
    auto it = node_index.find({cls, sib});
    if (it != node_index.end()) return it->second;
    int id = static_cast<int>(g.nodes.size());
    if (g.nodes.size() >= max_vectors) throw NotFiniteTypeError(g.nodes.size() + 1);
    if (red_id[static_cast<size_t>(cls)] < 0) {
      red_id[static_cast<size_t>(cls)] = next_red++;
      g.reduced_children.emplace_back();
      g.reduced_lengths.push_back(rc.classes[static_cast<size_t>(cls)].length);
    }
    GraphNode node;
    node.red = rc.classes[static_cast<size_t>(cls)];
    node.sibling = sib;
    node.reduced_id = red_id[static_cast<size_t>(cls)];
    g.nodes.push_back(std::move(node));
    node_index.emplace(std::make_pair(cls, sib), id);
    queue.emplace_back(cls, sib);
    return id;
  };

  // make reduced ids match discovery order even before queue processing
  red_id.assign(n, -1);
  intern(0, 1);
  std::vector<bool> reduced_children_done(n, false);
  while (!queue.empty()) {
    auto [cls, sib] = queue.front();
    queue.pop_front();
    int id = node_index.at({cls, sib});

    std::unordered_map<std::string, int> sibling_count;
    bool record_reduced = !reduced_children_done[static_cast<size_t>(cls)];
    for (const RawChild* k : kept[static_cast<size_t>(cls)]) {
      int ccls = rc.index.at(k->red.key());
      int t = ++sibling_count[k->red.key()];
      int child_id = intern(ccls, t);
      g.nodes[static_cast<size_t>(id)].children.push_back(
          GraphEdge{child_id, k->matrix, k->lo, k->hi});
      if (record_reduced)
        g.reduced_children[static_cast<size_t>(g.nodes[static_cast<size_t>(id)].reduced_id)]
            .push_back(g.nodes[static_cast<size_t>(child_id)].reduced_id);
    }
    reduced_children_done[static_cast<size_t>(cls)] = true;
    if (prune && g.nodes[static_cast<size_t>(id)].children.empty())
      throw NetError("internal: a surviving vector has no children");
  }
  g.reduced_count = static_cast<size_t>(next_red);
  return g;
}

}  // namespace detail

// Breadth-first closure from the root characteristic vector. With prune =
// true (the default), candidate vectors whose intervals miss the attractor —
// those from which no cycle is reachable in the candidate graph — are
// removed, and sibling indices count surviving children only.
inline VectorGraph build_vector_graph(const IFS& ifs, size_t max_vectors = 10000,
                                      bool prune = true) {
  if (max_vectors < 1) throw NetError("max_vectors must be >= 1");
  auto rc = detail::reduced_closure(ifs, max_vectors);
  return detail::assemble(ifs, rc, prune, max_vectors);
}

// The spec operation form: re-derive the pruned graph from an unpruned one.
inline VectorGraph prune_to_attractor(const VectorGraph& g, size_t max_vectors = 10000) {
  if (g.pruned) return g;
  auto rc = detail::reduced_closure(g.ifs, max_vectors);
  return detail::assemble(g.ifs, rc, true, max_vectors);
}

// ---------------------------------------------------------------------------
// exact instantiation
// ---------------------------------------------------------------------------

struct NetInstance {
  int node = 0;
  int generation = 0;
  FieldElement lo, hi;
  std::vector<FieldElement> mass;  // row vector over the node's neighbours

  FieldElement total() const {
    auto s = FieldElement::zero(lo.field());
    for (const auto& m : mass) s += m;
    return s;
  }
};

inline NetInstance root_instance(const VectorGraph& g) {
  auto one = FieldElement::one(g.field());
  return NetInstance{0, 0, FieldElement::zero(g.field()), one, {one}};
}

inline NetInstance child_instance(const VectorGraph& g, const NetInstance& parent,
                                  const GraphEdge& edge) {
  FieldElement scale = g.ifs.r_min_pow(parent.generation);
  NetInstance child;
  child.node = edge.child;
  child.generation = parent.generation + 1;
  child.lo = parent.lo + scale * edge.lo;
  child.hi = parent.lo + scale * edge.hi;
  const auto& t = edge.matrix;
  child.mass.assign(static_cast<size_t>(t.cols()), FieldElement::zero(g.field()));
  for (int j = 0; j < t.cols(); ++j)
    for (int i = 0; i < t.rows(); ++i) {
      if (t.at(i, j).is_zero()) continue;
      child.mass[static_cast<size_t>(j)] += parent.mass[static_cast<size_t>(i)] * t.at(i, j);
    }
  return child;
}

// Exact endpoints (and neighbour masses) of the net interval with the given
// symbolic representation. The path starts at the root node and follows
// graph edges.
inline NetInstance instantiate_path(const VectorGraph& g, const std::vector<int>& path) {
  if (path.empty() || path[0] != 0) throw NetError("path must start at the root vector");
  NetInstance cur = root_instance(g);
  for (size_t k = 1; k < path.size(); ++k) {
    const auto& node = g.nodes[static_cast<size_t>(cur.node)];
    const GraphEdge* found = nullptr;
    for (const auto& e : node.children)
      if (e.child == path[k]) {
        found = &e;
        break;
      }
    if (!found) throw NetError("path is not admissible at step " + std::to_string(k));
    cur = child_instance(g, cur, *found);
  }
  return cur;
}

// All net intervals of generation n, left to right, with exact endpoints and
// neighbour masses.
inline std::vector<NetInstance> generation_instances(const VectorGraph& g, int n) {
  std::vector<NetInstance> level{root_instance(g)};
  for (int depth = 0; depth < n; ++depth) {
    std::vector<NetInstance> next;
    for (const auto& inst : level)
      for (const auto& e : g.nodes[static_cast<size_t>(inst.node)].children)
        next.push_back(child_instance(g, inst, e));
    level = std::move(next);
  }
  return level;
}

}  // namespace finitype
