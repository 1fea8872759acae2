#pragma once

// The dimension calculus on top of the vector graph: certified spectral-radius
// enclosures, local dimensions at periodic points, the bracketing of the
// essential-class dimension interval by pseudo-norm bounds and sampled cycle
// dimensions, sufficient conditions for generalized regularity, edge-path
// diagnostics, and the exact density cross-check for the absolutely
// continuous oriented golden system.

#include <finitype/transitions.hpp>

#include <functional>
#include <optional>
#include <set>
#include <string>

namespace finitype {

struct DimError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// spectral radius
// ---------------------------------------------------------------------------

namespace detail {

// Round down to a positive dyadic with the given number of fractional bits.
inline Rational dyadic_floor(const Rational& q, unsigned long bits) {
  Rational scale = rat_pow(Rational(2), bits);
  Rational scaled = q * scale;
  Rational out;
  mpz_fdiv_q(mpq_numref(out.get_mpq_t()), mpq_numref(scaled.get_mpq_t()),
             mpq_denref(scaled.get_mpq_t()));
  mpz_set(mpq_denref(out.get_mpq_t()), mpq_numref(scale.get_mpq_t()));
  out.canonicalize();
  if (sgn(out) <= 0) out = 1 / scale;
  return out;
}

// Collatz-Wielandt quotients drive the enclosure: for a nonnegative matrix B
// and any positive vector v, min_i (Bv)_i/v_i <= sp(B) <= max_i (Bv)_i/v_i.
// The block is shifted by its largest entry, which makes it primitive with a
// scale-proportional spectral gap, and the iterate is rounded to dyadics each
// round so coefficient sizes stay bounded. Rounding is harmless: the sandwich
// is valid for every positive vector.
inline Enclosure block_spectral_radius(const TransMatrix& b, double rel_tol, int max_iter,
                                       int bits) {
  const auto& f = b.field();
  int n = b.rows();

  FieldElement shift = b.at(0, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (shift < b.at(i, j)) shift = b.at(i, j);
  if (shift.sign() <= 0) throw DimError("internal: irreducible block without positive entries");
  TransMatrix shifted = b;
  for (int i = 0; i < n; ++i) shifted.at(i, i) += shift;

  // double-precision warm start for the Perron direction
  std::vector<double> bd(static_cast<size_t>(n) * static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) bd[static_cast<size_t>(i) * n + j] = shifted.at(i, j).approx();
  std::vector<double> w(static_cast<size_t>(n), 1.0);
  for (int it = 0; it < 300; ++it) {
    std::vector<double> u(static_cast<size_t>(n), 0.0);
    double mx = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j)
        u[static_cast<size_t>(i)] += bd[static_cast<size_t>(i) * n + j] * w[static_cast<size_t>(j)];
      mx = std::max(mx, u[static_cast<size_t>(i)]);
    }
    double delta = 0;
    for (int i = 0; i < n; ++i) {
      u[static_cast<size_t>(i)] /= mx;
      delta = std::max(delta, std::abs(u[static_cast<size_t>(i)] - w[static_cast<size_t>(i)]));
    }
    w = std::move(u);
    if (delta < 1e-16) break;
  }

  const unsigned long kVecBits = 192;
  std::vector<FieldElement> v;
  for (int i = 0; i < n; ++i) {
    double wi = w[static_cast<size_t>(i)];
    if (!(wi > 1e-14)) wi = 1e-14;
    v.push_back(FieldElement::from_rational(f, dyadic_floor(Rational(wi), kVecBits)));
  }

  Enclosure best(0, std::numeric_limits<double>::infinity());
  for (int it = 0; it < max_iter; ++it) {
    std::vector<FieldElement> u(static_cast<size_t>(n), FieldElement::zero(f));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (shifted.at(i, j).is_zero()) continue;
        u[static_cast<size_t>(i)] += shifted.at(i, j) * v[static_cast<size_t>(j)];
      }
    FieldElement qmin = u[0] / v[0], qmax = qmin;
    for (int i = 1; i < n; ++i) {
      auto q = u[static_cast<size_t>(i)] / v[static_cast<size_t>(i)];
      if (q < qmin) qmin = q;
      if (qmax < q) qmax = q;
    }
    Enclosure cand((qmin - shift).enclosure(bits).lo, (qmax - shift).enclosure(bits).hi);
    if (cand.lo < 0) cand.lo = 0;
    if (cand.width() < best.width()) best = cand;
    if (best.rel_width() <= rel_tol) return best;
    // renormalize and round: keeps every iteration the same size
    auto total = FieldElement::zero(f);
    for (const auto& x : u) total += x;
    for (size_t i = 0; i < u.size(); ++i) {
      auto ratio = u[i] / total;
      RatInterval iv = ratio.enclosure_rat(static_cast<int>(kVecBits));
      v[i] = FieldElement::from_rational(f, dyadic_floor(iv.lo, kVecBits));
    }
  }
  return best;  // did not reach the tolerance; still a valid sandwich
}

}  // namespace detail

// Certified enclosure of the spectral radius of a square nonnegative matrix.
// Acyclic support contributes zero exactly; diagonal blocks are located by
// SCC decomposition of the support so triangular structure is resolved
// exactly; each irreducible block runs the shifted power iteration.
inline Enclosure spectral_radius(const TransMatrix& m, double rel_tol = 1e-12,
                                 int max_iter = 400, int bits = 128) {
  if (!m.is_square()) throw DimError("spectral radius needs a square matrix");
  if (m.is_zero()) return Enclosure::point(0.0);
  int n = m.rows();

  std::vector<std::vector<int>> adj(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!m.at(i, j).is_zero()) adj[static_cast<size_t>(i)].push_back(j);
  auto [comp, ncomp] = scc_partition(adj);

  Enclosure result = Enclosure::point(0.0);
  for (int c = 0; c < ncomp; ++c) {
    std::vector<int> members;
    for (int i = 0; i < n; ++i)
      if (comp[static_cast<size_t>(i)] == c) members.push_back(i);
    if (members.size() == 1) {
      int i = members[0];
      if (m.at(i, i).is_zero()) continue;  // no cycle: contributes nothing
      result = emax(result, m.at(i, i).enclosure(bits));
      continue;
    }
    TransMatrix block(m.field(), static_cast<int>(members.size()),
                      static_cast<int>(members.size()));
    for (size_t a = 0; a < members.size(); ++a)
      for (size_t b = 0; b < members.size(); ++b)
        block.at(static_cast<int>(a), static_cast<int>(b)) = m.at(members[a], members[b]);
    result = emax(result, detail::block_spectral_radius(block, rel_tol, max_iter, bits));
  }

  // tighten with the column/row-sum sandwich, valid for any nonnegative matrix
  result.lo = std::max({result.lo, m.min_col_sum().enclosure(bits).lo,
                        m.min_row_sum().enclosure(bits).lo});
  result.hi = std::min({result.hi, m.max_col_sum().enclosure(bits).hi,
                        m.max_row_sum().enclosure(bits).hi});
  if (result.lo > result.hi) throw DimError("internal: spectral radius sandwich inverted");
  return result;
}

// ---------------------------------------------------------------------------
// periodic points
// ---------------------------------------------------------------------------

struct PeriodicPoint {
  std::vector<int> prefix;  // admissible root path ending at the cycle's start
  std::vector<int> cycle;   // first and last node equal, at least one edge
  // optional second representation for boundary points
  std::optional<std::pair<std::vector<int>, std::vector<int>>> second;
};

namespace detail {

inline void check_representation(const std::vector<int>& prefix, const std::vector<int>& cycle) {
  if (prefix.empty() || prefix.front() != 0)
    throw DimError("periodic prefix must start at the root vector");
  if (cycle.size() < 2 || cycle.front() != cycle.back())
    throw DimError("cycle must start and end at the same vector");
  if (prefix.back() != cycle.front())
    throw DimError("prefix must end where the cycle starts");
}

inline std::vector<int> extend_by_cycle(std::vector<int> path, const std::vector<int>& cycle,
                                        int times) {
  for (int t = 0; t < times; ++t) path.insert(path.end(), cycle.begin() + 1, cycle.end());
  return path;
}

}  // namespace detail

// The unique point carried by the eventually-periodic symbolic representation
// (prefix, cycle, cycle, ...), exactly: three consecutive instantiations give
// the affine per-period recurrence of the left endpoints, whose fixed point
// is the limit.
inline FieldElement periodic_fixed_point(const VectorGraph& g, const std::vector<int>& prefix,
                                         const std::vector<int>& cycle) {
  detail::check_representation(prefix, cycle);
  auto a1 = instantiate_path(g, detail::extend_by_cycle(prefix, cycle, 1)).lo;
  auto a2 = instantiate_path(g, detail::extend_by_cycle(prefix, cycle, 2)).lo;
  auto a3 = instantiate_path(g, detail::extend_by_cycle(prefix, cycle, 3)).lo;
  if (a2 == a1) {
    if (!(a3 == a2)) throw DimError("internal: endpoint recurrence is not affine");
    return a1;
  }
  auto s = (a3 - a2) / (a2 - a1);
  if (!(s.abs() < FieldElement::one(g.field())))
    throw DimError("internal: periodic contraction ratio not below one");
  return (a2 - s * a1) / (FieldElement::one(g.field()) - s);
}

// Local dimension at a periodic point: log sp(T(cycle)) / (beta log r_min).
// With a second boundary representation, the representation with the larger
// spectral radius decides, i.e. the smaller of the two quotients.
inline Enclosure periodic_dim(const VectorGraph& g, const PeriodicPoint& pt,
                              double sp_tol = 1e-12, int bits = 128) {
  auto one_rep = [&](const std::vector<int>& prefix, const std::vector<int>& cycle) {
    detail::check_representation(prefix, cycle);
    instantiate_path(g, detail::extend_by_cycle(prefix, cycle, 1));  // admissibility
    auto t = path_matrix(g, cycle);
    auto sp = spectral_radius(t, sp_tol, 400, bits);
    if (!(sp.lo > 0)) throw DimError("internal: cycle product with vanishing spectral radius");
    int beta = static_cast<int>(cycle.size()) - 1;
    auto logr = log_enclosure(g.ifs.r_min().enclosure(bits));
    return div(log_enclosure(sp), mul(Enclosure::point(beta), logr));
  };
  auto d1 = one_rep(pt.prefix, pt.cycle);
  if (!pt.second) return d1;
  auto x1 = periodic_fixed_point(g, pt.prefix, pt.cycle);
  auto x2 = periodic_fixed_point(g, pt.second->first, pt.second->second);
  if (!(x1 == x2))
    throw DimError("the two symbolic representations do not fix the same point");
  auto d2 = one_rep(pt.second->first, pt.second->second);
  return emin(d1, d2);
}

// Representation of an endpoint of [0,1]: follow the extreme child from the
// root until a vector repeats.
inline PeriodicPoint endpoint_point(const VectorGraph& g, bool leftmost) {
  std::vector<int> seq{0};
  std::vector<int> seen_at(g.nodes.size(), -1);
  seen_at[0] = 0;
  int cur = 0;
  while (true) {
    const auto& kids = g.nodes[static_cast<size_t>(cur)].children;
    if (kids.empty()) throw DimError("internal: childless vector on the boundary path");
    cur = leftmost ? kids.front().child : kids.back().child;
    seq.push_back(cur);
    if (seen_at[static_cast<size_t>(cur)] >= 0) {
      int j = seen_at[static_cast<size_t>(cur)];
      PeriodicPoint pt;
      pt.prefix.assign(seq.begin(), seq.begin() + j + 1);
      pt.cycle.assign(seq.begin() + j, seq.end());
      return pt;
    }
    seen_at[static_cast<size_t>(cur)] = static_cast<int>(seq.size()) - 1;
  }
}

// ---------------------------------------------------------------------------
// local dimension quotients along a finite path
// ---------------------------------------------------------------------------

struct LocalDimQuotients {
  Enclosure single;  // log P(center) / (n log r_min)
  Enclosure triple;  // same with the two tiling neighbours' mass added
  FieldElement center_mass, flank_mass;
};

// Walks the path keeping the tiling neighbours on both sides in lockstep, so
// flank masses are exact without materializing the generation.
inline LocalDimQuotients approx_local_dim(const VectorGraph& g, const std::vector<int>& path,
                                          int bits = 128) {
  if (path.size() < 2 || path[0] != 0)
    throw DimError("need an admissible root path of positive generation");
  NetInstance center = root_instance(g);
  std::optional<NetInstance> left, right;

  for (size_t k = 1; k < path.size(); ++k) {
    const auto& kids = g.nodes[static_cast<size_t>(center.node)].children;
    int idx = -1;
    for (size_t i = 0; i < kids.size(); ++i)
      if (kids[i].child == path[k]) {
        idx = static_cast<int>(i);
        break;
      }
    if (idx < 0) throw DimError("path is not admissible at step " + std::to_string(k));

    std::optional<NetInstance> nleft, nright;
    if (idx > 0) {
      nleft = child_instance(g, center, kids[static_cast<size_t>(idx - 1)]);
    } else if (left) {
      const auto& lk = g.nodes[static_cast<size_t>(left->node)].children;
      if (!lk.empty()) nleft = child_instance(g, *left, lk.back());
    }
    if (idx + 1 < static_cast<int>(kids.size())) {
      nright = child_instance(g, center, kids[static_cast<size_t>(idx + 1)]);
    } else if (right) {
      const auto& rk = g.nodes[static_cast<size_t>(right->node)].children;
      if (!rk.empty()) nright = child_instance(g, *right, rk.front());
    }
    center = child_instance(g, center, kids[static_cast<size_t>(idx)]);
    left = std::move(nleft);
    right = std::move(nright);
  }

  int n = static_cast<int>(path.size()) - 1;
  auto logr = log_enclosure(g.ifs.r_min().enclosure(bits));
  auto denom = mul(Enclosure::point(n), logr);
  auto pc = center.total();
  auto flank = FieldElement::zero(g.field());
  if (left) flank += left->total();
  if (right) flank += right->total();

  LocalDimQuotients out;
  out.center_mass = pc;
  out.flank_mass = flank;
  out.single = div(log_enclosure(pc.enclosure(bits)), denom);
  out.triple = div(log_enclosure((pc + flank).enclosure(bits)), denom);
  return out;
}

// ---------------------------------------------------------------------------
// the essential dimension bracket
// ---------------------------------------------------------------------------

struct CycleSample {
  std::vector<int> cycle;
  Enclosure dim;
};

struct DimensionBracket {
  Enclosure a_lo, a_hi, b_lo, b_hi;
  CycleSample a_witness, b_witness;
  int cycle_length_used = 0;
  bool degenerate = false;
};

namespace detail {

inline Enclosure root_of(const Enclosure& e, int len) {
  double ex = 1.0 / len;
  double lo = e.lo > 0 ? nudge_down(std::pow(e.lo, ex)) : 0.0;
  double hi = nudge_up(std::pow(e.hi, ex));
  return Enclosure(std::max(lo, 0.0), hi);
}

}  // namespace detail

// Brackets [a, b] of the attainable local dimensions over the essential
// class: outer bounds from the min/max column- and row-sum pseudo-norms of
// the simple generator cycles (every rotation of each), inner bounds from the
// periodic dimensions of every closed walk up to the length cap.
inline DimensionBracket essential_bracket(const VectorGraph& g, int max_cycle_len = 6,
                                          double sp_tol = 1e-12, int bits = 128) {
  if (max_cycle_len < 1) throw DimError("max_cycle_len must be >= 1");
  const auto& cls = essential_nodes(g);
  auto pos = is_positive_type(g, cls, 32);
  if (!pos.positive)
    throw DimError(
        "essential class not certified of positive type: the dimension interval is only "
        "guaranteed for positive-type classes, refusing to bracket");

  auto generators = simple_cycles(g, cls, max_cycle_len);
  if (generators.empty()) throw DimError("no cycles within the length cap");

  // Long essential paths decompose into the generator loops at their common
  // hub when one exists, so pseudo-norm products taken at that basing give
  // the bounds; rebase every cycle there. Without a common node (all loop
  // lengths effectively independent), keep each cycle's own basing.
  {
    std::set<int> common(generators[0].begin(), generators[0].end());
    for (const auto& cyc : generators) {
      std::set<int> cur(cyc.begin(), cyc.end());
      std::set<int> inter;
      std::set_intersection(common.begin(), common.end(), cur.begin(), cur.end(),
                            std::inserter(inter, inter.begin()));
      common = std::move(inter);
    }
    if (!common.empty()) {
      int hub = *common.begin();
      for (auto& cyc : generators) {
        int len = static_cast<int>(cyc.size()) - 1;
        int pos = 0;
        while (cyc[static_cast<size_t>(pos)] != hub) ++pos;
        std::vector<int> rebased;
        for (int k = 0; k <= len; ++k)
          rebased.push_back(cyc[static_cast<size_t>((pos + k) % len)]);
        cyc = std::move(rebased);
      }
    }
  }

  auto logr = log_enclosure(g.ifs.r_min().enclosure(bits));

  std::optional<Enclosure> min_c, min_r, max_c, max_r;
  bool row_lower_usable = true;
  auto fold_min = [](std::optional<Enclosure>& acc, const Enclosure& v) {
    acc = acc ? emin(*acc, v) : v;
  };
  auto fold_max = [](std::optional<Enclosure>& acc, const Enclosure& v) {
    acc = acc ? emax(*acc, v) : v;
  };
  for (const auto& cyc : generators) {
    int len = static_cast<int>(cyc.size()) - 1;
    auto t = path_matrix(g, cyc);
    fold_min(min_c, detail::root_of(t.min_col_sum().enclosure(bits), len));
    fold_max(max_c, detail::root_of(t.max_col_sum().enclosure(bits), len));
    fold_max(max_r, detail::root_of(t.max_row_sum().enclosure(bits), len));
    auto mr = t.min_row_sum();
    if (mr.sign() <= 0)
      row_lower_usable = false;
    else
      fold_min(min_r, detail::root_of(mr.enclosure(bits), len));
  }
  // valid either way round; keep the tighter variant
  Enclosure lower_norm = row_lower_usable && min_r ? emax(*min_c, *min_r) : *min_c;
  Enclosure upper_norm = emin(*max_c, *max_r);

  DimensionBracket out;
  out.cycle_length_used = max_cycle_len;
  out.b_hi = div(log_enclosure(lower_norm), logr);
  out.a_lo = div(log_enclosure(upper_norm), logr);

  // sampled periodic dimensions over closed walks
  std::optional<Enclosure> lo_dim, hi_dim;
  for (const auto& walk : closed_walks(g, cls, max_cycle_len)) {
    auto t = path_matrix(g, walk);
    auto sp = spectral_radius(t, sp_tol, 400, bits);
    if (!(sp.lo > 0)) throw DimError("internal: essential cycle with vanishing mass");
    int beta = static_cast<int>(walk.size()) - 1;
    Enclosure d = div(log_enclosure(sp), mul(Enclosure::point(beta), logr));
    if (!lo_dim || d.mid() < out.a_witness.dim.mid()) out.a_witness = CycleSample{walk, d};
    if (!hi_dim || d.mid() > out.b_witness.dim.mid()) out.b_witness = CycleSample{walk, d};
    fold_min(lo_dim, d);
    fold_max(hi_dim, d);
  }
  out.a_hi = *lo_dim;
  out.b_lo = *hi_dim;
  out.degenerate = (out.a_lo.lo > out.a_hi.hi) || (out.b_lo.lo > out.b_hi.hi);
  return out;
}

// ---------------------------------------------------------------------------
// generalized regularity: the sufficient sign-case criteria
// ---------------------------------------------------------------------------

enum class RegVerdict { Holds, Fails, Inapplicable };

struct RegularityReport {
  RegVerdict verdict = RegVerdict::Inapplicable;
  int sign_case = 0;  // 1: both end maps orient forward, 2: mixed, 3: both backward
  std::vector<Enclosure> ratios;  // log p_j / log |r_j| per map
  std::vector<std::optional<Rational>> exact_ratios;
  std::string note;
};

namespace detail {

inline std::optional<Rational> exact_log_ratio(const FieldElement& p, const FieldElement& rabs,
                                               unsigned long bound = 64) {
  // log p / log |r| = b/a iff p^a = |r|^b
  auto pa = p;
  for (unsigned long a = 1; a <= bound; ++a) {
    auto rb = rabs;
    for (unsigned long b = 1; b <= bound; ++b) {
      if (pa == rb) {
        Rational q(static_cast<long>(b), static_cast<long>(a));
        q.canonicalize();
        return q;
      }
      rb *= rabs;
    }
    pa *= p;
  }
  return std::nullopt;
}

inline Enclosure log_ratio(const FieldElement& p, const FieldElement& rabs, int bits) {
  return div(log_enclosure(p.enclosure(bits)), log_enclosure(rabs.enclosure(bits)));
}

}  // namespace detail

inline RegularityReport generalized_regular_sufficient(const IFS& ifs) {
  RegularityReport rep;
  size_t k = ifs.map_count();
  auto one = FieldElement::one(ifs.field());

  int j0 = -1, jk = -1;
  bool clean = true;
  for (size_t j = 0; j < k; ++j) {
    bool has0 = ifs.map(j).image_min().is_zero();
    bool has1 = ifs.map(j).image_max() == one;
    if (has0) {
      if (j0 >= 0) clean = false;
      j0 = static_cast<int>(j);
    }
    if (has1) {
      if (jk >= 0) clean = false;
      jk = static_cast<int>(j);
    }
  }
  std::vector<std::optional<Rational>> exact(k);
  std::vector<Enclosure> ratios(k);
  for (size_t j = 0; j < k; ++j) {
    auto rabs = ifs.map(j).slope.abs();
    exact[j] = detail::exact_log_ratio(ifs.prob(j), rabs);
    ratios[j] = detail::log_ratio(ifs.prob(j), rabs, 128);
  }
  rep.ratios = ratios;
  rep.exact_ratios = exact;

  if (!clean || j0 < 0 || jk < 0 || j0 == jk) {
    rep.note = "hypothesis unmet: need unique maps covering each endpoint";
    return rep;
  }
  // compare: -1, 0, +1, or nullopt when undecidable at the precision ladder
  auto cmp = [&](size_t i, size_t j) -> std::optional<int> {
    if (ifs.prob(i) == ifs.prob(j) &&
        ifs.map(i).slope.abs() == ifs.map(j).slope.abs())
      return 0;
    if (exact[i] && exact[j]) {
      if (*exact[i] < *exact[j]) return -1;
      if (*exact[i] > *exact[j]) return 1;
      return 0;
    }
    for (int bits : {128, 512, 2048}) {
      auto ei = exact[i] ? Enclosure(to_double_down(*exact[i]), to_double_up(*exact[i]))
                         : detail::log_ratio(ifs.prob(i), ifs.map(i).slope.abs(), bits);
      auto ej = exact[j] ? Enclosure(to_double_down(*exact[j]), to_double_up(*exact[j]))
                         : detail::log_ratio(ifs.prob(j), ifs.map(j).slope.abs(), bits);
      if (ei.hi < ej.lo) return -1;
      if (ei.lo > ej.hi) return 1;
    }
    return std::nullopt;
  };

  int s0 = ifs.map(static_cast<size_t>(j0)).slope.sign();
  int sk = ifs.map(static_cast<size_t>(jk)).slope.sign();
  rep.sign_case = (s0 > 0 && sk > 0) ? 1 : (s0 < 0 && sk < 0) ? 3 : 2;

  for (size_t j = 0; j < k; ++j) {
    bool other = static_cast<int>(j) != j0 && static_cast<int>(j) != jk;
    if (other && !(ifs.map(j).image_min().sign() > 0 &&
                   (one - ifs.map(j).image_max()).sign() > 0)) {
      rep.note = "hypothesis unmet: an interior map touches an endpoint of [0,1]";
      return rep;
    }
  }

  auto fail = [&](const std::string& why) {
    rep.verdict = RegVerdict::Fails;
    rep.note = why + " (sufficient condition only: its failure does not prove the measure "
               "is not generalized regular)";
    return rep;
  };
  auto undecided = [&](const std::string& why) {
    rep.verdict = RegVerdict::Inapplicable;
    rep.note = "could not certify: " + why;
    return rep;
  };

  if (rep.sign_case == 1 || rep.sign_case == 3) {
    auto eq = cmp(static_cast<size_t>(j0), static_cast<size_t>(jk));
    if (!eq) return undecided("equality of the endpoint ratios");
    if (*eq != 0) return fail("endpoint ratios differ");
    for (size_t j = 0; j < k; ++j) {
      if (static_cast<int>(j) == j0 || static_cast<int>(j) == jk) continue;
      auto c = cmp(static_cast<size_t>(j0), j);
      if (!c) return undecided("ratio comparison against an interior map");
      if (*c < 0) return fail("an interior ratio exceeds the endpoint ratio");
    }
  } else {
    size_t anchor = s0 > 0 ? static_cast<size_t>(j0) : static_cast<size_t>(jk);
    for (size_t j = 0; j < k; ++j) {
      if (j == anchor) continue;
      auto c = cmp(anchor, j);
      if (!c) return undecided("ratio comparison against the forward endpoint map");
      if (*c < 0) return fail("a ratio exceeds the forward endpoint map's ratio");
    }
  }
  rep.verdict = RegVerdict::Holds;
  return rep;
}

// ---------------------------------------------------------------------------
// edge-path diagnostics
// ---------------------------------------------------------------------------

struct DiagnosticsRow {
  int n;
  FieldElement gamma_max;  // worst edge-path mass over all vectors, exact
  FieldElement r_hat;      // least observed transition ratio: an upper bound
                           // on the true infimum, so b_hat is a lower bound
  FieldElement b_hat;      // gamma_max / r_hat
};

namespace detail {

inline FieldElement gamma_of(const IFS& ifs, const ReducedVector& red, int n) {
  std::set<Word> words;
  auto one = FieldElement::one(ifs.field());
  for (const auto& nb : red.nbs) {
    bool pos = nb.L.sign() > 0;
    // does the covering interval share the net interval's left/right endpoint?
    bool share_left = pos ? nb.a.is_zero() : nb.a == nb.L;
    bool share_right = pos ? (nb.L - nb.a == red.length) : (-nb.a == red.length);
    if (!share_left && !share_right) continue;
    for (const auto& w : ifs.relative_generation_words(nb.L.abs(), n)) {
      auto m = ifs.compose(w);
      bool keeps_left = pos ? m.image_min().is_zero() : m.image_max() == one;
      bool keeps_right = pos ? m.image_max() == one : m.image_min().is_zero();
      if ((share_left && keeps_left) || (share_right && keeps_right)) words.insert(w);
    }
  }
  auto total = FieldElement::zero(ifs.field());
  for (const auto& w : words) total += ifs.word_prob(w);
  return total;
}

}  // namespace detail

inline std::vector<DiagnosticsRow> regularity_diagnostics(const VectorGraph& g, int n_max,
                                                          int m_max) {
  if (n_max < 1 || m_max < 1) throw DimError("diagnostic depths must be >= 1");
  const auto& ifs = g.ifs;

  // Gamma_max(n): edge paths depend only on the reduced vector
  std::vector<FieldElement> gamma_max(static_cast<size_t>(n_max));
  std::vector<bool> seen_reduced(g.reduced_count, false);
  for (const auto& node : g.nodes) {
    if (seen_reduced[static_cast<size_t>(node.reduced_id)]) continue;
    seen_reduced[static_cast<size_t>(node.reduced_id)] = true;
    for (int n = 1; n <= n_max; ++n) {
      auto gma = detail::gamma_of(ifs, node.red, n);
      auto& slot = gamma_max[static_cast<size_t>(n - 1)];
      if (!slot.valid() || slot < gma) slot = gma;
    }
  }

  // distinct normalized mass states reachable within m_max generations
  struct State {
    int node;
    std::vector<FieldElement> mass;  // normalized to total 1
  };
  std::vector<State> states;
  std::set<std::string> state_keys;
  {
    std::deque<std::pair<NetInstance, int>> queue{{root_instance(g), 0}};
    while (!queue.empty()) {
      auto [inst, depth] = queue.front();
      queue.pop_front();
      if (depth >= 1) {
        auto total = inst.total();
        State st{inst.node, inst.mass};
        std::string key = std::to_string(inst.node);
        for (auto& x : st.mass) {
          x /= total;
          key += "|" + x.str();
        }
        if (!state_keys.insert(key).second) continue;  // proportional state already expanded
        states.push_back(std::move(st));
      }
      if (depth < m_max)
        for (const auto& e : g.nodes[static_cast<size_t>(inst.node)].children)
          queue.emplace_back(child_instance(g, inst, e), depth + 1);
    }
  }

  std::vector<FieldElement> r_hat(static_cast<size_t>(n_max));
  std::function<void(int, const std::vector<FieldElement>&, int)> descend =
      [&](int node, const std::vector<FieldElement>& mass, int depth) {
        if (depth >= 1) {
          auto total = FieldElement::zero(g.field());
          for (const auto& x : mass) total += x;
          auto& slot = r_hat[static_cast<size_t>(depth - 1)];
          if (!slot.valid() || total < slot) slot = total;
        }
        if (depth >= n_max) return;
        for (const auto& e : g.nodes[static_cast<size_t>(node)].children) {
          const auto& t = e.matrix;
          std::vector<FieldElement> next(static_cast<size_t>(t.cols()),
                                         FieldElement::zero(g.field()));
          for (int j = 0; j < t.cols(); ++j)
            for (int i = 0; i < t.rows(); ++i) {
              if (t.at(i, j).is_zero()) continue;
              next[static_cast<size_t>(j)] += mass[static_cast<size_t>(i)] * t.at(i, j);
            }
          descend(e.child, next, depth + 1);
        }
      };
  for (const auto& st : states) descend(st.node, st.mass, 0);

  std::vector<DiagnosticsRow> rows;
  for (int n = 1; n <= n_max; ++n) {
    auto gm = gamma_max[static_cast<size_t>(n - 1)];
    auto rh = r_hat[static_cast<size_t>(n - 1)];
    rows.push_back(DiagnosticsRow{n, gm, rh, gm / rh});
  }
  return rows;
}

// ---------------------------------------------------------------------------
// density cross-check for the oriented golden system with p0 = r^2
// ---------------------------------------------------------------------------

struct DensityReport {
  FieldElement sum_abs_dev;  // sum over the generation of |P - integral|
  FieldElement max_rel_dev;  // max of |P - integral| / integral
  size_t intervals = 0;
};

inline DensityReport density_check_golden(const VectorGraph& g, int n) {
  const auto& ifs = g.ifs;
  const auto& f = ifs.field();
  auto r = FieldElement::generator(f);
  auto one = FieldElement::one(f);
  bool shape = ifs.map_count() == 2 && (r * r + r - one).is_zero() && r.sign() > 0 &&
               (one - r).sign() > 0 && ifs.map(0).slope == r && ifs.map(0).offset.is_zero() &&
               ifs.map(1).slope == -r && ifs.map(1).offset == one &&
               ifs.prob(0) == one - r;
  if (!shape)
    throw DimError(
        "density check applies only to the oriented golden system with p0 = r^2 exactly");

  // antiderivatives of 2x/r on [0,r] and 2(1-x)/r^2 on [r,1]
  auto integral = [&](const FieldElement& u, const FieldElement& v) -> FieldElement {
    std::function<FieldElement(const FieldElement&, const FieldElement&)> piece =
        [&](const FieldElement& a, const FieldElement& b) -> FieldElement {
      if ((b - r).sign() <= 0) return (b * b - a * a) / r;
      if ((a - r).sign() >= 0) {
        auto two = one + one;
        return (two * (b - a) - (b * b - a * a)) / (r * r);
      }
      return piece(a, r) + piece(r, b);
    };
    return piece(u, v);
  };

  DensityReport rep{FieldElement::zero(f), FieldElement::zero(f), 0};
  for (const auto& inst : generation_instances(g, n)) {
    auto mass = inst.total();
    auto target = integral(inst.lo, inst.hi);
    if (target.sign() <= 0) throw DimError("internal: vanishing density mass on the support");
    auto dev = (mass - target).abs();
    rep.sum_abs_dev += dev;
    auto rel = dev / target;
    if (rep.max_rel_dev < rel) rep.max_rel_dev = rel;
    ++rep.intervals;
  }
  return rep;
}

}  // namespace finitype
