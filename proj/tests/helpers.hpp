#pragma once

// Shared fixtures: the golden-ratio field Q(r), r^2 + r - 1 = 0, r ~ 0.618,
// and the example systems used across the suites.

#include <finitype/field.hpp>
#include <finitype/ifs.hpp>
#include <finitype/netstructure.hpp>

#include <random>

namespace ft = finitype;

inline ft::FieldPtr golden_field() {
  static ft::FieldPtr f = ft::make_field(
      ft::Poly{ft::Rational(-1), ft::Rational(1), ft::Rational(1)},
      ft::Rational(3, 5), ft::Rational(2, 3));
  return f;
}

inline ft::FieldElement golden_r() { return ft::FieldElement::generator(golden_field()); }

inline ft::FieldElement fe(ft::FieldPtr f, long num, long den = 1) {
  return ft::FieldElement::from_rational(std::move(f), ft::Rational(num, den));
}

// Bernoulli convolution with contraction 1/golden-mean: S0 = rx, S1 = rx+1-r.
inline ft::IFS golden_ss(long p0num = 2, long p0den = 5) {
  auto f = golden_field();
  auto r = golden_r();
  auto one = ft::FieldElement::one(f);
  std::vector<ft::AffineMap> maps{
      ft::AffineMap(r, ft::FieldElement::zero(f)),
      ft::AffineMap(r, one - r),
  };
  auto p0 = fe(f, p0num, p0den);
  return ft::IFS(f, maps, {p0, one - p0});
}

// Same system with the second map oriented backwards: S0 = rx, R1 = 1-rx.
inline ft::IFS golden_sr(long p0num = 2, long p0den = 5) {
  auto f = golden_field();
  auto r = golden_r();
  auto one = ft::FieldElement::one(f);
  std::vector<ft::AffineMap> maps{
      ft::AffineMap(r, ft::FieldElement::zero(f)),
      ft::AffineMap(-r, one),
  };
  auto p0 = fe(f, p0num, p0den);
  return ft::IFS(f, maps, {p0, one - p0});
}

// The oriented system with p0 = r^2 exactly, the absolutely continuous case.
inline ft::IFS golden_sr_density() {
  auto f = golden_field();
  auto r = golden_r();
  auto one = ft::FieldElement::one(f);
  std::vector<ft::AffineMap> maps{
      ft::AffineMap(r, ft::FieldElement::zero(f)),
      ft::AffineMap(-r, one),
  };
  auto p0 = one - r;  // r^2
  return ft::IFS(f, maps, {p0, one - p0});
}

// Equicontractive overlap family x/2, x/2+1/4, x/2+1/2 with p0 = p2 = p.
inline ft::IFS halves_overlap(long pnum = 2, long pden = 5) {
  auto q = ft::make_rational_field();
  auto half = fe(q, 1, 2);
  std::vector<ft::AffineMap> maps{
      ft::AffineMap(half, fe(q, 0)),
      ft::AffineMap(half, fe(q, 1, 4)),
      ft::AffineMap(half, fe(q, 1, 2)),
  };
  auto p = fe(q, pnum, pden);
  auto mid = ft::FieldElement::one(q) - p - p;
  return ft::IFS(q, maps, {p, mid, p});
}

// Three maps of ratio 1/3 plus one of ratio 1/9 seated at 1/3.
inline ft::IFS third_ninth() {
  auto q = ft::make_rational_field();
  auto third = fe(q, 1, 3);
  auto ninth = fe(q, 1, 9);
  std::vector<ft::AffineMap> maps{
      ft::AffineMap(third, fe(q, 0)),
      ft::AffineMap(third, fe(q, 1, 3)),
      ft::AffineMap(third, fe(q, 2, 3)),
      ft::AffineMap(ninth, fe(q, 1, 3)),
  };
  auto quarter = fe(q, 1, 4);
  return ft::IFS(q, maps, {quarter, quarter, quarter, quarter});
}

// Exactly-touching thirds: x/3, x/3+1/3, x/3+2/3.
inline ft::IFS thirds(long anum = 2, long aden = 5, long bnum = 1, long bden = 5) {
  auto q = ft::make_rational_field();
  auto third = fe(q, 1, 3);
  std::vector<ft::AffineMap> maps{
      ft::AffineMap(third, fe(q, 0)),
      ft::AffineMap(third, fe(q, 1, 3)),
      ft::AffineMap(third, fe(q, 2, 3)),
  };
  auto a = fe(q, anum, aden);
  auto b = fe(q, bnum, bden);
  return ft::IFS(q, maps, {a, b, ft::FieldElement::one(q) - a - b});
}

// Middle-thirds gap system: x/3 and x/3 + 2/3.
inline ft::IFS cantor_thirds() {
  auto q = ft::make_rational_field();
  auto third = fe(q, 1, 3);
  std::vector<ft::AffineMap> maps{
      ft::AffineMap(third, fe(q, 0)),
      ft::AffineMap(third, fe(q, 2, 3)),
  };
  auto half = fe(q, 1, 2);
  return ft::IFS(q, maps, {half, half});
}

// Root path of length n whose net intervals contain x (interior points).
inline std::vector<int> path_containing(const ft::VectorGraph& g, const ft::FieldElement& x,
                                        int n) {
  std::vector<int> path{0};
  ft::NetInstance cur = ft::root_instance(g);
  for (int d = 0; d < n; ++d) {
    bool found = false;
    for (const auto& e : g.nodes[static_cast<size_t>(cur.node)].children) {
      auto child = ft::child_instance(g, cur, e);
      if ((child.lo - x).sign() <= 0 && (x - child.hi).sign() < 0) {
        cur = child;
        path.push_back(e.child);
        found = true;
        break;
      }
    }
    if (!found) throw std::runtime_error("point left the net-interval tiling");
  }
  return path;
}

// Deterministic random field elements with small coefficients.
inline ft::FieldElement random_element(std::mt19937& rng, const ft::FieldPtr& f) {
  std::uniform_int_distribution<long> num(-12, 12);
  std::uniform_int_distribution<long> den(1, 9);
  std::vector<ft::Rational> c;
  for (int i = 0; i < f->degree(); ++i) c.emplace_back(num(rng), den(rng));
  return ft::FieldElement(f, std::move(c));
}
