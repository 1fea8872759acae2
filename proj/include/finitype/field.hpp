#pragma once

// Exact arithmetic in a real algebraic number field Q(rho), where rho is the
// unique real root of a user-supplied polynomial inside a user-supplied
// isolating interval. Elements are rational coefficient vectors in the power
// basis 1, rho, ..., rho^{d-1}, kept reduced modulo the minimal polynomial.
// Signs and numeric enclosures are obtained by interval evaluation over a
// refinable rational enclosure of rho; a symbolic zero test makes sign() a
// total, terminating function.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace finitype {

using Rational = mpq_class;

struct FieldError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// rational helpers
// ---------------------------------------------------------------------------

// Accepts "7", "-3", "3/5", "-124/1000". Throws FieldError on anything else.
inline Rational parse_rational(const std::string& s) {
  if (s.empty()) throw FieldError("empty rational literal");
  for (char c : s) {
    if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '/' || c == '-' || c == '+'))
      throw FieldError("bad rational literal: '" + s + "'");
  }
  mpq_class q;
  if (mpq_set_str(q.get_mpq_t(), s.c_str(), 10) != 0)
    throw FieldError("bad rational literal: '" + s + "'");
  if (q.get_den() == 0) throw FieldError("zero denominator in rational literal: '" + s + "'");
  q.canonicalize();
  return q;
}

inline std::string rational_str(const Rational& q) { return q.get_str(); }

inline Rational rat_pow(const Rational& base, unsigned long e) {
  Rational r;
  mpz_pow_ui(mpq_numref(r.get_mpq_t()), mpq_numref(base.get_mpq_t()), e);
  mpz_pow_ui(mpq_denref(r.get_mpq_t()), mpq_denref(base.get_mpq_t()), e);
  return r;
}

// Largest double <= q and smallest double >= q. Values handled here are far
// from the double range limits.
inline double to_double_down(const Rational& q) {
  double d = q.get_d();  // within 1 ulp of the truth
  while (mpq_class(d) > q) d = std::nextafter(d, -std::numeric_limits<double>::infinity());
  return d;
}
inline double to_double_up(const Rational& q) {
  double d = q.get_d();
  while (mpq_class(d) < q) d = std::nextafter(d, std::numeric_limits<double>::infinity());
  return d;
}

// ---------------------------------------------------------------------------
// rational intervals (exact endpoints)
// ---------------------------------------------------------------------------

struct RatInterval {
  Rational lo, hi;

  RatInterval() : lo(0), hi(0) {}
  RatInterval(Rational l, Rational h) : lo(std::move(l)), hi(std::move(h)) {
    if (lo > hi) throw FieldError("interval endpoints out of order");
  }
  static RatInterval point(const Rational& q) { return RatInterval(q, q); }

  Rational width() const { return hi - lo; }
  bool contains_zero() const { return sgn(lo) <= 0 && sgn(hi) >= 0; }

  RatInterval operator+(const RatInterval& o) const { return RatInterval(lo + o.lo, hi + o.hi); }
  RatInterval operator-(const RatInterval& o) const { return RatInterval(lo - o.hi, hi - o.lo); }
  RatInterval operator*(const RatInterval& o) const {
    Rational a = lo * o.lo, b = lo * o.hi, c = hi * o.lo, d = hi * o.hi;
    return RatInterval(std::min(std::min(a, b), std::min(c, d)),
                       std::max(std::max(a, b), std::max(c, d)));
  }
  RatInterval operator+(const Rational& q) const { return RatInterval(lo + q, hi + q); }
  RatInterval operator*(const Rational& q) const {
    if (sgn(q) >= 0) return RatInterval(lo * q, hi * q);
    return RatInterval(hi * q, lo * q);
  }
};

// ---------------------------------------------------------------------------
// double enclosures (outward-rounded)
// ---------------------------------------------------------------------------

struct Enclosure {
  double lo = 0.0, hi = 0.0;

  Enclosure() = default;
  Enclosure(double l, double h) : lo(l), hi(h) {
    if (!(lo <= hi)) throw FieldError("enclosure endpoints out of order");
  }
  static Enclosure point(double v) { return Enclosure(v, v); }
  static Enclosure of(const RatInterval& r) {
    return Enclosure(to_double_down(r.lo), to_double_up(r.hi));
  }

  double mid() const { return 0.5 * (lo + hi); }
  double width() const { return hi - lo; }
  double rel_width() const {
    double m = std::max(std::abs(lo), std::abs(hi));
    return m > 0 ? width() / m : width();
  }
  bool contains(double v) const { return lo <= v && v <= hi; }
};

namespace detail {
inline double nudge_down(double v) {
  for (int i = 0; i < 4; ++i) v = std::nextafter(v, -std::numeric_limits<double>::infinity());
  return v;
}
inline double nudge_up(double v) {
  for (int i = 0; i < 4; ++i) v = std::nextafter(v, std::numeric_limits<double>::infinity());
  return v;
}
}  // namespace detail

// Natural log of a positive enclosure. std::log is sub-ulp accurate on this
// platform; a 4-ulp outward nudge absorbs that.
inline Enclosure log_enclosure(const Enclosure& x) {
  if (!(x.lo > 0)) throw FieldError("log of enclosure touching zero");
  return Enclosure(detail::nudge_down(std::log(x.lo)), detail::nudge_up(std::log(x.hi)));
}

inline Enclosure add(const Enclosure& a, const Enclosure& b) {
  return Enclosure(detail::nudge_down(a.lo + b.lo), detail::nudge_up(a.hi + b.hi));
}
inline Enclosure sub(const Enclosure& a, const Enclosure& b) {
  return Enclosure(detail::nudge_down(a.lo - b.hi), detail::nudge_up(a.hi - b.lo));
}
inline Enclosure mul(const Enclosure& a, const Enclosure& b) {
  double p[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
  return Enclosure(detail::nudge_down(*std::min_element(p, p + 4)),
                   detail::nudge_up(*std::max_element(p, p + 4)));
}
// Division where the denominator does not straddle zero.
inline Enclosure div(const Enclosure& a, const Enclosure& b) {
  if (b.lo <= 0 && b.hi >= 0) throw FieldError("division by enclosure containing zero");
  double p[4] = {a.lo / b.lo, a.lo / b.hi, a.hi / b.lo, a.hi / b.hi};
  return Enclosure(detail::nudge_down(*std::min_element(p, p + 4)),
                   detail::nudge_up(*std::max_element(p, p + 4)));
}
inline Enclosure emin(const Enclosure& a, const Enclosure& b) {
  return Enclosure(std::min(a.lo, b.lo), std::min(a.hi, b.hi));
}
inline Enclosure emax(const Enclosure& a, const Enclosure& b) {
  return Enclosure(std::max(a.lo, b.lo), std::max(a.hi, b.hi));
}

// ---------------------------------------------------------------------------
// dense rational polynomials, low-degree-first
// ---------------------------------------------------------------------------

using Poly = std::vector<Rational>;

namespace poly {

inline void normalize(Poly& p) {
  while (!p.empty() && sgn(p.back()) == 0) p.pop_back();
}
inline int degree(const Poly& p) { return static_cast<int>(p.size()) - 1; }  // -1 for zero

inline Rational eval(const Poly& p, const Rational& x) {
  Rational acc = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
  return acc;
}

inline RatInterval eval_interval(const Poly& p, const RatInterval& x) {
  RatInterval acc = RatInterval::point(0);
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
  return acc;
}

inline Poly derivative(const Poly& p) {
  Poly d;
  for (size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * Rational(static_cast<long>(i)));
  normalize(d);
  return d;
}

// Remainder of a by b (b nonzero), plain rational long division.
inline Poly rem(Poly a, const Poly& b) {
  normalize(a);
  if (b.empty()) throw FieldError("polynomial division by zero");
  while (degree(a) >= degree(b)) {
    Rational f = a.back() / b.back();
    int shift = degree(a) - degree(b);
    for (size_t i = 0; i < b.size(); ++i) a[i + shift] -= f * b[i];
    a.pop_back();
    normalize(a);
  }
  return a;
}

inline Poly monic(Poly p) {
  normalize(p);
  if (p.empty()) return p;
  Rational lead = p.back();
  for (auto& c : p) c /= lead;
  return p;
}

inline Poly gcd(Poly a, Poly b) {
  normalize(a);
  normalize(b);
  while (!b.empty()) {
    Poly r = rem(a, b);
    a = std::move(b);
    b = monic(std::move(r));
  }
  return monic(std::move(a));
}

// Sturm chain of a squarefree polynomial.
inline std::vector<Poly> sturm_chain(const Poly& p) {
  std::vector<Poly> chain;
  chain.push_back(p);
  chain.push_back(derivative(p));
  normalize(chain.back());
  while (!chain.back().empty() && degree(chain.back()) > 0) {
    Poly r = rem(chain[chain.size() - 2], chain.back());
    for (auto& c : r) c = -c;
    normalize(r);
    if (r.empty()) break;
    chain.push_back(std::move(r));
  }
  return chain;
}

inline int sign_variations(const std::vector<Poly>& chain, const Rational& x) {
  int vars = 0, prev = 0;
  for (const auto& p : chain) {
    int s = sgn(eval(p, x));
    if (s == 0) continue;
    if (prev != 0 && s != prev) ++vars;
    prev = s;
  }
  return vars;
}

// Number of distinct real roots in (a, b], valid for squarefree p with
// p(a) != 0.
inline int count_roots(const std::vector<Poly>& chain, const Rational& a, const Rational& b) {
  return sign_variations(chain, a) - sign_variations(chain, b);
}

}  // namespace poly

// ---------------------------------------------------------------------------
// NumberField
// ---------------------------------------------------------------------------

class NumberField {
 public:
  // minpoly: low-degree-first rational coefficients, degree >= 1, leading
  // coefficient nonzero. (lo, hi): rational interval isolating exactly one
  // real root. Irreducibility is the caller's responsibility; a squarefree
  // check rejects the grossest violations.
  NumberField(Poly minpoly, Rational lo, Rational hi)
      : minpoly_(std::move(minpoly)), orig_lo_(lo), orig_hi_(hi), lo_(lo), hi_(hi) {
    for (auto& c : minpoly_) c.canonicalize();
    orig_lo_.canonicalize();
    orig_hi_.canonicalize();
    lo_.canonicalize();
    hi_.canonicalize();
    poly::normalize(minpoly_);
    if (poly::degree(minpoly_) < 1) throw FieldError("minpoly must have degree >= 1");
    if (lo_ >= hi_) throw FieldError("root interval must have lo < hi");
    Poly g = poly::gcd(minpoly_, poly::derivative(minpoly_));
    if (poly::degree(g) > 0) throw FieldError("minpoly is not squarefree");

    int slo = sgn(poly::eval(minpoly_, lo_));
    int shi = sgn(poly::eval(minpoly_, hi_));
    if (slo == 0 || shi == 0)
      throw FieldError("minpoly vanishes at a root-interval endpoint; shrink the interval");
    if (slo == shi)
      throw FieldError("minpoly has equal signs at the root-interval endpoints");
    sign_lo_ = slo;

    auto chain = poly::sturm_chain(minpoly_);
    int nroots = poly::count_roots(chain, lo_, hi_);
    if (nroots != 1)
      throw FieldError("root interval must isolate exactly one real root (found " +
                       std::to_string(nroots) + ")");

    // rho^d .. rho^{2d-2} in the power basis, for product reduction.
    int d = degree();
    Rational lead = minpoly_.back();
    std::vector<Rational> rho_d(d);
    for (int i = 0; i < d; ++i) rho_d[i] = -minpoly_[i] / lead;
    power_table_.push_back(rho_d);
    for (int k = d + 1; k <= 2 * d - 2; ++k) {
      const auto& prev = power_table_.back();
      std::vector<Rational> next(d, Rational(0));
      // next = rho * prev, reduced
      for (int i = 0; i < d - 1; ++i) next[i + 1] = prev[i];
      if (sgn(prev[d - 1]) != 0)
        for (int i = 0; i < d; ++i) next[i] += prev[d - 1] * rho_d[i];
      power_table_.push_back(std::move(next));
    }
  }

  int degree() const { return poly::degree(minpoly_); }
  const Poly& minpoly() const { return minpoly_; }
  const Rational& original_lo() const { return orig_lo_; }
  const Rational& original_hi() const { return orig_hi_; }
  const std::vector<std::vector<Rational>>& power_table() const { return power_table_; }

  bool same_field(const NumberField& o) const {
    return this == &o ||
           (minpoly_ == o.minpoly_ && orig_lo_ == o.orig_lo_ && orig_hi_ == o.orig_hi_);
  }

  RatInterval root_interval() const {
    std::lock_guard<std::mutex> g(mu_);
    return RatInterval(lo_, hi_);
  }

  // Bisect the cached root enclosure until its width is <= target.
  RatInterval refine_root(const Rational& target) const {
    std::lock_guard<std::mutex> g(mu_);
    int guard = 0;
    while (hi_ - lo_ > target) {
      Rational mid = (lo_ + hi_) / 2;
      int sm = sgn(poly::eval(minpoly_, mid));
      if (sm == 0) {  // rho is exactly rational
        lo_ = mid;
        hi_ = mid;
        break;
      }
      if (sm == sign_lo_)
        lo_ = mid;
      else
        hi_ = mid;
      if (++guard > 100000) throw FieldError("root refinement failed to converge");
    }
    return RatInterval(lo_, hi_);
  }

 private:
  Poly minpoly_;
  Rational orig_lo_, orig_hi_;
  std::vector<std::vector<Rational>> power_table_;
  int sign_lo_ = 0;

  mutable std::mutex mu_;
  mutable Rational lo_, hi_;
};

using FieldPtr = std::shared_ptr<const NumberField>;

inline FieldPtr make_field(Poly minpoly, Rational lo, Rational hi) {
  return std::make_shared<NumberField>(std::move(minpoly), std::move(lo), std::move(hi));
}

// The rationals, presented as Q(rho) with rho the root of x in [-1/2, 1/2].
inline FieldPtr make_rational_field() {
  return make_field(Poly{Rational(0), Rational(1)}, Rational(-1, 2), Rational(1, 2));
}

// ---------------------------------------------------------------------------
// FieldElement
// ---------------------------------------------------------------------------

class FieldElement {
 public:
  FieldElement() = default;  // invalid until assigned

  FieldElement(FieldPtr f, std::vector<Rational> coeffs) : field_(std::move(f)) {
    if (!field_) throw FieldError("field element without a field");
    size_t d = static_cast<size_t>(field_->degree());
    if (coeffs.size() > d) throw FieldError("coefficient vector longer than field degree");
    coeffs.resize(d, Rational(0));
    for (auto& c : coeffs) c.canonicalize();  // GMP comparisons assume canonical form
    coeffs_ = std::move(coeffs);
  }

  static FieldElement from_rational(FieldPtr f, const Rational& q) {
    return FieldElement(std::move(f), {q});
  }
  static FieldElement zero(FieldPtr f) { return from_rational(std::move(f), Rational(0)); }
  static FieldElement one(FieldPtr f) { return from_rational(std::move(f), Rational(1)); }
  // rho itself (for degree-1 fields this is the rational root).
  static FieldElement generator(FieldPtr f) {
    if (f->degree() == 1) {
      Rational root = -f->minpoly()[0] / f->minpoly()[1];
      return from_rational(std::move(f), root);
    }
    std::vector<Rational> c(static_cast<size_t>(f->degree()), Rational(0));
    c[1] = 1;
    return FieldElement(std::move(f), std::move(c));
  }

  bool valid() const { return static_cast<bool>(field_); }
  const FieldPtr& field() const { return field_; }
  const std::vector<Rational>& coeffs() const { return coeffs_; }

  bool is_zero() const {
    for (const auto& c : coeffs_)
      if (sgn(c) != 0) return false;
    return true;
  }
  bool is_rational() const {
    for (size_t i = 1; i < coeffs_.size(); ++i)
      if (sgn(coeffs_[i]) != 0) return false;
    return true;
  }
  const Rational& rational_value() const {
    if (!is_rational()) throw FieldError("element is not rational");
    return coeffs_[0];
  }

  friend FieldElement operator+(const FieldElement& a, const FieldElement& b) {
    a.check_same(b);
    std::vector<Rational> c(a.coeffs_);
    for (size_t i = 0; i < c.size(); ++i) c[i] += b.coeffs_[i];
    return FieldElement(a.field_, std::move(c));
  }
  friend FieldElement operator-(const FieldElement& a, const FieldElement& b) {
    a.check_same(b);
    std::vector<Rational> c(a.coeffs_);
    for (size_t i = 0; i < c.size(); ++i) c[i] -= b.coeffs_[i];
    return FieldElement(a.field_, std::move(c));
  }
  FieldElement operator-() const {
    std::vector<Rational> c(coeffs_);
    for (auto& x : c) x = -x;
    return FieldElement(field_, std::move(c));
  }
  friend FieldElement operator*(const FieldElement& a, const FieldElement& b) {
    a.check_same(b);
    size_t d = a.coeffs_.size();
    std::vector<Rational> prod(2 * d - 1, Rational(0));
    for (size_t i = 0; i < d; ++i) {
      if (sgn(a.coeffs_[i]) == 0) continue;
      for (size_t j = 0; j < d; ++j) {
        if (sgn(b.coeffs_[j]) == 0) continue;
        prod[i + j] += a.coeffs_[i] * b.coeffs_[j];
      }
    }
    // reduce powers rho^d .. rho^{2d-2}
    std::vector<Rational> c(prod.begin(), prod.begin() + d);
    const auto& table = a.field_->power_table();
    for (size_t k = d; k < prod.size(); ++k) {
      if (sgn(prod[k]) == 0) continue;
      const auto& row = table[k - d];
      for (size_t i = 0; i < d; ++i) c[i] += prod[k] * row[i];
    }
    return FieldElement(a.field_, std::move(c));
  }
  friend FieldElement operator/(const FieldElement& a, const FieldElement& b) {
    a.check_same(b);
    return a * b.inverse();
  }
  FieldElement& operator+=(const FieldElement& o) { return *this = *this + o; }
  FieldElement& operator-=(const FieldElement& o) { return *this = *this - o; }
  FieldElement& operator*=(const FieldElement& o) { return *this = *this * o; }
  FieldElement& operator/=(const FieldElement& o) { return *this = *this / o; }

  FieldElement inverse() const {
    if (is_zero()) throw FieldError("division by zero");
    if (is_rational()) return from_rational(field_, 1 / coeffs_[0]);
    // extended Euclid: u*self + v*minpoly = g, g constant when the minpoly is
    // irreducible (which the user asserted).
    Poly r0 = field_->minpoly();
    Poly r1(coeffs_);
    poly::normalize(r1);
    Poly u0{}, u1{Rational(1)};  // coefficients of self
    while (true) {
      poly::normalize(r1);
      if (r1.empty()) throw FieldError("minpoly is reducible: element has no inverse");
      if (poly::degree(r1) == 0) break;
      // r0 = q*r1 + r, u_next = u0 - q*u1
      Poly q;
      Poly r = r0;
      poly::normalize(r);
      q.assign(static_cast<size_t>(std::max(0, poly::degree(r) - poly::degree(r1) + 1)),
               Rational(0));
      while (poly::degree(r) >= poly::degree(r1)) {
        Rational f = r.back() / r1.back();
        int shift = poly::degree(r) - poly::degree(r1);
        q[static_cast<size_t>(shift)] = f;
        for (size_t i = 0; i < r1.size(); ++i) r[i + static_cast<size_t>(shift)] -= f * r1[i];
        r.pop_back();
        poly::normalize(r);
      }
      Poly u2 = u0;
      u2.resize(std::max(u2.size(), q.size() + u1.size()), Rational(0));
      for (size_t i = 0; i < q.size(); ++i)
        for (size_t j = 0; j < u1.size(); ++j) u2[i + j] -= q[i] * u1[j];
      poly::normalize(u2);
      r0 = std::move(r1);
      r1 = std::move(r);
      u0 = std::move(u1);
      u1 = std::move(u2);
    }
    Rational g = r1[0];
    std::vector<Rational> inv(u1.begin(), u1.end());
    for (auto& c : inv) c /= g;
    return FieldElement(field_, std::move(inv));
  }

  friend bool operator==(const FieldElement& a, const FieldElement& b) {
    a.check_same(b);
    return a.coeffs_ == b.coeffs_;
  }
  friend bool operator!=(const FieldElement& a, const FieldElement& b) { return !(a == b); }

  // Exact sign of the real number this element evaluates to at rho.
  int sign() const {
    if (is_zero()) return 0;
    if (is_rational()) return sgn(coeffs_[0]);
    RatInterval root = field_->root_interval();
    for (int round = 0; round < 256; ++round) {
      RatInterval v = poly::eval_interval(Poly(coeffs_.begin(), coeffs_.end()), root);
      if (sgn(v.lo) > 0) return 1;
      if (sgn(v.hi) < 0) return -1;
      root = field_->refine_root(root.width() / 16);
      if (sgn(root.width()) == 0) {
        // rational rho: exact evaluation settles it
        return sgn(poly::eval(Poly(coeffs_.begin(), coeffs_.end()), root.lo));
      }
    }
    throw FieldError("sign determination failed to converge");
  }

  // self < other etc. via exact sign of the difference.
  friend bool operator<(const FieldElement& a, const FieldElement& b) {
    return (a - b).sign() < 0;
  }
  friend bool operator<=(const FieldElement& a, const FieldElement& b) {
    return (a - b).sign() <= 0;
  }
  friend bool operator>(const FieldElement& a, const FieldElement& b) { return b < a; }
  friend bool operator>=(const FieldElement& a, const FieldElement& b) { return b <= a; }

  FieldElement abs() const { return sign() < 0 ? -*this : *this; }

  // Rational enclosure of width <= 2^(2-bits); hence also
  // <= 2^(2-bits) * max(1, |x|).
  RatInterval enclosure_rat(int bits = 53) const {
    if (bits < 16) throw FieldError("precision_bits must be >= 16");
    if (is_rational()) return RatInterval::point(coeffs_[0]);
    Rational target = Rational(1) / rat_pow(Rational(2), static_cast<unsigned long>(bits - 2));
    RatInterval root = field_->root_interval();
    Poly p(coeffs_.begin(), coeffs_.end());
    for (int round = 0; round < 256; ++round) {
      RatInterval v = poly::eval_interval(p, root);
      if (v.width() <= target) return v;
      if (sgn(root.width()) == 0) return v;  // rational rho, point interval
      root = field_->refine_root(root.width() / 16);
    }
    throw FieldError("enclosure refinement failed to converge");
  }

  Enclosure enclosure(int bits = 53) const { return Enclosure::of(enclosure_rat(bits)); }

  // Midpoint double approximation, for printing and heuristics only.
  double approx() const {
    Enclosure e = enclosure(64);
    return e.mid();
  }

  // Canonical text form "c0,c1,...".
  std::string str() const {
    std::string s;
    for (size_t i = 0; i < coeffs_.size(); ++i) {
      if (i) s += ',';
      s += coeffs_[i].get_str();
    }
    return s;
  }

 private:
  void check_same(const FieldElement& o) const {
    if (!field_ || !o.field_) throw FieldError("uninitialized field element");
    if (!field_->same_field(*o.field_)) throw FieldError("elements of different fields");
  }

  FieldPtr field_;
  std::vector<Rational> coeffs_;
};

inline FieldElement pow(const FieldElement& x, unsigned long e) {
  FieldElement acc = FieldElement::one(x.field());
  FieldElement base = x;
  while (e) {
    if (e & 1) acc = acc * base;
    base = base * base;
    e >>= 1;
  }
  return acc;
}

inline int compare(const FieldElement& a, const FieldElement& b) { return (a - b).sign(); }

}  // namespace finitype
