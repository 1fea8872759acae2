#pragma once

// Iterated function systems of affine contractions on [0,1] with exact
// field-element data: word composition, the generation sets Lambda_n grouping
// basic intervals of comparable length, and the commensurability check that
// finite type forces on the contraction factors.

#include <finitype/field.hpp>

#include <optional>
#include <utility>
#include <vector>

namespace finitype {

struct IfsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Word = std::vector<int>;

struct AffineMap {
  FieldElement slope;   // r
  FieldElement offset;  // image of 0

  AffineMap() = default;
  AffineMap(FieldElement r, FieldElement t) : slope(std::move(r)), offset(std::move(t)) {}

  static AffineMap identity(const FieldPtr& f) {
    return AffineMap(FieldElement::one(f), FieldElement::zero(f));
  }

  FieldElement operator()(const FieldElement& x) const { return slope * x + offset; }

  // this after other: (this o other)(x) = this(other(x))
  AffineMap compose(const AffineMap& other) const {
    return AffineMap(slope * other.slope, slope * other.offset + offset);
  }

  FieldElement at0() const { return offset; }
  FieldElement at1() const { return slope + offset; }
  FieldElement image_min() const { return slope.sign() >= 0 ? at0() : at1(); }
  FieldElement image_max() const { return slope.sign() >= 0 ? at1() : at0(); }

  bool operator==(const AffineMap& o) const { return slope == o.slope && offset == o.offset; }
};

class IFS {
 public:
  IFS(FieldPtr field, std::vector<AffineMap> maps, std::vector<FieldElement> probs)
      : field_(std::move(field)), maps_(std::move(maps)), probs_(std::move(probs)) {
    if (maps_.size() < 2) throw IfsError("an IFS needs at least two maps");
    if (probs_.size() != maps_.size())
      throw IfsError("number of probabilities must match number of maps");

    auto one = FieldElement::one(field_);
    for (const auto& m : maps_) {
      auto a = m.slope.abs();
      if (a.sign() <= 0 || (a - one).sign() >= 0)
        throw IfsError("every contraction factor must satisfy 0 < |r| < 1");
    }
    auto psum = FieldElement::zero(field_);
    for (const auto& p : probs_) {
      if (p.sign() <= 0) throw IfsError("probabilities must be positive");
      psum += p;
    }
    if (!(psum == one)) throw IfsError("probabilities must sum to 1");

    auto lo = maps_[0].image_min();
    auto hi = maps_[0].image_max();
    for (size_t j = 1; j < maps_.size(); ++j) {
      auto l = maps_[j].image_min();
      auto h = maps_[j].image_max();
      if (l < lo) lo = l;
      if (h > hi) hi = h;
    }
    if (!lo.is_zero() || !(hi == one))
      throw IfsError("attractor hull must be [0,1]: rescale the translations");

    r_min_ = maps_[0].slope.abs();
    for (size_t j = 1; j < maps_.size(); ++j) {
      auto a = maps_[j].slope.abs();
      if (a < r_min_) r_min_ = a;
    }
  }

  const FieldPtr& field() const { return field_; }
  size_t map_count() const { return maps_.size(); }
  const AffineMap& map(size_t j) const { return maps_.at(j); }
  const FieldElement& prob(size_t j) const { return probs_.at(j); }
  const std::vector<AffineMap>& maps() const { return maps_; }
  const std::vector<FieldElement>& probs() const { return probs_; }
  const FieldElement& r_min() const { return r_min_; }
  FieldElement r_min_pow(int n) const { return pow(r_min_, static_cast<unsigned long>(n)); }

  AffineMap compose(const Word& w) const {
    AffineMap acc = AffineMap::identity(field_);
    for (int letter : w) {
      if (letter < 0 || static_cast<size_t>(letter) >= maps_.size())
        throw IfsError("word letter out of range");
      acc = acc.compose(maps_[static_cast<size_t>(letter)]);
    }
    return acc;
  }

  FieldElement word_prob(const Word& w) const {
    auto p = FieldElement::one(field_);
    for (int letter : w) p *= prob(static_cast<size_t>(letter));
    return p;
  }

  // All words sigma with |r_sigma| <= r_min^n < |r_{sigma-}|, in lexicographic
  // order. Generation 0 is the empty word alone.
  std::vector<Word> generation_words(int n) const {
    if (n < 0) throw IfsError("generation must be nonnegative");
    return relative_generation_words(FieldElement::one(field_), n);
  }

  // Words tau with |scale * r_tau| <= r_min^gen < |scale * r_{tau-}|, for a
  // positive scale. When scale <= r_min^gen already, the empty word is the
  // unique answer.
  std::vector<Word> relative_generation_words(const FieldElement& scale, int gen) const {
    if (scale.sign() <= 0) throw IfsError("scale must be positive");
    FieldElement threshold = r_min_pow(gen);
    std::vector<Word> out;
    if ((scale - threshold).sign() <= 0) {
      out.push_back({});
      return out;
    }
    Word w;
    dfs_words(scale, threshold, w, out);
    return out;
  }

  struct Commensurability {
    // |r_j|^b = r_min^c exactly; q_j = b/c.
    struct Exponent {
      unsigned long b = 0, c = 0;
    };
    std::vector<std::optional<Exponent>> exponents;
    bool all_commensurate() const {
      for (const auto& e : exponents)
        if (!e) return false;
      return true;
    }
  };

  // Bounded search for rationals q_j = b/c with |r_j|^b = r_min^c. A map with
  // no relation inside the bound gets nullopt: evidence against finite type,
  // reported rather than thrown.
  Commensurability commensurability_exponents(unsigned long search_bound) const {
    if (search_bound < 1) throw IfsError("search bound must be >= 1");
    Commensurability res;
    std::vector<FieldElement> rmin_pows{FieldElement::one(field_)};
    for (unsigned long c = 1; c <= search_bound; ++c) rmin_pows.push_back(rmin_pows.back() * r_min_);
    for (const auto& m : maps_) {
      auto rj = m.slope.abs();
      std::optional<Commensurability::Exponent> found;
      for (unsigned long c = 1; c <= search_bound && !found; ++c) {
        auto rjb = rj;
        for (unsigned long b = 1; b <= search_bound; ++b) {
          if (rjb == rmin_pows[c]) {
            found = Commensurability::Exponent{b, c};
            break;
          }
          rjb *= rj;
        }
      }
      res.exponents.push_back(found);
    }
    return res;
  }

 private:
  void dfs_words(const FieldElement& scale, const FieldElement& threshold, Word& w,
                 std::vector<Word>& out) const {
    for (int letter = 0; letter < static_cast<int>(maps_.size()); ++letter) {
      FieldElement next = scale * maps_[static_cast<size_t>(letter)].slope.abs();
      w.push_back(letter);
      if ((next - threshold).sign() <= 0)
        out.push_back(w);
      else
        dfs_words(next, threshold, w, out);
      w.pop_back();
    }
  }

  FieldPtr field_;
  std::vector<AffineMap> maps_;
  std::vector<FieldElement> probs_;
  FieldElement r_min_;
};

}  // namespace finitype
