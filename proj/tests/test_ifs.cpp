#include <catch2/catch.hpp>

#include <finitype/ifs.hpp>

#include "helpers.hpp"
#include "oracles.hpp"

using namespace finitype;

TEST_CASE("composition of words") {
  auto ss = golden_ss();
  auto f = ss.field();
  auto r = golden_r();
  auto one = FieldElement::one(f);

  SECTION("single letter") {
    auto m = ss.compose({1});
    CHECK(m.slope == r);
    CHECK(m.offset == one - r);
  }
  SECTION("empty word is the identity") {
    auto m = ss.compose({});
    CHECK(m.slope == one);
    CHECK(m.offset.is_zero());
  }
  SECTION("oriented system, word (1,1)") {
    auto sr = golden_sr();
    auto m = sr.compose({1, 1});
    CHECK(m.slope == r * r);
    CHECK(m.offset == one - r);
  }
  SECTION("letter out of range") {
    CHECK_THROWS_AS(ss.compose({0, 7}), IfsError);
  }
}

TEST_CASE("composition is a homomorphism on random word pairs") {
  auto sys = third_ninth();
  std::mt19937 rng(99);
  std::uniform_int_distribution<int> len(0, 6), letter(0, 3);
  for (int i = 0; i < 100; ++i) {
    Word w1, w2;
    for (int j = len(rng); j > 0; --j) w1.push_back(letter(rng));
    for (int j = len(rng); j > 0; --j) w2.push_back(letter(rng));
    Word cat = w1;
    cat.insert(cat.end(), w2.begin(), w2.end());
    REQUIRE(sys.compose(cat) == sys.compose(w1).compose(sys.compose(w2)));
  }
}

TEST_CASE("generation word sets") {
  SECTION("equicontractive systems have all words of length n") {
    auto ss = golden_ss();
    for (int n = 0; n <= 4; ++n) {
      auto words = ss.generation_words(n);
      CHECK(words.size() == (n == 0 ? 1u : (1u << n)));
      for (const auto& w : words) CHECK(w.size() == static_cast<size_t>(n));
    }
  }
  SECTION("generation 0 is the empty word") {
    auto words = third_ninth().generation_words(0);
    REQUIRE(words.size() == 1);
    CHECK(words[0].empty());
  }
  SECTION("matches the brute-force filtration") {
    auto tn = third_ninth();
    for (int n = 1; n <= 2; ++n) REQUIRE(tn.generation_words(n) == oracle::lambda(tn, n));
    auto ss = golden_ss();
    for (int n = 1; n <= 4; ++n) REQUIRE(ss.generation_words(n) == oracle::lambda(ss, n));
  }
  SECTION("mixed-ratio words join the generation exact comparisons dictate") {
    // slopes r and r^2: r_min = r^2, and the mixed word (0,1) has
    // |r_sigma| = r^3 <= r^2 while its parent still exceeds r^2.
    auto f = golden_field();
    auto r = golden_r();
    auto one = FieldElement::one(f);
    IFS sys(f, {AffineMap(r, FieldElement::zero(f)), AffineMap(r * r, one - r * r)},
            {fe(f, 1, 2), fe(f, 1, 2)});
    auto l1 = sys.generation_words(1);
    CHECK(std::find(l1.begin(), l1.end(), Word{0, 1}) != l1.end());
    REQUIRE(l1 == oracle::lambda(sys, 1));
    REQUIRE(sys.generation_words(3) == oracle::lambda(sys, 3));
  }
}

TEST_CASE("generation words obey the pinching inequalities") {
  auto tn = third_ninth();
  for (int n = 1; n <= 3; ++n) {
    auto upper = tn.r_min_pow(n);
    auto lower = tn.r_min_pow(n + 1);
    for (const auto& w : tn.generation_words(n)) {
      auto a = tn.compose(w).slope.abs();
      REQUIRE((a - upper).sign() <= 0);
      REQUIRE((a - lower).sign() >= 0);
    }
  }
}

namespace {
// Union of basic intervals as a sorted merged list of [lo,hi] pairs.
std::vector<std::pair<FieldElement, FieldElement>> merged_cover(const IFS& ifs, int n) {
  std::vector<std::pair<FieldElement, FieldElement>> iv;
  for (const auto& w : ifs.generation_words(n)) {
    auto m = ifs.compose(w);
    iv.emplace_back(m.image_min(), m.image_max());
  }
  std::sort(iv.begin(), iv.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<FieldElement, FieldElement>> merged;
  for (auto& p : iv) {
    if (!merged.empty() && p.first <= merged.back().second) {
      if (merged.back().second < p.second) merged.back().second = p.second;
    } else {
      merged.push_back(p);
    }
  }
  return merged;
}
}  // namespace

TEST_CASE("covers shrink monotonically with the generation") {
  for (auto sys : {cantor_thirds(), golden_ss()}) {
    for (int n = 0; n <= 3; ++n) {
      auto outer = merged_cover(sys, n);
      for (const auto& w : sys.generation_words(n + 1)) {
        auto m = sys.compose(w);
        bool inside = false;
        for (const auto& seg : outer)
          if (seg.first <= m.image_min() && m.image_max() <= seg.second) {
            inside = true;
            break;
          }
        REQUIRE(inside);
      }
    }
  }
}

TEST_CASE("commensurability exponents") {
  SECTION("equal ratios give q = 1") {
    auto res = golden_ss().commensurability_exponents(8);
    REQUIRE(res.all_commensurate());
    for (const auto& e : res.exponents) {
      CHECK(e->b == 1);
      CHECK(e->c == 1);
    }
  }
  SECTION("ratio 1/3 against r_min = 1/9 gives q = 2") {
    auto res = third_ninth().commensurability_exponents(8);
    REQUIRE(res.all_commensurate());
    CHECK(res.exponents[0]->b == 2);
    CHECK(res.exponents[0]->c == 1);
    CHECK(res.exponents[3]->b == 1);
    CHECK(res.exponents[3]->c == 1);
  }
  SECTION("1/2 and 1/3 admit no relation") {
    auto q = make_rational_field();
    IFS sys(q, {AffineMap(fe(q, 1, 2), fe(q, 0)), AffineMap(fe(q, 1, 3), fe(q, 2, 3))},
            {fe(q, 1, 2), fe(q, 1, 2)});
    auto res = sys.commensurability_exponents(64);
    CHECK_FALSE(res.all_commensurate());
    CHECK_FALSE(res.exponents[0].has_value());
    CHECK(res.exponents[1].has_value());
  }
}

TEST_CASE("IFS validation") {
  auto q = make_rational_field();
  auto half = fe(q, 1, 2);
  std::vector<AffineMap> maps{AffineMap(half, fe(q, 0)), AffineMap(half, half)};

  SECTION("probabilities must sum to 1") {
    CHECK_THROWS_WITH(IFS(q, maps, {fe(q, 1, 2), fe(q, 49, 100)}),
                      Catch::Contains("sum to 1"));
  }
  SECTION("probabilities must be positive") {
    CHECK_THROWS_AS(IFS(q, maps, {fe(q, 3, 2), fe(q, -1, 2)}), IfsError);
  }
  SECTION("contraction factors strictly inside (0,1)") {
    CHECK_THROWS_AS(IFS(q, {AffineMap(fe(q, 1), fe(q, 0)), AffineMap(half, half)},
                        {half, half}),
                    IfsError);
    CHECK_THROWS_AS(IFS(q, {AffineMap(fe(q, 0), fe(q, 0)), AffineMap(half, half)},
                        {half, half}),
                    IfsError);
  }
  SECTION("hull must be the unit interval") {
    CHECK_THROWS_WITH(IFS(q, {AffineMap(half, fe(q, 0)), AffineMap(half, fe(q, 1, 4))},
                          {half, half}),
                      Catch::Contains("hull"));
  }
  SECTION("negative ratios are accepted") {
    CHECK_NOTHROW(golden_sr());
  }
}
