#pragma once

// JSON system descriptions: the number field, the affine maps, probability
// slots (exact values, one sweep parameter, one complement), and tool
// options. Rationals travel as "num/den" strings; field elements as
// low-degree-first coefficient lists.

#include <finitype/ifs.hpp>

#include <json.hpp>

#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace finitype {

struct SpecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SpecOptions {
  size_t max_vectors = 10000;
  int max_cycle_len = 6;
  double tolerance = 1e-12;
  int n_max = 4;
  int m_max = 4;
};

struct SpecFile {
  FieldPtr field;
  std::vector<AffineMap> maps;

  struct ProbSlot {
    enum Kind { Explicit, Param, OneMinusSum } kind = Explicit;
    FieldElement value;  // Explicit only
  };
  std::vector<ProbSlot> probs;
  SpecOptions options;

  bool has_param() const {
    for (const auto& s : probs)
      if (s.kind == ProbSlot::Param) return true;
    return false;
  }

  std::vector<FieldElement> resolve_probs(const std::optional<Rational>& param) const {
    std::vector<FieldElement> out(probs.size());
    int complement = -1;
    auto bound = FieldElement::zero(field);
    for (size_t i = 0; i < probs.size(); ++i) {
      switch (probs[i].kind) {
        case ProbSlot::Explicit:
          out[i] = probs[i].value;
          break;
        case ProbSlot::Param:
          if (!param) throw SpecError("spec has an unbound probability parameter; use sweep");
          out[i] = FieldElement::from_rational(field, *param);
          break;
        case ProbSlot::OneMinusSum:
          complement = static_cast<int>(i);
          continue;
      }
      bound += out[static_cast<size_t>(i)];
    }
    if (complement >= 0) out[static_cast<size_t>(complement)] = FieldElement::one(field) - bound;
    return out;
  }

  IFS instantiate(const std::optional<Rational>& param = std::nullopt) const {
    return IFS(field, maps, resolve_probs(param));
  }
};

namespace detail {

inline Rational json_rational(const nlohmann::json& j, const std::string& what) {
  if (!j.is_string()) throw SpecError(what + " must be a \"num/den\" string");
  return parse_rational(j.get<std::string>());
}

inline std::vector<Rational> json_coeffs(const nlohmann::json& j, const std::string& what) {
  std::vector<Rational> out;
  if (j.is_string()) {
    out.push_back(json_rational(j, what));
    return out;
  }
  if (!j.is_array() || j.empty())
    throw SpecError(what + " must be a nonempty array of \"num/den\" strings");
  for (const auto& c : j) out.push_back(json_rational(c, what));
  return out;
}

}  // namespace detail

inline SpecFile parse_spec(const nlohmann::json& j) {
  SpecFile spec;
  try {
    if (!j.contains("field") || !j.contains("maps") || !j.contains("probs"))
      throw SpecError("spec needs \"field\", \"maps\" and \"probs\"");
    const auto& jf = j.at("field");
    Poly minpoly = detail::json_coeffs(jf.at("minpoly"), "field.minpoly");
    const auto& ri = jf.at("root_interval");
    if (!ri.is_array() || ri.size() != 2)
      throw SpecError("field.root_interval must be [lo, hi]");
    spec.field = make_field(minpoly, detail::json_rational(ri[0], "root_interval lo"),
                            detail::json_rational(ri[1], "root_interval hi"));

    for (const auto& jm : j.at("maps")) {
      auto slope = FieldElement(spec.field, detail::json_coeffs(jm.at("r"), "map r"));
      auto off = FieldElement(spec.field, detail::json_coeffs(jm.at("d"), "map d"));
      spec.maps.emplace_back(std::move(slope), std::move(off));
    }

    int params = 0, complements = 0;
    for (const auto& jp : j.at("probs")) {
      SpecFile::ProbSlot slot;
      if (jp.is_string() && jp.get<std::string>() == "param") {
        slot.kind = SpecFile::ProbSlot::Param;
        ++params;
      } else if (jp.is_string() && jp.get<std::string>() == "one_minus_sum") {
        slot.kind = SpecFile::ProbSlot::OneMinusSum;
        ++complements;
      } else {
        slot.kind = SpecFile::ProbSlot::Explicit;
        slot.value = FieldElement(spec.field, detail::json_coeffs(jp, "probability"));
      }
      spec.probs.push_back(std::move(slot));
    }
    if (params > 1) throw SpecError("at most one \"param\" probability slot");
    if (complements > 1) throw SpecError("at most one \"one_minus_sum\" probability slot");
    if (params == 1 && complements == 0)
      throw SpecError("a \"param\" slot needs a \"one_minus_sum\" complement slot");
    if (spec.probs.size() != spec.maps.size())
      throw SpecError("number of probability slots must match number of maps");

    if (j.contains("options")) {
      const auto& jo = j.at("options");
      if (jo.contains("max_vectors")) spec.options.max_vectors = jo.at("max_vectors").get<size_t>();
      if (jo.contains("max_cycle_len"))
        spec.options.max_cycle_len = jo.at("max_cycle_len").get<int>();
      if (jo.contains("tolerance")) spec.options.tolerance = jo.at("tolerance").get<double>();
      if (jo.contains("n_max")) spec.options.n_max = jo.at("n_max").get<int>();
      if (jo.contains("m_max")) spec.options.m_max = jo.at("m_max").get<int>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(std::string("malformed spec: ") + e.what());
  } catch (const FieldError& e) {
    throw SpecError(std::string("invalid field data: ") + e.what());
  }
  return spec;
}

inline SpecFile load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot open spec file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(std::string("spec is not valid JSON: ") + e.what());
  }
  return parse_spec(j);
}

}  // namespace finitype
