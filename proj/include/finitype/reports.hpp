#pragma once

// Report assembly for the command-line tool: analysis summaries as ordered
// JSON, DOT export of the transition graph, the parameter sweep engine with
// its fixed CSV schema, and deterministic float formatting.

#include <finitype/dimension.hpp>
#include <finitype/specfile.hpp>

#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <sstream>
#include <string>

namespace finitype {

using ojson = nlohmann::ordered_json;

// Shortest round-trip decimal representation, capped at 15 significant
// digits. Deterministic for a given value.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, res.ptr);
  int digits = 0;
  for (char c : s) {
    if (c == 'e' || c == 'E') break;
    if (std::isdigit(static_cast<unsigned char>(c))) ++digits;
  }
  if (digits > 15) {
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    s = buf;
  }
  return s;
}

inline ojson json_field_element(const FieldElement& x, int bits = 64) {
  ojson out;
  ojson coeffs = ojson::array();
  for (const auto& c : x.coeffs()) coeffs.push_back(c.get_str());
  out["coeffs"] = coeffs;
  out["approx"] = x.enclosure(bits).mid();
  return out;
}

inline ojson json_enclosure(const Enclosure& e) {
  ojson out;
  out["value"] = e.mid();
  out["lo"] = e.lo;
  out["hi"] = e.hi;
  out["width"] = e.width();
  return out;
}

inline std::string node_label(int id) { return std::to_string(id + 1); }

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

inline ojson analyze_report(const VectorGraph& g, const PositiveTypeResult& pos,
                            const RegularityReport& reg,
                            const IFS::Commensurability& comm) {
  ojson rep;
  rep["vector_count"] = g.nodes.size();
  rep["reduced_vector_count"] = g.reduced_count;

  ojson vectors = ojson::array();
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    const auto& n = g.nodes[i];
    ojson v;
    v["id"] = i + 1;
    v["length"] = json_field_element(n.red.length);
    ojson nbs = ojson::array();
    for (const auto& nb : n.red.nbs) {
      ojson e;
      e["a"] = json_field_element(nb.a);
      e["L"] = json_field_element(nb.L);
      nbs.push_back(e);
    }
    v["neighbours"] = nbs;
    v["sibling"] = n.sibling;
    v["reduced_id"] = n.reduced_id + 1;
    ojson kids = ojson::array();
    for (const auto& e : n.children) kids.push_back(e.child + 1);
    v["children"] = kids;
    vectors.push_back(v);
  }
  rep["vectors"] = vectors;

  std::string children_compact;
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    if (i) children_compact += "; ";
    children_compact += node_label(static_cast<int>(i)) + "->";
    for (size_t k = 0; k < g.nodes[i].children.size(); ++k) {
      if (k) children_compact += ",";
      children_compact += node_label(g.nodes[i].children[k].child);
    }
  }
  rep["children_compact"] = children_compact;

  ojson reduced = ojson::array();
  for (size_t rid = 0; rid < g.reduced_count; ++rid) {
    ojson rrow;
    rrow["id"] = rid + 1;
    rrow["length"] = json_field_element(g.reduced_lengths[rid]);
    std::string s;
    for (size_t k = 0; k < g.reduced_children[rid].size(); ++k) {
      if (k) s += ",";
      s += std::to_string(g.reduced_children[rid][k] + 1);
    }
    rrow["children"] = s;
    reduced.push_back(rrow);
  }
  rep["reduced_vectors"] = reduced;

  ojson classes = ojson::array();
  for (const auto& cls : g.loop_classes) {
    ojson c = ojson::array();
    for (int v : cls) c.push_back(v + 1);
    classes.push_back(c);
  }
  rep["loop_classes"] = classes;
  ojson ess = ojson::array();
  for (int v : essential_nodes(g)) ess.push_back(v + 1);
  rep["essential_class"] = ess;

  ojson positive;
  positive["status"] = pos.positive ? "positive" : "unknown";
  if (pos.positive) {
    ojson w = ojson::array();
    for (int v : pos.witness) w.push_back(v + 1);
    positive["witness"] = w;
  }
  rep["positive_type"] = positive;

  ojson regj;
  regj["verdict"] = reg.verdict == RegVerdict::Holds ? "sufficient_condition_holds"
                    : reg.verdict == RegVerdict::Fails ? "sufficient_condition_fails"
                                                       : "inapplicable";
  regj["sign_case"] = reg.sign_case;
  ojson ratios = ojson::array();
  for (size_t j = 0; j < reg.ratios.size(); ++j) {
    ojson rr = json_enclosure(reg.ratios[j]);
    if (reg.exact_ratios[j]) rr["exact"] = reg.exact_ratios[j]->get_str();
    ratios.push_back(rr);
  }
  regj["ratios"] = ratios;
  if (!reg.note.empty()) regj["note"] = reg.note;
  rep["regularity"] = regj;

  ojson cj;
  cj["all_commensurate"] = comm.all_commensurate();
  ojson exps = ojson::array();
  for (const auto& e : comm.exponents) {
    if (e)
      exps.push_back(std::to_string(e->b) + "/" + std::to_string(e->c));
    else
      exps.push_back(nullptr);
  }
  cj["exponents"] = exps;
  rep["commensurability"] = cj;
  return rep;
}

// ---------------------------------------------------------------------------
// DOT export
// ---------------------------------------------------------------------------

inline std::string dot_graph(const VectorGraph& g) {
  std::ostringstream out;
  out << "digraph transition {\n  rankdir=LR;\n  node [shape=ellipse];\n";
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    const auto& n = g.nodes[i];
    bool essential = g.decomposed() && in_essential_class(g, static_cast<int>(i));
    out << "  v" << i + 1 << " [label=\"" << i + 1 << ":("
        << format_double(n.red.length.enclosure(64).mid()) << "," << n.red.nbs.size() << ","
        << n.sibling << ")\"";
    if (essential) out << ", style=filled, fillcolor=lightgrey, peripheries=2";
    out << "];\n";
  }
  for (size_t i = 0; i < g.nodes.size(); ++i)
    for (const auto& e : g.nodes[i].children)
      out << "  v" << i + 1 << " -> v" << e.child + 1 << " [label=\"" << e.matrix.rows() << "x"
          << e.matrix.cols() << "\"];\n";
  out << "}\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// dims / bounds
// ---------------------------------------------------------------------------

inline ojson dims_report(const VectorGraph& g, const PeriodicPoint& pt, double tol, int bits) {
  ojson rep;
  auto d = periodic_dim(g, pt, tol, bits);
  rep["dimension"] = json_enclosure(d);
  rep["cycle_length"] = pt.cycle.size() - 1;
  auto t = path_matrix(g, pt.cycle);
  rep["spectral_radius"] = json_enclosure(spectral_radius(t, tol, 400, bits));
  rep["fixed_point"] = json_field_element(periodic_fixed_point(g, pt.prefix, pt.cycle));
  rep["two_representations"] = pt.second.has_value();
  return rep;
}

struct EndpointDims {
  Enclosure dim0, dim1;
  bool isolated0 = false, isolated1 = false;
};

inline EndpointDims endpoint_dims(const VectorGraph& g, const DimensionBracket& br, double tol,
                                  int bits) {
  EndpointDims out;
  out.dim0 = periodic_dim(g, endpoint_point(g, true), tol, bits);
  out.dim1 = periodic_dim(g, endpoint_point(g, false), tol, bits);
  // flag only when the enclosures prove separation from the bracket hull
  auto isolated = [&](const Enclosure& d) {
    return d.lo > br.b_hi.hi || d.hi < br.a_lo.lo;
  };
  out.isolated0 = isolated(out.dim0);
  out.isolated1 = isolated(out.dim1);
  return out;
}

inline ojson bounds_report(const DimensionBracket& br, const EndpointDims& ep) {
  ojson rep;
  rep["a_lo"] = json_enclosure(br.a_lo);
  rep["a_hi"] = json_enclosure(br.a_hi);
  rep["b_lo"] = json_enclosure(br.b_lo);
  rep["b_hi"] = json_enclosure(br.b_hi);
  rep["cycle_length_used"] = br.cycle_length_used;
  rep["degenerate"] = br.degenerate;
  auto cyclej = [](const CycleSample& c) {
    ojson o;
    ojson path = ojson::array();
    for (int v : c.cycle) path.push_back(v + 1);
    o["cycle"] = path;
    o["dimension"] = json_enclosure(c.dim);
    return o;
  };
  rep["a_witness"] = cyclej(br.a_witness);
  rep["b_witness"] = cyclej(br.b_witness);
  rep["dim0"] = json_enclosure(ep.dim0);
  rep["dim1"] = json_enclosure(ep.dim1);
  rep["isolated0"] = ep.isolated0;
  rep["isolated1"] = ep.isolated1;
  return rep;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

struct SweepRow {
  Rational param;
  Enclosure a_lo, a_hi, b_lo, b_hi;
  Enclosure dim0, dim1;
  bool isolated0 = false, isolated1 = false;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<std::string> warnings;
};

inline SweepResult run_sweep(const SpecFile& spec, const Rational& from, const Rational& to,
                             int steps, int bits = 128) {
  if (!spec.has_param()) throw SpecError("sweep needs a spec with a \"param\" probability slot");
  if (steps < 1) throw SpecError("steps must be >= 1");
  SweepResult out;
  for (int i = 0; i < steps; ++i) {
    Rational p = steps == 1 ? from
                            : from + (to - from) * Rational(i) / Rational(steps - 1);
    p.canonicalize();
    try {
      auto ifs = spec.instantiate(p);
      auto g = build_vector_graph(ifs, spec.options.max_vectors);
      decompose(g);
      auto br = essential_bracket(g, spec.options.max_cycle_len, spec.options.tolerance, bits);
      auto ep = endpoint_dims(g, br, spec.options.tolerance, bits);
      out.rows.push_back(SweepRow{p, br.a_lo, br.a_hi, br.b_lo, br.b_hi, ep.dim0, ep.dim1,
                                  ep.isolated0, ep.isolated1});
    } catch (const std::exception& e) {
      out.warnings.push_back("param " + p.get_str() + " skipped: " + e.what());
    }
  }
  return out;
}

inline std::string sweep_csv(const SweepResult& res) {
  std::string csv = "param,a_lo,a_hi,b_lo,b_hi,dim0,dim1,isolated0,isolated1\n";
  for (const auto& row : res.rows) {
    csv += format_double(Enclosure::of(RatInterval::point(row.param)).mid());
    csv += ',';
    csv += format_double(row.a_lo.mid());
    csv += ',';
    csv += format_double(row.a_hi.mid());
    csv += ',';
    csv += format_double(row.b_lo.mid());
    csv += ',';
    csv += format_double(row.b_hi.mid());
    csv += ',';
    csv += format_double(row.dim0.mid());
    csv += ',';
    csv += format_double(row.dim1.mid());
    csv += ',';
    csv += row.isolated0 ? "true" : "false";
    csv += ',';
    csv += row.isolated1 ? "true" : "false";
    csv += '\n';
  }
  return csv;
}

// ---------------------------------------------------------------------------
// measure
// ---------------------------------------------------------------------------

// Exact coefficient vectors use ';' between coefficients so they stay inside
// one CSV cell.
inline std::string exact_cell(const FieldElement& x) {
  std::string s = x.str();
  for (auto& c : s)
    if (c == ',') c = ';';
  return s;
}

inline std::string measure_csv(const VectorGraph& g, int generation, int bits = 64) {
  std::string csv = "index,vector,lo_exact,hi_exact,lo,hi,mass_exact,mass\n";
  auto level = generation_instances(g, generation);
  for (size_t i = 0; i < level.size(); ++i) {
    const auto& inst = level[i];
    auto mass = inst.total();
    csv += std::to_string(i) + ',';
    csv += node_label(inst.node) + ',';
    csv += exact_cell(inst.lo) + ',';
    csv += exact_cell(inst.hi) + ',';
    csv += format_double(inst.lo.enclosure(bits).mid()) + ',';
    csv += format_double(inst.hi.enclosure(bits).mid()) + ',';
    csv += exact_cell(mass) + ',';
    csv += format_double(mass.enclosure(bits).mid());
    csv += '\n';
  }
  return csv;
}

// ---------------------------------------------------------------------------
// regularity command
// ---------------------------------------------------------------------------

inline ojson regularity_report_json(const RegularityReport& reg,
                                    const std::vector<DiagnosticsRow>& rows, int bits = 64) {
  ojson rep;
  rep["verdict"] = reg.verdict == RegVerdict::Holds ? "sufficient_condition_holds"
                   : reg.verdict == RegVerdict::Fails ? "sufficient_condition_fails"
                                                      : "inapplicable";
  rep["sign_case"] = reg.sign_case;
  ojson ratios = ojson::array();
  for (size_t j = 0; j < reg.ratios.size(); ++j) {
    ojson rr = json_enclosure(reg.ratios[j]);
    if (reg.exact_ratios[j]) rr["exact"] = reg.exact_ratios[j]->get_str();
    ratios.push_back(rr);
  }
  rep["ratios"] = ratios;
  if (!reg.note.empty()) rep["note"] = reg.note;
  ojson diag = ojson::array();
  for (const auto& row : rows) {
    ojson d;
    d["n"] = row.n;
    d["gamma_max"] = json_field_element(row.gamma_max, bits);
    d["r_hat"] = json_field_element(row.r_hat, bits);
    d["b_hat"] = json_field_element(row.b_hat, bits);
    diag.push_back(d);
  }
  rep["diagnostics"] = diag;
  rep["semantics"] =
      "r_hat is the least ratio observed within the search depth, an upper bound on the "
      "true infimum; b_hat is therefore a lower bound";
  return rep;
}

}  // namespace finitype
