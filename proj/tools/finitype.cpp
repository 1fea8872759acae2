// Command-line front end: validate and analyze finite-type systems, compute
// local dimensions at periodic points, bracket the essential dimension
// interval, sweep a probability parameter, list net intervals with exact
// masses, and run the regularity diagnostics.

#include <finitype/dimension.hpp>
#include <finitype/reports.hpp>
#include <finitype/specfile.hpp>

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

using namespace finitype;

namespace {

int precision_bits() {
  const char* env = std::getenv("FINITYPE_PRECISION_BITS");
  if (!env) return 128;
  int bits = std::atoi(env);
  return bits >= 16 ? bits : 128;
}

void emit_error(const std::string& kind, const std::string& message) {
  ojson err;
  err["error"] = kind;
  err["message"] = message;
  std::cout << err.dump() << "\n";
}

std::vector<int> parse_labels(const std::string& csv) {
  std::vector<int> out;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) return;
    int v = std::stoi(cur);
    if (v < 1) throw SpecError("vector labels are 1-based");
    out.push_back(v - 1);
    cur.clear();
  };
  for (char c : csv) {
    if (c == ',')
      flush();
    else if (!std::isspace(static_cast<unsigned char>(c)))
      cur.push_back(c);
  }
  flush();
  return out;
}

void write_or_print(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw SpecError("cannot write output file: " + path);
  out << text;
}

VectorGraph analyzed_graph(const SpecFile& spec) {
  auto ifs = spec.instantiate();
  auto g = build_vector_graph(ifs, spec.options.max_vectors);
  decompose(g);
  return g;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact multifractal analysis of finite-type self-similar measures on [0,1]"};
  app.require_subcommand(1);
  int bits = precision_bits();

  std::string spec_path, out_path, dot_path;
  std::string prefix_csv, cycle_csv, prefix2_csv, cycle2_csv;
  std::string from_str = "1/10", to_str = "2/5";
  int steps = 1, generation = 0, cycle_cap = 0, nmax = 0, mmax = 0;

  auto* validate = app.add_subcommand("validate", "check a system description");
  validate->add_option("spec", spec_path, "spec file")->required();

  auto* analyze = app.add_subcommand("analyze", "vectors, classes, regularity verdict");
  analyze->add_option("spec", spec_path, "spec file")->required();
  analyze->add_option("--dot", dot_path, "write the transition graph in DOT form");
  analyze->add_option("--out", out_path, "write the JSON report here instead of stdout");

  auto* dims = app.add_subcommand("dims", "local dimension at a periodic point");
  dims->add_option("spec", spec_path, "spec file")->required();
  dims->add_option("--prefix", prefix_csv, "root path, 1-based labels")->required();
  dims->add_option("--cycle", cycle_csv, "cycle, first = last label")->required();
  dims->add_option("--prefix2", prefix2_csv, "second representation prefix");
  dims->add_option("--cycle2", cycle2_csv, "second representation cycle");

  auto* bounds = app.add_subcommand("bounds", "bracket the essential dimension interval");
  bounds->add_option("spec", spec_path, "spec file")->required();
  bounds->add_option("--max-cycle-len", cycle_cap, "cycle length cap (default from spec)");
  bounds->add_option("--out", out_path, "write the JSON report here instead of stdout");

  auto* sweep = app.add_subcommand("sweep", "bracket across a probability parameter grid");
  sweep->add_option("spec", spec_path, "spec file with a \"param\" slot")->required();
  sweep->add_option("--from", from_str, "first grid value (rational)")->required();
  sweep->add_option("--to", to_str, "last grid value (rational)")->required();
  sweep->add_option("--steps", steps, "number of grid points")->required();
  sweep->add_option("--out", out_path, "CSV output path")->required();

  auto* measure = app.add_subcommand("measure", "net intervals of one generation with masses");
  measure->add_option("spec", spec_path, "spec file")->required();
  measure->add_option("--generation", generation, "generation to list")->required();
  measure->add_option("--out", out_path, "CSV output path (default stdout)");

  auto* regularity = app.add_subcommand("regularity", "sufficient criteria and diagnostics");
  regularity->add_option("spec", spec_path, "spec file")->required();
  regularity->add_option("--nmax", nmax, "edge-path depth (default from spec)");
  regularity->add_option("--mmax", mmax, "transition-ratio depth (default from spec)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) {
      auto spec = load_spec(spec_path);
      std::optional<Rational> probe;
      if (spec.has_param()) probe = Rational(1, 4);  // structural checks only
      auto ifs = spec.instantiate(probe);
      auto comm = ifs.commensurability_exponents(64);
      ojson rep;
      rep["ok"] = true;
      rep["degree"] = ifs.field()->degree();
      rep["map_count"] = ifs.map_count();
      rep["r_min"] = json_field_element(ifs.r_min(), bits);
      rep["hull"] = "[0,1]";
      rep["parametric"] = spec.has_param();
      rep["commensurable"] = comm.all_commensurate();
      ojson warnings = ojson::array();
      if (!comm.all_commensurate())
        warnings.push_back(
            "contraction ratios are not commensurate within the search bound: "
            "the system cannot be of finite type");
      rep["warnings"] = warnings;
      std::cout << rep.dump(2) << "\n";
      return 0;
    }

    if (*analyze) {
      auto spec = load_spec(spec_path);
      auto g = analyzed_graph(spec);
      auto pos = is_positive_type(g, essential_nodes(g), 32);
      auto reg = generalized_regular_sufficient(g.ifs);
      auto comm = g.ifs.commensurability_exponents(64);
      if (!dot_path.empty()) write_or_print(dot_graph(g), dot_path);
      write_or_print(analyze_report(g, pos, reg, comm).dump(2) + "\n", out_path);
      return 0;
    }

    if (*dims) {
      auto spec = load_spec(spec_path);
      auto g = analyzed_graph(spec);
      PeriodicPoint pt;
      pt.prefix = parse_labels(prefix_csv);
      pt.cycle = parse_labels(cycle_csv);
      if (prefix2_csv.empty() != cycle2_csv.empty())
        throw SpecError("--prefix2 and --cycle2 must be given together");
      if (!prefix2_csv.empty())
        pt.second = std::make_pair(parse_labels(prefix2_csv), parse_labels(cycle2_csv));
      std::cout << dims_report(g, pt, spec.options.tolerance, bits).dump(2) << "\n";
      return 0;
    }

    if (*bounds) {
      auto spec = load_spec(spec_path);
      auto g = analyzed_graph(spec);
      int cap = cycle_cap > 0 ? cycle_cap : spec.options.max_cycle_len;
      auto br = essential_bracket(g, cap, spec.options.tolerance, bits);
      auto ep = endpoint_dims(g, br, spec.options.tolerance, bits);
      write_or_print(bounds_report(br, ep).dump(2) + "\n", out_path);
      return 0;
    }

    if (*sweep) {
      auto spec = load_spec(spec_path);
      auto res = run_sweep(spec, parse_rational(from_str), parse_rational(to_str), steps, bits);
      for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
      write_or_print(sweep_csv(res), out_path);
      return 0;
    }

    if (*measure) {
      auto spec = load_spec(spec_path);
      if (generation < 0) throw SpecError("generation must be nonnegative");
      auto g = analyzed_graph(spec);
      write_or_print(measure_csv(g, generation, bits), out_path);
      return 0;
    }

    if (*regularity) {
      auto spec = load_spec(spec_path);
      auto g = analyzed_graph(spec);
      auto reg = generalized_regular_sufficient(g.ifs);
      int n = nmax > 0 ? nmax : spec.options.n_max;
      int m = mmax > 0 ? mmax : spec.options.m_max;
      auto rows = regularity_diagnostics(g, n, m);
      std::cout << regularity_report_json(reg, rows, bits).dump(2) << "\n";
      return 0;
    }
  } catch (const NotFiniteTypeError& e) {
    ojson err;
    err["error"] = "not_finite_type_evidence";
    err["message"] = e.what();
    err["vectors_found"] = e.vectors_found;
    std::cout << err.dump() << "\n";
    return 3;
  } catch (const ModelViolationError& e) {
    emit_error("model_violation", e.what());
    return 4;
  } catch (const std::exception& e) {
    emit_error("invalid_input", e.what());
    return 2;
  }
  return 0;
}
