#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "eigenform/errors.hpp"
#include "eigenform/forms.hpp"
#include "eigenform/geometry.hpp"
#include "eigenform/renorm.hpp"
#include "eigenform/solver.hpp"
#include "eigenform/triples.hpp"

namespace eigenform {

// ordered_json keeps keys in insertion order, which is what makes the
// serializers below canonical; doubles print as shortest round-trip decimals,
// and non-finite values print as null.
using ojson = nlohmann::ordered_json;

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path);
  out << content;
}

inline ojson parse_json(const std::string& text, const std::string& what) {
  try {
    return ojson::parse(text);
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(what + ": " + ex.what());
  }
}

inline ojson triple_to_json(const FractalTriple& t) {
  ojson j;
  j["n_boundary"] = t.n_boundary;
  j["n_total"] = t.n_total;
  j["cells"] = t.cell_maps;
  if (!t.labels.empty()) j["labels"] = t.labels;
  return j;
}

inline FractalTriple triple_from_json(const ojson& j) {
  try {
    FractalTriple t;
    t.n_boundary = j.at("n_boundary").get<int>();
    t.n_total = j.at("n_total").get<int>();
    t.cell_maps = j.at("cells").get<std::vector<std::vector<int>>>();
    if (j.contains("labels"))
      t.labels = j.at("labels").get<std::vector<std::string>>();
    return t;
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("triple: ") + ex.what());
  }
}

inline ojson form_to_json(const DirichletForm& e) {
  ojson j;
  j["n_boundary"] = e.n_boundary;
  j["coeffs"] = std::vector<double>(e.coeffs.data(),
                                    e.coeffs.data() + e.coeffs.size());
  return j;
}

inline DirichletForm form_from_json(const ojson& j) {
  try {
    const int n = j.at("n_boundary").get<int>();
    const auto c = j.at("coeffs").get<std::vector<double>>();
    return make_form(n, c);
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("form: ") + ex.what());
  }
}

// Triples are addressed either by file path or by "builtin:<name>", which
// keeps committed outputs free of machine-specific paths.
inline FractalTriple load_triple(const std::string& spec) {
  constexpr std::string_view prefix = "builtin:";
  if (spec.rfind(prefix, 0) == 0) return builtin(spec.substr(prefix.size()));
  return triple_from_json(parse_json(read_text(spec), spec));
}

inline DirichletForm load_form(const std::string& path) {
  return form_from_json(parse_json(read_text(path), path));
}

inline ojson json_of(const ValidationReport& r) {
  ojson j;
  j["pass"] = r.pass;
  j["failures"] = ojson::array();
  for (const auto& f : r.failures)
    j["failures"].push_back({{"condition", f.condition},
                             {"witness", f.witness}});
  return j;
}

inline ojson json_of(const TrajectoryPoint& p) {
  return {{"scale", p.scale}, {"min_coefficient", p.min_coefficient}};
}

inline ojson json_of(const EigenformResult& r) {
  ojson j;
  j["status"] = status_name(r.status);
  j["eigenvalue"] = r.eigenvalue;
  j["residual"] = r.residual;  // null when infinite
  j["iterations"] = r.iterations;
  j["min_coefficient"] = r.min_coefficient;
  j["form"] = form_to_json(r.form);
  j["trajectory"] = ojson::array();
  for (const auto& p : r.trajectory) j["trajectory"].push_back(json_of(p));
  return j;
}

inline ojson json_of(const BoundaryClass& b) {
  ojson j;
  j["stratum"] = stratum_name(b.stratum);
  j["components"] = b.components;
  j["image_norm"] = b.image_norm;
  j["min_coefficient"] = b.min_coefficient;
  return j;
}

inline ojson json_of(const VerifyReport& v) {
  ojson j;
  j["kind"] = form_kind_name(v.kind);
  j["rho"] = v.rho;
  j["residual"] = v.residual;
  j["reducible"] = v.reducible;
  j["lambda_coeffs"] = std::vector<double>(
      v.lambda_coeffs.data(), v.lambda_coeffs.data() + v.lambda_coeffs.size());
  j["ratios"] = ojson::array();
  for (int d = 0; d < v.ratios.size(); ++d)
    j["ratios"].push_back(v.ratios(d));  // NaN becomes null
  return j;
}

inline ojson json_of(const RepulsingReport& r) {
  ojson j;
  j["rho"] = r.rho;
  j["mu"] = r.mu;  // null when every non-constant direction is infeasible
  j["infeasible_directions"] = r.infeasible_directions;
  j["repulsing_nonstrict"] = r.repulsing_nonstrict;
  j["repulsing_strict"] = r.repulsing_strict;
  return j;
}

inline ojson json_of(const ProbeReport& p) {
  ojson j;
  j["hits"] = p.hits;
  j["samples"] = p.samples;
  if (p.any_valid)
    j["worst_t"] = p.worst_t;
  else
    j["worst_t"] = nullptr;
  j["degenerate_images"] = p.degenerate_images;
  j["seed"] = p.seed;
  return j;
}

inline ojson json_of(const ExistenceReport& r) {
  ojson j;
  j["outcome"] = r.outcome;
  j["narrative"] = r.narrative;
  j["solve"] = json_of(r.solve);
  j["limit"] = r.limit ? form_to_json(*r.limit) : ojson(nullptr);
  j["limit_verify"] = r.limit_verify ? json_of(*r.limit_verify) : ojson(nullptr);
  j["limit_class"] = r.limit_class ? json_of(*r.limit_class) : ojson(nullptr);
  j["limit_repulsing"] =
      r.limit_repulsing ? json_of(*r.limit_repulsing) : ojson(nullptr);
  return j;
}

inline std::string dump_line(const ojson& j) { return j.dump() + "\n"; }

}  // namespace eigenform
