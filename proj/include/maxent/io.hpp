#pragma once

// JSON reading and writing for the library types.
//
//   distribution   {"outcomes": [string], "probs": [number]}
//   feature set    {"names": [string], "matrix": [[number]]}   (d rows, |X| columns)
//   constraints    {"kinds": ["eq"|"ge"|"le"], "targets": [number], "featureset": {...}}
//   histogram      {"counts": [integer]}
//   model          {"prior": {...}, "features": {...}, "lambda": [number]}
//   solver options {"moment_tol", "max_iter", "lambda_cap", "equiv_tol", "seed", "trace"}
//
// Non-finite reals are written as null. Readers raise InputError naming the
// offending field.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "maxent/boltzmann.hpp"
#include "maxent/core.hpp"
#include "maxent/expfam.hpp"
#include "maxent/identities.hpp"
#include "maxent/projection.hpp"
#include "maxent/report.hpp"
#include "maxent/sanov.hpp"

namespace maxent::io {

using json = nlohmann::ordered_json;

// Reading ------------------------------------------------------------------

inline json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(source + ": " + e.what());
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str(), path);
}

namespace detail {

inline const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) throw InputError(where + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw InputError(where + ": missing field '" + key + "'");
  return *it;
}

inline double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw InputError(where + ": expected a number");
  return v.get<double>();
}

inline std::vector<double> numbers(const json& v, const std::string& where) {
  if (!v.is_array()) throw InputError(where + ": expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

inline std::vector<std::string> strings(const json& v, const std::string& where) {
  if (!v.is_array()) throw InputError(where + ": expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_string()) throw InputError(where + "[" + std::to_string(i) + "]: expected a string");
    out.push_back(v[i].get<std::string>());
  }
  return out;
}

inline Eigen::VectorXd vector(const std::vector<double>& v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(Eigen::Index(i)) = v[i];
  return out;
}

inline json real(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline json reals(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(real(v(i)));
  return a;
}

}  // namespace detail

inline FiniteDistribution distribution_from_json(const json& j, const std::string& where = "distribution") {
  using namespace detail;
  auto outcomes = strings(field(j, "outcomes", where), where + ".outcomes");
  auto probs = numbers(field(j, "probs", where), where + ".probs");
  try {
    return FiniteDistribution(std::move(outcomes), std::move(probs));
  } catch (const std::exception& e) {
    throw InputError(where + ": " + e.what());
  }
}

inline FeatureSet featureset_from_json(const json& j, const std::string& where = "featureset") {
  using namespace detail;
  auto names = strings(field(j, "names", where), where + ".names");
  const json& m = field(j, "matrix", where);
  if (!m.is_array()) throw InputError(where + ".matrix: expected an array of rows");
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < m.size(); ++i) rows.push_back(numbers(m[i], where + ".matrix[" + std::to_string(i) + "]"));
  const std::size_t cols = rows.empty() ? std::size_t(0) : rows[0].size();
  Eigen::MatrixXd mat(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols)
      throw InputError(where + ".matrix[" + std::to_string(i) + "]: row length " + std::to_string(rows[i].size()) +
                       ", expected " + std::to_string(cols));
    for (std::size_t x = 0; x < cols; ++x) mat(Eigen::Index(i), Eigen::Index(x)) = rows[i][x];
  }
  if (rows.empty() && j.contains("alphabet_size")) {
    mat.resize(0, static_cast<Eigen::Index>(number(j["alphabet_size"], where + ".alphabet_size")));
  }
  try {
    return FeatureSet(std::move(names), std::move(mat));
  } catch (const std::exception& e) {
    throw InputError(where + ": " + e.what());
  }
}

inline ConstraintKind kind_from_string(const std::string& s, const std::string& where) {
  if (s == "eq") return ConstraintKind::Eq;
  if (s == "ge") return ConstraintKind::Ge;
  if (s == "le") return ConstraintKind::Le;
  throw InputError(where + ": unknown constraint kind '" + s + "' (expected eq, ge or le)");
}

inline ConstraintSet constraints_from_json(const json& j, const std::string& where = "constraints") {
  using namespace detail;
  FeatureSet f = featureset_from_json(field(j, "featureset", where), where + ".featureset");
  const auto kinds_s = strings(field(j, "kinds", where), where + ".kinds");
  std::vector<ConstraintKind> kinds;
  for (std::size_t i = 0; i < kinds_s.size(); ++i)
    kinds.push_back(kind_from_string(kinds_s[i], where + ".kinds[" + std::to_string(i) + "]"));
  const auto targets = numbers(field(j, "targets", where), where + ".targets");
  try {
    return ConstraintSet(std::move(f), std::move(kinds), vector(targets));
  } catch (const std::exception& e) {
    throw InputError(where + ": " + e.what());
  }
}

inline EmpiricalMeasure empirical_from_json(const json& j, const std::string& where = "empirical") {
  const json& c = detail::field(j, "counts", where);
  if (!c.is_array()) throw InputError(where + ".counts: expected an array of integers");
  std::vector<std::int64_t> counts;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!c[i].is_number_integer()) throw InputError(where + ".counts[" + std::to_string(i) + "]: expected an integer");
    counts.push_back(c[i].get<std::int64_t>());
  }
  try {
    return EmpiricalMeasure(std::move(counts));
  } catch (const std::exception& e) {
    throw InputError(where + ": " + e.what());
  }
}

inline ExpFamModel model_from_json(const json& j, const std::string& where = "model") {
  using namespace detail;
  auto prior = distribution_from_json(field(j, "prior", where), where + ".prior");
  auto f = featureset_from_json(field(j, "features", where), where + ".features");
  auto lambda = numbers(field(j, "lambda", where), where + ".lambda");
  try {
    return ExpFamModel(std::move(prior), std::move(f), vector(lambda));
  } catch (const std::exception& e) {
    throw InputError(where + ": " + e.what());
  }
}

/// Fields present in `j` override `base`.
inline SolverOptions solver_options_from_json(const json& j, SolverOptions base = {},
                                              const std::string& where = "solver") {
  using namespace detail;
  if (!j.is_object()) throw InputError(where + ": expected an object");
  for (const auto& [key, v] : j.items()) {
    const std::string w = where + "." + key;
    if (key == "moment_tol") base.moment_tol = number(v, w);
    else if (key == "max_iter") base.max_iter = int(number(v, w));
    else if (key == "lambda_cap") base.lambda_cap = number(v, w);
    else if (key == "equiv_tol") base.equiv_tol = number(v, w);
    else if (key == "seed") base.seed = std::uint64_t(number(v, w));
    else if (key == "trace") {
      if (!v.is_boolean()) throw InputError(w + ": expected true or false");
      base.trace = v.get<bool>();
    } else if (key == "gd_max_iter") base.gd_max_iter = int(number(v, w));
    else throw InputError(w + ": unknown solver option");
  }
  if (!(base.moment_tol > 0.0) || base.max_iter < 0 || !(base.lambda_cap > 0.0) || !(base.equiv_tol > 0.0))
    throw InputError(where + ": tolerances and caps must be positive");
  return base;
}

/// Newline-delimited outcome labels; blank lines and surrounding whitespace
/// are ignored.
inline std::vector<std::string> read_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    out.push_back(line.substr(b, e - b + 1));
  }
  return out;
}

// Writing ------------------------------------------------------------------

inline json to_json(const FiniteDistribution& p) {
  json probs = json::array();
  for (double x : p.probs()) probs.push_back(x);
  return json{{"outcomes", p.outcomes()}, {"probs", probs}};
}

inline json to_json(const FeatureSet& f) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < f.matrix().rows(); ++i) rows.push_back(detail::reals(f.matrix().row(i).transpose()));
  json j{{"names", f.names()}, {"matrix", rows}};
  if (f.dim() == 0) j["alphabet_size"] = f.alphabet_size();
  return j;
}

inline json to_json(const ConstraintSet& a) {
  json kinds = json::array();
  for (auto k : a.kinds()) kinds.push_back(to_string(k));
  return json{{"kinds", kinds}, {"targets", detail::reals(a.targets())}, {"featureset", to_json(a.features())}};
}

inline json to_json(const EmpiricalMeasure& m) {
  return json{{"counts", std::vector<std::int64_t>(m.counts().begin(), m.counts().end())}};
}

inline json to_json(const ExpFamModel& m) {
  return json{{"prior", to_json(m.prior())}, {"features", to_json(m.features())}, {"lambda", detail::reals(m.lambda())}};
}

inline json to_json(const SolverOptions& o) {
  return json{{"moment_tol", o.moment_tol}, {"max_iter", o.max_iter},     {"lambda_cap", o.lambda_cap},
              {"equiv_tol", o.equiv_tol},   {"seed", o.seed},             {"trace", o.trace},
              {"gd_max_iter", o.gd_max_iter}};
}

inline json to_json(const ProjectionResult& r) {
  using detail::real;
  using detail::reals;
  json j{{"status", to_string(r.status)},
         {"lambda_star", reals(r.lambda_star)},
         {"log_partition", real(r.model.log_partition())},
         {"min_divergence", real(r.min_divergence)},
         {"distribution", to_json(r.distribution())},
         {"mean_parameters", reals(mean_parameters(r.model))},
         {"moment_residual", reals(r.moment_residual)},
         {"iterations", r.iterations},
         {"support", r.support},
         {"active_set", r.active_set},
         {"constraints", to_json(r.constraints)}};
  if (!r.trace.empty()) {
    json t = json::array();
    for (const auto& e : r.trace)
      t.push_back({{"iteration", e.iteration}, {"objective", real(e.objective)}, {"grad_norm", real(e.grad_norm)},
                   {"step", real(e.step)}});
    j["trace"] = t;
  }
  return j;
}

inline json to_json(const FeasibilityReport& f) {
  json j{{"in_hull", f.in_hull}, {"on_boundary", f.on_boundary}, {"face", f.face}};
  if (f.witness) {
    j["witness"] = detail::reals(*f.witness);
    j["witness_margin"] = detail::real(f.witness_margin);
  }
  return j;
}

inline json to_json(const IdentityReport& r) {
  json terms = json::object();
  for (const auto& [k, v] : r.terms) terms[k] = detail::real(v);
  return json{{"name", r.name},
              {"lhs", detail::real(r.lhs)},
              {"rhs", detail::real(r.rhs)},
              {"residual", detail::real(r.residual)},
              {"tol", r.tol},
              {"pass", r.pass},
              {"check", to_string(r.kind)},
              {"mode", r.mode},
              {"terms", terms}};
}

inline json to_json(const InstanceDescriptor& d) {
  return json{{"seed", d.seed}, {"index", d.index}, {"alphabet_size", d.alphabet_size}, {"dim", d.dim},
              {"prior_mode", d.prior_mode}};
}

inline json to_json(const SanovReport& r) {
  using detail::real;
  json j{{"n", r.n},
         {"method", to_string(r.method)},
         {"log_prob", real(r.log_prob)},
         {"prob", real(r.prob())},
         {"rate", real(r.rate)},
         {"residual", real(r.residual)},
         {"divergence_to_product", real(r.divergence_to_product)},
         {"moment_excess", real(r.moment_excess)},
         {"closure", real(r.closure)},
         {"num_histograms_in_A", r.num_histograms_in_A},
         {"num_histograms", r.num_histograms},
         {"empty_event", r.empty_event},
         {"boundary", r.boundary},
         {"projection_status", to_string(r.star_status)},
         {"lambda_star", detail::reals(r.lambda_star)}};
  if (r.method == SanovMethod::MonteCarlo) {
    j["trials"] = r.trials;
    j["hits"] = r.hits;
    j["prob_low"] = real(r.prob_low);
    j["prob_high"] = real(r.prob_high);
    j["estimate_defined"] = r.estimate_defined;
    j["residual_estimated"] = r.residual_estimated;
  }
  return j;
}

inline json to_json(const ConditionalLaw& law) {
  return json{{"histograms", law.histograms}, {"masses", law.masses}};
}

/// Pretty-printed with a trailing newline.
inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace maxent::io
