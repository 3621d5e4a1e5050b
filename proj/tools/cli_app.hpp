#pragma once

// The maxent command-line front end. run_cli() is the whole program; main()
// only forwards argv and the standard streams.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "maxent/io.hpp"
#include "maxent/maxent.hpp"

namespace maxent::cli {

using io::json;

enum ExitCode : int { kOk = 0, kFailure = 1, kInputError = 2, kInfeasible = 3, kBoundary = 4, kIdentityFailure = 5 };

/// Everything a run depends on. Paths are kept as given.
struct RunConfig {
  std::string command;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::string output;

  std::string prior_path;
  std::string constraints_path;
  std::string features_path;
  std::string samples_path;
  std::string empirical_path;
  std::string data_path;
  std::string model_path;
  std::string variational_path;
  std::string nested_path;
  std::string curve_output;
  SolverOptions solver;

  // entropy-approx
  std::size_t alphabet_size = 1000;
  std::vector<std::int64_t> n_grid{5000, 10000, 20000, 40000};
  std::size_t trials = 20;
  std::string prior_mode = "dirichlet1";
  std::string zero_policy = "occupied";

  // diagnose
  bool random = false;
  std::size_t instances = 100;

  // sanov
  std::int64_t n = 10;
  std::vector<std::int64_t> curve;
  bool monte_carlo = false;
  std::uint64_t mc_trials = 1000000;
  double cap = 2e6;
};

/// The configuration echoed into reports. Thread count and output location
/// are left out so that reports do not depend on them.
inline json to_json(const RunConfig& c) {
  json j{{"command", c.command}, {"seed", c.seed}};
  auto put = [&](const char* k, const std::string& v) {
    if (!v.empty()) j[k] = v;
  };
  if (c.command == "entropy-approx") {
    j["alphabet_size"] = c.alphabet_size;
    j["n_grid"] = c.n_grid;
    j["trials"] = c.trials;
    j["prior_mode"] = c.prior_mode;
    j["zero_policy"] = c.zero_policy;
    return j;
  }
  put("prior", c.prior_path);
  put("constraints", c.constraints_path);
  put("features", c.features_path);
  put("samples", c.samples_path);
  put("empirical", c.empirical_path);
  put("data", c.data_path);
  put("model", c.model_path);
  put("variational", c.variational_path);
  put("nested", c.nested_path);
  j["solver"] = io::to_json(c.solver);
  if (c.command == "diagnose") {
    j["random"] = c.random;
    j["instances"] = c.instances;
  }
  if (c.command == "sanov") {
    j["n"] = c.n;
    if (!c.curve.empty()) j["curve"] = c.curve;
    j["monte_carlo"] = c.monte_carlo;
    if (c.monte_carlo) j["trials"] = c.mc_trials;
    j["cap"] = c.cap;
  }
  return j;
}

/// "a,b,c" or "a..b" (a doubled until it passes b).
inline std::vector<std::int64_t> parse_int_list(const std::string& s) {
  std::vector<std::int64_t> out;
  auto to_int = [&](const std::string& t) {
    std::size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(t, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != t.size()) throw InputError("bad integer '" + t + "' in list '" + s + "'");
    return std::int64_t(v);
  };
  if (auto dots = s.find(".."); dots != std::string::npos) {
    const auto lo = to_int(s.substr(0, dots)), hi = to_int(s.substr(dots + 2));
    if (lo < 1 || hi < lo) throw InputError("bad range '" + s + "'");
    for (auto v = lo; v <= hi; v *= 2) out.push_back(v);
    return out;
  }
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_int(item));
  if (out.empty()) throw InputError("empty list");
  return out;
}

/// Writes to `path` through a temporary file and a rename, or to `out` when
/// the path is empty.
inline void write_output(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty()) {
    out << content;
    return;
  }
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw InputError("cannot write '" + tmp.string() + "'");
    f << content;
    f.flush();
    if (!f) {
      f.close();
      std::filesystem::remove(tmp);
      throw InputError("write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw InputError("cannot move output into '" + path + "': " + ec.message());
  }
}

namespace detail {

/// Flag value if given, else config-file value if present, else the default
/// already in `dst`.
template <class T>
void pick(T& dst, const std::optional<T>& flag, const json& config, const char* key) {
  if (flag) {
    dst = *flag;
    return;
  }
  if (!config.contains(key)) return;
  try {
    dst = config.at(key).get<T>();
  } catch (const std::exception& e) {
    throw InputError(std::string("config field '") + key + "': " + e.what());
  }
}

inline void pick_list(std::vector<std::int64_t>& dst, const std::optional<std::string>& flag, const json& config,
                      const char* key) {
  if (flag) {
    dst = parse_int_list(*flag);
    return;
  }
  if (!config.contains(key)) return;
  const json& v = config.at(key);
  if (v.is_string()) dst = parse_int_list(v.get<std::string>());
  else if (v.is_array()) {
    dst.clear();
    for (const auto& e : v) {
      if (!e.is_number_integer()) throw InputError(std::string("config field '") + key + "': expected integers");
      dst.push_back(e.get<std::int64_t>());
    }
  } else {
    throw InputError(std::string("config field '") + key + "': expected a list");
  }
}

inline FiniteDistribution load_prior_or_uniform(const RunConfig& c, std::size_t alphabet_size) {
  if (!c.prior_path.empty()) return io::distribution_from_json(io::read_json_file(c.prior_path), c.prior_path);
  return FiniteDistribution::uniform(alphabet_size);
}

inline ConstraintSet load_constraints(const RunConfig& c, const char* flag = "--constraints") {
  if (c.constraints_path.empty()) throw InputError(std::string(flag) + " is required");
  return io::constraints_from_json(io::read_json_file(c.constraints_path), c.constraints_path);
}

/// A d = 0 constraint file carries no alphabet; take the prior's.
inline ConstraintSet fit_alphabet(ConstraintSet a, std::size_t alphabet_size) {
  if (a.size() == 0 && a.alphabet_size() != alphabet_size) return ConstraintSet::unconstrained(alphabet_size);
  if (a.alphabet_size() != alphabet_size)
    throw InputError("constraints cover " + std::to_string(a.alphabet_size()) + " outcomes, the prior has " +
                     std::to_string(alphabet_size));
  return a;
}

inline int exit_for(ProjectionStatus s) {
  switch (s) {
    case ProjectionStatus::Converged: return kOk;
    case ProjectionStatus::Infeasible: return kInfeasible;
    case ProjectionStatus::BoundaryNonattained: return kBoundary;
    case ProjectionStatus::NotConverged: return kFailure;
  }
  return kFailure;
}

inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const double pos = q * double(v.size() - 1);
  const auto lo = std::size_t(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - double(lo)) * (v[hi] - v[lo]);
}

}  // namespace detail

// Commands -----------------------------------------------------------------

inline int cmd_entropy_approx(const RunConfig& c, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg;
  cfg.alphabet_size = c.alphabet_size;
  cfg.n_grid = c.n_grid;
  cfg.trials = c.trials;
  cfg.seed = c.seed;
  cfg.threads = c.threads;
  if (c.prior_mode == "dirichlet1") cfg.prior_mode = PriorMode::Dirichlet1;
  else if (c.prior_mode == "orthant") cfg.prior_mode = PriorMode::UniformOrthant;
  else throw InputError("--prior must be dirichlet1 or orthant, got '" + c.prior_mode + "'");
  if (c.zero_policy == "occupied") cfg.zero_policy = ZeroCountPolicy::Occupied;
  else if (c.zero_policy == "skip") cfg.zero_policy = ZeroCountPolicy::Skip;
  else throw InputError("--zero-policy must be occupied or skip, got '" + c.zero_policy + "'");

  const auto rows = entropy_approx_experiment(cfg);
  std::ostringstream csv;
  write_experiment_csv(csv, rows);
  write_output(c.output, csv.str(), out);

  err << "      n   rows  |err0| q10/q50/q90               |err1| q10/q50/q90               first better\n";
  for (const auto& s : summarize(rows)) {
    std::vector<double> e0, e1;
    for (const auto& r : rows) {
      if (r.n != s.n) continue;
      e0.push_back(std::abs(r.err_zeroth));
      if (!r.skipped_first) e1.push_back(std::abs(r.err_first));
    }
    char line[256];
    std::snprintf(line, sizeof line, "%7lld %6zu  %.3e %.3e %.3e    %.3e %.3e %.3e    %zu/%zu\n",
                  static_cast<long long>(s.n), s.rows, detail::quantile(e0, 0.1), detail::quantile(e0, 0.5),
                  detail::quantile(e0, 0.9), detail::quantile(e1, 0.1), detail::quantile(e1, 0.5),
                  detail::quantile(e1, 0.9), s.first_better, s.first_rows);
    err << line;
  }
  return kOk;
}

inline int cmd_project(const RunConfig& c, std::ostream& out, std::ostream&) {
  ConstraintSet a = detail::load_constraints(c);
  const FiniteDistribution prior = detail::load_prior_or_uniform(c, a.alphabet_size());
  a = detail::fit_alphabet(std::move(a), prior.size());
  const auto feas = check_feasibility(prior, a);
  const ProjectionResult r = project_inequality(prior, a, c.solver);
  json j{{"run", to_json(c)}, {"feasibility", io::to_json(feas)}, {"result", io::to_json(r)}};
  write_output(c.output, io::dump(j), out);
  return detail::exit_for(r.status);
}

inline int cmd_fit(const RunConfig& c, std::ostream& out, std::ostream&) {
  if (c.features_path.empty()) throw InputError("--features is required");
  const FeatureSet f = io::featureset_from_json(io::read_json_file(c.features_path), c.features_path);
  const FiniteDistribution prior = detail::load_prior_or_uniform(c, f.alphabet_size());
  if (f.alphabet_size() != prior.size())
    throw InputError("features cover " + std::to_string(f.alphabet_size()) + " outcomes, the prior has " +
                     std::to_string(prior.size()));
  if (c.samples_path.empty() == c.empirical_path.empty())
    throw InputError("exactly one of --samples and --empirical is required");
  const EmpiricalMeasure emp =
      !c.samples_path.empty()
          ? EmpiricalMeasure::from_samples(io::read_samples(c.samples_path), prior.outcomes())
          : io::empirical_from_json(io::read_json_file(c.empirical_path), c.empirical_path);
  if (emp.size() != prior.size()) throw InputError("histogram size does not match the alphabet");
  const FiniteDistribution data = emp.to_distribution(prior.outcomes());
  const Eigen::VectorXd alpha = moments(data, f);
  const ProjectionResult proj = project(prior, ConstraintSet::equalities(f, alpha), c.solver);
  const ProjectionResult fit = fit_log_loss(prior, f, data, c.solver);
  const bool boundary =
      proj.status == ProjectionStatus::BoundaryNonattained || fit.status == ProjectionStatus::BoundaryNonattained;
  json j{{"run", to_json(c)},
         {"empirical", io::to_json(emp)},
         {"alpha", io::detail::reals(alpha)},
         {"boundary", boundary},
         {"total_variation", io::detail::real(total_variation(proj.distribution(), fit.distribution()))},
         {"project", io::to_json(proj)},
         {"fit_log_loss", io::to_json(fit)}};
  write_output(c.output, io::dump(j), out);
  if (boundary) return kBoundary;
  if (proj.status != ProjectionStatus::Converged) return detail::exit_for(proj.status);
  return detail::exit_for(fit.status);
}

inline void render_table(const std::vector<SuiteEntry>& entries, std::ostream& err) {
  for (const auto& e : entries) {
    for (const auto& r : e.reports) {
      char line[256];
      std::snprintf(line, sizeof line, "%4zu  %-28s %-4s residual % .3e  tol %.1e\n", e.descriptor.index,
                    r.name.c_str(), r.pass ? "ok" : "FAIL", r.residual, r.tol);
      err << line;
    }
  }
}

inline int cmd_diagnose(const RunConfig& c, std::ostream& out, std::ostream& err) {
  std::vector<SuiteEntry> entries;
  if (c.random) {
    if (c.instances < 1) throw InputError("--instances must be >= 1");
    entries = identity_suite(c.seed, c.instances, c.threads, c.solver);
  } else {
    ConstraintSet a = detail::load_constraints(c);
    const FiniteDistribution prior = detail::load_prior_or_uniform(c, a.alphabet_size());
    a = detail::fit_alphabet(std::move(a), prior.size());
    if (c.data_path.empty() || c.model_path.empty()) throw InputError("--data and --model are required without --random");
    const auto data = io::distribution_from_json(io::read_json_file(c.data_path), c.data_path);
    const auto model = io::model_from_json(io::read_json_file(c.model_path), c.model_path);
    const ProjectionResult star = project_inequality(prior, a, c.solver);
    if (!star.solved()) throw InputError("the constraint set has no solved projection (" + std::string(to_string(star.status)) + ")");
    SuiteEntry e{{c.seed, 0, prior.size(), a.size(), prior.is_uniform() ? "uniform" : "custom"}, {}};
    try {
      e.reports.push_back(pythagorean(data, star, model));
      if (star.model.same_family(model)) e.reports.push_back(robustness(data, star.model, model));
      e.reports.push_back(approximation_error_entropy(data, star));
      e.reports.push_back(pretend_data_identity(data, star, model));
    } catch (const DomainError& ex) {
      throw InputError(ex.what());
    } catch (const ShapeError& ex) {
      throw InputError(ex.what());
    }
    e.reports.push_back(free_energy_regret(data, model));
    e.reports.push_back(heat_capacity_sign(model));
    e.reports.push_back(fisher_finite_difference(model));
    if (!c.variational_path.empty()) {
      const auto v = io::model_from_json(io::read_json_file(c.variational_path), c.variational_path);
      const auto bg = bogoliubov(model, v);
      e.reports.push_back(bg.upper);
      e.reports.push_back(bg.lower);
    }
    entries.push_back(std::move(e));
  }
  json list = json::array();
  std::size_t failures = 0;
  for (const auto& e : entries) {
    json reps = json::array();
    for (const auto& r : e.reports) {
      reps.push_back(io::to_json(r));
      failures += !r.pass;
    }
    list.push_back({{"instance", io::to_json(e.descriptor)}, {"pass", e.pass()}, {"reports", reps}});
  }
  json j{{"run", to_json(c)}, {"failures", failures}, {"instances", list}};
  write_output(c.output, io::dump(j), out);
  render_table(entries, err);
  if (failures) {
    err << failures << " identity check(s) failed:\n";
    for (const auto& e : entries)
      for (const auto& r : e.reports)
        if (!r.pass) err << "  instance " << e.descriptor.index << ": " << r.name << "\n";
    return kIdentityFailure;
  }
  return kOk;
}

inline int cmd_sanov(const RunConfig& c, std::ostream& out, std::ostream&) {
  ConstraintSet a = detail::load_constraints(c);
  const FiniteDistribution p = detail::load_prior_or_uniform(c, a.alphabet_size());
  a = detail::fit_alphabet(std::move(a), p.size());
  SanovOptions so;
  so.cap = c.cap;
  so.threads = c.threads;
  so.solver = c.solver;
  bool ok = true;
  json j{{"run", to_json(c)}};

  const SanovReport rep =
      c.monte_carlo ? monte_carlo_event(p, a, c.n, c.mc_trials, c.seed, so) : enumerate_event(p, a, c.n, so);
  j["report"] = io::to_json(rep);
  if (rep.star_status == ProjectionStatus::Infeasible) {
    write_output(c.output, io::dump(j), out);
    return kInfeasible;
  }
  if (rep.method == SanovMethod::ExactEnumeration && !rep.empty_event) {
    const auto closure = make_report("sanov_identity", rep.closure, 0.0, 1e-10);
    ok = ok && closure.pass;
    json bounds = json::array();
    bounds.push_back(io::to_json(closure));
    const ProjectionResult star = project_inequality(p, a, c.solver);
    if (p.is_uniform()) {
      const auto b = entropy_multiplicity_bound(star, rep);
      ok = ok && b.pass;
      bounds.push_back(io::to_json(b));
    }
    const auto d = data_approximates_family(star, p, rep);
    bounds.push_back(io::to_json(d));
    j["checks"] = bounds;
  }
  if (!c.curve.empty()) {
    const auto curve = gibbs_conditioning_curve(p, a, c.curve, so);
    json arr = json::array();
    for (const auto& r : curve) arr.push_back(io::to_json(r));
    j["curve"] = arr;
    if (!c.curve_output.empty()) {
      std::ostringstream csv;
      write_curve_csv(csv, curve);
      write_output(c.curve_output, csv.str(), out);
    }
  }
  if (!c.nested_path.empty()) {
    ConstraintSet b = io::constraints_from_json(io::read_json_file(c.nested_path), c.nested_path);
    b = detail::fit_alphabet(std::move(b), p.size());
    const auto nr = nested_relative_probability(p, a, b, c.n, so);
    ok = ok && nr.pass;
    j["nested"] = io::to_json(nr);
  }
  write_output(c.output, io::dump(j), out);
  return ok ? kOk : kIdentityFailure;
}

// Argument handling ----------------------------------------------------------

struct Flags {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::optional<std::string> output, config;
  std::optional<std::string> prior, constraints, features, samples, empirical, data, model, variational, nested,
      curve_output;
  std::optional<double> moment_tol, lambda_cap, equiv_tol, cap;
  std::optional<int> max_iter;
  bool trace = false;
  std::optional<std::size_t> alphabet_size, trials, instances;
  std::optional<std::string> n_grid, prior_mode, zero_policy, curve;
  std::optional<std::int64_t> n;
  std::optional<std::uint64_t> mc_trials;
  bool random = false, monte_carlo = false;
};

inline RunConfig resolve(const std::string& command, const Flags& f) {
  RunConfig c;
  c.command = command;
  json cfg = json::object();
  if (f.config) {
    cfg = io::read_json_file(*f.config);
    if (!cfg.is_object()) throw InputError(*f.config + ": expected a JSON object");
  }
  using detail::pick;
  pick(c.seed, f.seed, cfg, "seed");
  pick(c.threads, f.threads, cfg, "threads");
  pick(c.output, f.output, cfg, "output");
  pick(c.prior_path, f.prior, cfg, "prior");
  pick(c.constraints_path, f.constraints, cfg, "constraints");
  pick(c.features_path, f.features, cfg, "features");
  pick(c.samples_path, f.samples, cfg, "samples");
  pick(c.empirical_path, f.empirical, cfg, "empirical");
  pick(c.data_path, f.data, cfg, "data");
  pick(c.model_path, f.model, cfg, "model");
  pick(c.variational_path, f.variational, cfg, "variational");
  pick(c.nested_path, f.nested, cfg, "nested");
  pick(c.curve_output, f.curve_output, cfg, "curve_output");

  if (cfg.contains("solver")) c.solver = io::solver_options_from_json(cfg["solver"], c.solver, "config.solver");
  if (f.moment_tol) c.solver.moment_tol = *f.moment_tol;
  if (f.max_iter) c.solver.max_iter = *f.max_iter;
  if (f.lambda_cap) c.solver.lambda_cap = *f.lambda_cap;
  if (f.equiv_tol) c.solver.equiv_tol = *f.equiv_tol;
  if (f.trace) c.solver.trace = true;
  c.solver.seed = c.seed;

  pick(c.alphabet_size, f.alphabet_size, cfg, "alphabet_size");
  pick(c.trials, f.trials, cfg, "trials");
  pick(c.prior_mode, f.prior_mode, cfg, "prior_mode");
  pick(c.zero_policy, f.zero_policy, cfg, "zero_policy");
  pick(c.instances, f.instances, cfg, "instances");
  pick(c.cap, f.cap, cfg, "cap");
  if (command == "entropy-approx") detail::pick_list(c.n_grid, f.n_grid, cfg, "n_grid");
  if (command == "sanov") {
    pick(c.n, f.n, cfg, "n");
    pick(c.mc_trials, f.mc_trials, cfg, "mc_trials");
    detail::pick_list(c.curve, f.curve, cfg, "curve");
  }
  if (command == "diagnose") c.random = f.random || cfg.value("random", false);
  if (command == "sanov") c.monte_carlo = f.monte_carlo || cfg.value("monte_carlo", false);
  if (c.threads < 1) throw InputError("--threads must be >= 1");
  return c;
}

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Maximum-entropy and exponential-family toolkit over finite outcome spaces", "maxent"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags f;
  app.add_option("--seed", f.seed, "Master random seed");
  app.add_option("--threads", f.threads, "Worker threads (results do not depend on it)");
  app.add_option("--output", f.output, "Output file (default: standard output)");
  app.add_option("--config", f.config, "JSON file of defaults; flags take precedence");

  auto solver_flags = [&](CLI::App* s) {
    s->add_option("--moment-tol", f.moment_tol, "Moment matching tolerance");
    s->add_option("--max-iter", f.max_iter, "Newton iteration limit");
    s->add_option("--lambda-cap", f.lambda_cap, "Natural parameter cap");
    s->add_option("--equiv-tol", f.equiv_tol, "Tolerance when comparing solver outputs");
    s->add_flag("--trace", f.trace, "Record the per-iteration trace");
  };

  auto* ea = app.add_subcommand("entropy-approx", "Stirling approximation accuracy experiment (CSV)");
  ea->add_option("--alphabet-size", f.alphabet_size, "Alphabet size D");
  ea->add_option("--n", f.n_grid, "Sample sizes: a,b,c or a..b (doubling)");
  ea->add_option("--trials", f.trials, "Trials per sample size");
  ea->add_option("--prior", f.prior_mode, "dirichlet1 or orthant");
  ea->add_option("--zero-policy", f.zero_policy, "occupied or skip");

  auto* pr = app.add_subcommand("project", "Information projection onto a constraint set (JSON)");
  pr->add_option("--prior", f.prior, "Prior distribution JSON (default: uniform)");
  pr->add_option("--constraints", f.constraints, "Constraint set JSON");
  solver_flags(pr);

  auto* fi = app.add_subcommand("fit", "Fit by moment projection and by log loss (JSON)");
  fi->add_option("--prior", f.prior, "Prior distribution JSON (default: uniform)");
  fi->add_option("--features", f.features, "Feature set JSON");
  fi->add_option("--samples", f.samples, "Newline-delimited outcome labels");
  fi->add_option("--empirical", f.empirical, "Histogram JSON");
  solver_flags(fi);

  auto* di = app.add_subcommand("diagnose", "Identity diagnostics (JSON, table on stderr)");
  di->add_flag("--random", f.random, "Run the seeded random instance suite");
  di->add_option("--instances", f.instances, "Number of random instances");
  di->add_option("--prior", f.prior, "Prior distribution JSON");
  di->add_option("--constraints", f.constraints, "Constraint set JSON");
  di->add_option("--data", f.data, "Data distribution JSON (a member of the constraint set)");
  di->add_option("--model", f.model, "Model JSON");
  di->add_option("--variational", f.variational, "Variational model JSON for the free-energy bounds");
  solver_flags(di);

  auto* sa = app.add_subcommand("sanov", "Exact or sampled probability of an empirical-measure event (JSON)");
  sa->add_option("--prior", f.prior, "Sampling distribution JSON (default: uniform)");
  sa->add_option("--constraints", f.constraints, "Event A as a constraint set JSON");
  sa->add_option("--n", f.n, "Number of draws");
  sa->add_option("--curve", f.curve, "Sample sizes for the conditioning curve: a,b,c");
  sa->add_option("--curve-output", f.curve_output, "CSV file for the curve");
  sa->add_option("--nested", f.nested, "Sub-event B as a constraint set JSON");
  sa->add_flag("--monte-carlo", f.monte_carlo, "Estimate by sampling instead of enumerating");
  sa->add_option("--trials", f.mc_trials, "Monte Carlo trials");
  sa->add_option("--cap", f.cap, "Largest number of histograms to enumerate");
  solver_flags(sa);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  try {
    const RunConfig c = resolve(command, f);
    if (command == "entropy-approx") return cmd_entropy_approx(c, out, err);
    if (command == "project") return cmd_project(c, out, err);
    if (command == "fit") return cmd_fit(c, out, err);
    if (command == "diagnose") return cmd_diagnose(c, out, err);
    return cmd_sanov(c, out, err);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const ShapeError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace maxent::cli
