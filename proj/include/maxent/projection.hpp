#pragma once

// Information projection P* = argmin_{Q in A} D(Q || P0) over moment
// constraint sets, solved through the convex dual
//     g(lambda) = A(lambda) - lambda . alpha,
// whose minimizer gives P* = P_{lambda*}.
//
// When alpha sits on the boundary of the moment polytope the infimum over
// finite lambda is not attained. The limit P* is then supported on the
// minimal face of the polytope containing alpha; it is computed exactly by
// solving the dual on the prior restricted to that face and is reported with
// status BoundaryNonattained.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "maxent/core.hpp"
#include "maxent/expfam.hpp"
#include "maxent/lp.hpp"

namespace maxent {

struct SolverOptions {
  double moment_tol = 1e-9;
  int max_iter = 200;
  double lambda_cap = 1e4;
  double equiv_tol = 1e-6;
  std::uint64_t seed = 0;
  bool trace = false;
  int gd_max_iter = 200000;  // iteration budget of the first-order log-loss fit
  std::optional<Eigen::VectorXd> initial_lambda;
};

enum class ProjectionStatus { Converged, Infeasible, BoundaryNonattained, NotConverged };

inline const char* to_string(ProjectionStatus s) {
  switch (s) {
    case ProjectionStatus::Converged: return "Converged";
    case ProjectionStatus::Infeasible: return "Infeasible";
    case ProjectionStatus::BoundaryNonattained: return "BoundaryNonattained";
    case ProjectionStatus::NotConverged: return "NotConverged";
  }
  return "?";
}

struct TraceEntry {
  int iteration = 0;
  double objective = 0.0;  // dual value, or log loss for fit_log_loss
  double grad_norm = 0.0;
  double step = 0.0;
};

struct ProjectionResult {
  ProjectionStatus status = ProjectionStatus::Infeasible;
  FiniteDistribution prior;
  ConstraintSet constraints;
  Eigen::VectorXd lambda_star;
  ExpFamModel model;  // P* (on the face prior when the boundary limit was taken)
  double min_divergence = kInf;
  Eigen::VectorXd moment_residual;
  int iterations = 0;
  std::vector<std::size_t> support;     // support of P*
  std::vector<std::size_t> active_set;  // constraints held at equality
  std::vector<TraceEntry> trace;

  const FiniteDistribution& distribution() const { return model.distribution(); }
  bool attained() const { return status == ProjectionStatus::Converged; }
  bool solved() const {
    return status == ProjectionStatus::Converged || status == ProjectionStatus::BoundaryNonattained;
  }
};

struct FeasibilityReport {
  bool in_hull = false;
  bool on_boundary = false;
  std::optional<Eigen::VectorXd> witness;  // unit w with w.alpha > max_x w.f(x) when !in_hull
  double witness_margin = 0.0;
  std::vector<std::size_t> face;  // outcomes some strictly-feasible Q can charge
};

namespace detail {

struct LpShape {
  Eigen::MatrixXd m;
  Eigen::VectorXd b;
  std::size_t n_outcomes = 0;
  std::size_t n_slacks = 0;
};

/// Rows: each constraint, then normalization. Columns: q_x for x in `support`,
/// then one slack per inequality (Ge: -1, Le: +1).
inline LpShape moment_lp(const ConstraintSet& a, std::span<const std::size_t> support) {
  const std::size_t d = a.size();
  std::size_t n_slack = 0;
  for (auto k : a.kinds()) n_slack += (k != ConstraintKind::Eq);
  LpShape s;
  s.n_outcomes = support.size();
  s.n_slacks = n_slack;
  s.m = Eigen::MatrixXd::Zero(Eigen::Index(d + 1), Eigen::Index(support.size() + n_slack));
  s.b = Eigen::VectorXd::Zero(Eigen::Index(d + 1));
  for (std::size_t j = 0; j < support.size(); ++j) {
    s.m.col(Eigen::Index(j)).head(Eigen::Index(d)) = a.features().matrix().col(Eigen::Index(support[j]));
    s.m(Eigen::Index(d), Eigen::Index(j)) = 1.0;
  }
  std::size_t col = support.size();
  for (std::size_t i = 0; i < d; ++i) {
    if (a.kinds()[i] == ConstraintKind::Eq) continue;
    s.m(Eigen::Index(i), Eigen::Index(col++)) = a.kinds()[i] == ConstraintKind::Ge ? -1.0 : 1.0;
  }
  s.b.head(Eigen::Index(d)) = a.targets();
  s.b(Eigen::Index(d)) = 1.0;
  return s;
}

/// Shrinks `support` to the outcomes that some feasible Q can charge. Uses
/// the LP  max t  s.t. q = t 1 + r, r >= 0, Q in A; at t* = 0 its dual yields
/// h(x) >= 0 with sum_x q_x h(x) = 0 for every feasible q, so every x with
/// h(x) > 0 can be dropped. Repeats until t* > 0.
inline std::vector<std::size_t> minimal_face(const ConstraintSet& a, std::vector<std::size_t> support) {
  const std::size_t d = a.size();
  for (int guard = 0; guard < 10000 && support.size() > 1; ++guard) {
    LpShape s = moment_lp(a, support);
    const Eigen::Index nt = s.m.cols();
    Eigen::MatrixXd m(s.m.rows(), nt + 1);
    m.leftCols(nt) = s.m;
    m.col(nt) = s.m.leftCols(Eigen::Index(s.n_outcomes)).rowwise().sum();
    Eigen::VectorXd c = Eigen::VectorXd::Zero(nt + 1);
    c(nt) = -1.0;
    const auto res = lp::solve(m, s.b, c);
    if (res.status != lp::Status::Optimal) return support;
    const double t = -res.objective;
    if (t > 1e-11) return support;
    std::vector<double> h(support.size());
    double hmax = 0.0;
    for (std::size_t j = 0; j < support.size(); ++j) {
      h[j] = -res.dual.dot(m.col(Eigen::Index(j)));
      hmax = std::max(hmax, h[j]);
    }
    std::vector<std::size_t> kept;
    const double cut = 1e-9 * std::max(1.0, hmax);
    for (std::size_t j = 0; j < support.size(); ++j)
      if (h[j] <= cut) kept.push_back(support[j]);
    if (kept.size() == support.size() || kept.empty()) return support;
    support = std::move(kept);
    (void)d;
  }
  return support;
}

struct NewtonOutcome {
  Eigen::VectorXd lambda;
  int iterations = 0;
  bool converged = false;
  bool capped = false;
};

inline double dual_value(const ExpFamModel& m, const Eigen::VectorXd& alpha) {
  return m.log_partition() - m.lambda().dot(alpha);
}

/// Newton direction from the eigen-decomposed Fisher matrix. Directions in
/// the numerical null space are dropped and the spectrum is shifted so the
/// smallest retained eigenvalue is at least 1e-10.
inline Eigen::VectorXd newton_direction(const Eigen::MatrixXd& fisher, const Eigen::VectorXd& grad) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(fisher);
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double emax = std::max(ev.maxCoeff(), 0.0);
  const double shift = std::max(0.0, 1e-10 - ev.minCoeff());
  Eigen::VectorXd dir = Eigen::VectorXd::Zero(grad.size());
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    if (ev(k) <= 1e-14 * emax) continue;
    const auto v = es.eigenvectors().col(k);
    dir -= (v.dot(grad) / (ev(k) + shift)) * v;
  }
  return dir;
}

/// Damped Newton on g(lambda) = A(lambda) - lambda . alpha with Armijo
/// backtracking (c = 1e-4, halving).
inline NewtonOutcome newton_dual(const FiniteDistribution& prior, const FeatureSet& f,
                                 const Eigen::VectorXd& alpha, const SolverOptions& opts,
                                 std::vector<TraceEntry>* trace) {
  NewtonOutcome out;
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(Eigen::Index(f.dim()));
  if (opts.initial_lambda && opts.initial_lambda->size() == lambda.size()) lambda = *opts.initial_lambda;
  ExpFamModel model(prior, f, lambda);
  for (int it = 0; it <= opts.max_iter; ++it) {
    const Eigen::VectorXd grad = mean_parameters(model) - alpha;
    const double gnorm = grad.size() ? grad.cwiseAbs().maxCoeff() : 0.0;
    const double g0 = dual_value(model, alpha);
    out.iterations = it;
    if (gnorm <= opts.moment_tol) {
      // Polish: full Newton steps while they keep shrinking the gradient.
      double best = gnorm;
      for (int k = 0; k < 3 && best > 0.0; ++k) {
        const Eigen::VectorXd g = mean_parameters(model) - alpha;
        ExpFamModel trial = model.with_lambda(model.lambda() + newton_direction(fisher_information(model), g));
        const double tn = (mean_parameters(trial) - alpha).cwiseAbs().maxCoeff();
        if (!(tn < best)) break;
        best = tn;
        model = std::move(trial);
      }
      if (trace) trace->push_back({it, dual_value(model, alpha), best, 0.0});
      out.converged = true;
      break;
    }
    if (it == opts.max_iter) {
      if (trace) trace->push_back({it, g0, gnorm, 0.0});
      break;
    }
    const Eigen::VectorXd dir = newton_direction(fisher_information(model), grad);
    const double slope = grad.dot(dir);
    double t = 1.0;
    std::optional<ExpFamModel> next;
    for (int k = 0; k < 60; ++k, t *= 0.5) {
      ExpFamModel trial = model.with_lambda(model.lambda() + t * dir);
      const double g1 = dual_value(trial, alpha);
      if (g1 <= g0 + 1e-4 * t * slope + 1e-15 * (1.0 + std::abs(g0))) {
        next.emplace(std::move(trial));
        break;
      }
    }
    if (trace) trace->push_back({it, g0, gnorm, next ? t : 0.0});
    if (!next) break;
    model = std::move(*next);
    if (model.lambda().cwiseAbs().maxCoeff() > opts.lambda_cap) {
      out.capped = true;
      out.iterations = it + 1;
      break;
    }
  }
  out.lambda = model.lambda();
  return out;
}

}  // namespace detail

/// Decides whether the constraint targets are attainable by some
/// distribution on the prior's support, and whether strictly positive ones
/// exist. Infeasible sets come with a separating direction.
inline FeasibilityReport check_feasibility(const FiniteDistribution& prior, const ConstraintSet& a) {
  if (a.alphabet_size() != prior.size()) throw ShapeError("check_feasibility: alphabet size mismatch");
  FeasibilityReport rep;
  const auto support = prior.support();
  if (a.size() == 0) {
    rep.in_hull = true;
    rep.face = support;
    return rep;
  }
  const auto s = detail::moment_lp(a, support);
  const auto res = lp::solve(s.m, s.b, Eigen::VectorXd::Zero(s.m.cols()));
  if (res.status == lp::Status::Infeasible) {
    Eigen::VectorXd w = res.dual.head(Eigen::Index(a.size()));
    const double norm = w.norm();
    if (norm > 0.0) w /= norm;
    double best = -kInf;
    for (auto x : support) best = std::max(best, w.dot(a.features().column(x)));
    rep.witness = w;
    rep.witness_margin = w.dot(a.targets()) - best;
    return rep;
  }
  rep.in_hull = true;
  rep.face = detail::minimal_face(a, support);
  rep.on_boundary = rep.face.size() < support.size();
  return rep;
}

namespace detail {

inline ProjectionResult make_result(const FiniteDistribution& prior, const ConstraintSet& a, ExpFamModel model,
                                    ProjectionStatus status) {
  ProjectionResult r{status, prior, a, model.lambda(), model, kInf, {}, 0, {}, {}, {}};
  const auto& p = r.model.distribution();
  r.support = p.support();
  r.min_divergence = status == ProjectionStatus::Infeasible ? kInf : kl_divergence(p, prior);
  r.moment_residual = a.violation(mean_parameters(r.model));
  return r;
}

}  // namespace detail

/// Equality-constrained projection.
inline ProjectionResult project(const FiniteDistribution& prior, const ConstraintSet& a,
                                const SolverOptions& opts = {}) {
  if (a.alphabet_size() != prior.size()) throw ShapeError("project: alphabet size mismatch");
  if (!a.equality_only()) throw InputError("project: inequality constraints need project_inequality");
  const FeatureSet& f = a.features();
  if (a.size() == 0) {
    auto r = detail::make_result(prior, a, ExpFamModel(prior, f), ProjectionStatus::Converged);
    r.min_divergence = 0.0;
    return r;
  }
  const auto feas = check_feasibility(prior, a);
  if (!feas.in_hull) return detail::make_result(prior, a, ExpFamModel(prior, f), ProjectionStatus::Infeasible);

  std::vector<TraceEntry> trace;
  auto* tp = opts.trace ? &trace : nullptr;
  ProjectionResult r = [&] {
    if (!feas.on_boundary) {
      const auto nt = detail::newton_dual(prior, f, a.targets(), opts, tp);
      const auto status = nt.converged ? ProjectionStatus::Converged
                          : nt.capped  ? ProjectionStatus::BoundaryNonattained
                                       : ProjectionStatus::NotConverged;
      auto res = detail::make_result(prior, a, ExpFamModel(prior, f, nt.lambda), status);
      res.iterations = nt.iterations;
      return res;
    }
    const auto face_prior = restrict_to(prior, feas.face);
    SolverOptions face_opts = opts;
    face_opts.initial_lambda.reset();
    const auto nt = detail::newton_dual(face_prior, f, a.targets(), face_opts, tp);
    auto res = detail::make_result(prior, a, ExpFamModel(face_prior, f, nt.lambda),
                                   nt.converged ? ProjectionStatus::BoundaryNonattained
                                                : ProjectionStatus::NotConverged);
    res.iterations = nt.iterations;
    return res;
  }();
  r.active_set.resize(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r.active_set[i] = i;
  r.trace = std::move(trace);
  return r;
}

namespace detail {

/// Solves with the listed constraints held at equality and maps lambda back to
/// the full constraint set (zeros elsewhere).
inline ProjectionResult solve_active(const FiniteDistribution& prior, const ConstraintSet& a,
                                     const std::vector<std::size_t>& active, const SolverOptions& opts) {
  const ConstraintSet sub = a.select(active);
  ConstraintSet eq_sub = ConstraintSet::equalities(sub.features(), sub.targets());
  SolverOptions o = opts;
  o.initial_lambda.reset();
  ProjectionResult r = project(prior, eq_sub, o);
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(Eigen::Index(a.size()));
  for (std::size_t k = 0; k < active.size(); ++k) lambda(Eigen::Index(active[k])) = r.lambda_star(Eigen::Index(k));
  ExpFamModel full(r.model.prior(), a.features(), lambda);
  auto out = make_result(prior, a, std::move(full), r.status);
  out.iterations = r.iterations;
  out.active_set = active;
  out.trace = std::move(r.trace);
  return out;
}

enum class Kkt { Ok, Violated, WrongSign };

struct KktCheck {
  Kkt verdict = Kkt::Ok;
  std::size_t index = 0;
};

inline KktCheck kkt(const ConstraintSet& a, const ProjectionResult& r, const std::vector<std::size_t>& active,
                    double tol) {
  const Eigen::VectorXd s = a.slack(mean_parameters(r.model));
  KktCheck out;
  double worst = -tol;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.kinds()[i] == ConstraintKind::Eq) continue;
    if (std::find(active.begin(), active.end(), i) != active.end()) continue;
    if (s(Eigen::Index(i)) < worst) {
      worst = s(Eigen::Index(i));
      out = {Kkt::Violated, i};
    }
  }
  if (out.verdict != Kkt::Ok) return out;
  const double lam_tol = 1e-9 * (1.0 + r.lambda_star.cwiseAbs().maxCoeff());
  double wrong = lam_tol;
  for (auto i : active) {
    const double l = r.lambda_star(Eigen::Index(i));
    const double bad = a.kinds()[i] == ConstraintKind::Ge ? -l : a.kinds()[i] == ConstraintKind::Le ? l : 0.0;
    if (bad > wrong) {
      wrong = bad;
      out = {Kkt::WrongSign, i};
    }
  }
  return out;
}

}  // namespace detail

/// Projection onto a mix of equality and one-sided constraints by an active
/// set strategy: violated inequalities are moved into the equality set, and
/// active inequalities whose multiplier has the wrong sign are released. If the
/// iteration cycles or meets an infeasible working set, every working set is
/// tried in order of size and the first satisfying the KKT conditions wins.
inline ProjectionResult project_inequality(const FiniteDistribution& prior, const ConstraintSet& a,
                                           const SolverOptions& opts = {}) {
  if (a.equality_only()) return project(prior, a, opts);
  if (a.alphabet_size() != prior.size()) throw ShapeError("project_inequality: alphabet size mismatch");
  const auto feas = check_feasibility(prior, a);
  if (!feas.in_hull)
    return detail::make_result(prior, a, ExpFamModel(prior, a.features()), ProjectionStatus::Infeasible);

  std::vector<std::size_t> eq, ineq;
  for (std::size_t i = 0; i < a.size(); ++i) (a.kinds()[i] == ConstraintKind::Eq ? eq : ineq).push_back(i);
  const double tol = std::max(10.0 * opts.moment_tol, 1e-9);

  auto sorted = [](std::vector<std::size_t> v) {
    std::sort(v.begin(), v.end());
    return v;
  };

  std::set<std::vector<std::size_t>> visited;
  std::vector<std::size_t> active = eq;
  double last_div = -kInf;
  for (std::size_t round = 0; round < 4 * (ineq.size() + 1) * (ineq.size() + 1); ++round) {
    active = sorted(active);
    if (!visited.insert(active).second) break;
    auto r = detail::solve_active(prior, a, active, opts);
    if (!r.solved()) break;
    if (r.min_divergence < last_div - 1e-9) break;  // adding constraints cannot lower the divergence
    const auto check = detail::kkt(a, r, active, tol);
    if (check.verdict == detail::Kkt::Ok) return r;
    if (check.verdict == detail::Kkt::Violated) {
      last_div = r.min_divergence;
      active.push_back(check.index);
    } else {
      last_div = -kInf;
      active.erase(std::find(active.begin(), active.end(), check.index));
    }
  }

  // Exhaustive fallback over working sets.
  const std::size_t k = ineq.size();
  if (k > 20) throw DomainError("project_inequality: active-set search failed with too many inequalities");
  std::vector<std::uint32_t> masks(std::size_t(1) << k);
  for (std::uint32_t m = 0; m < masks.size(); ++m) masks[m] = m;
  std::stable_sort(masks.begin(), masks.end(),
                   [](std::uint32_t x, std::uint32_t y) { return std::popcount(x) < std::popcount(y); });
  for (auto mask : masks) {
    std::vector<std::size_t> act = eq;
    for (std::size_t j = 0; j < k; ++j)
      if (mask >> j & 1u) act.push_back(ineq[j]);
    act = sorted(act);
    const auto fs = check_feasibility(prior, ConstraintSet::equalities(a.select(act).features(), a.select(act).targets()));
    if (!fs.in_hull) continue;
    auto r = detail::solve_active(prior, a, act, opts);
    if (r.solved() && detail::kkt(a, r, act, tol).verdict == detail::Kkt::Ok) return r;
  }
  throw DomainError("project_inequality: no working set satisfies the optimality conditions");
}

/// Maximum-likelihood fit of the exponential family to `data` by first-order
/// descent on the log loss H(data, P_lambda) (Barzilai-Borwein steps with a
/// monotone Armijo safeguard). The gradient is E_{P_lambda}[f] - E_data[f].
inline ProjectionResult fit_log_loss(const FiniteDistribution& prior, const FeatureSet& f,
                                     const FiniteDistribution& data, const SolverOptions& opts = {}) {
  require_same_alphabet(data, prior, "fit_log_loss");
  if (f.alphabet_size() != prior.size()) throw ShapeError("fit_log_loss: feature alphabet mismatch");
  for (std::size_t x = 0; x < data.size(); ++x)
    if (data.prob(x) > 0.0 && prior.prob(x) == 0.0)
      throw DomainError("fit_log_loss: data charges outcome '" + data.outcomes()[x] + "' outside the prior's support");
  const Eigen::VectorXd alpha = moments(data, f);
  const ConstraintSet a = ConstraintSet::equalities(f, alpha);
  const bool boundary = f.dim() > 0 && check_feasibility(prior, a).on_boundary;

  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(Eigen::Index(f.dim()));
  if (opts.initial_lambda && opts.initial_lambda->size() == lambda.size()) lambda = *opts.initial_lambda;
  ExpFamModel model(prior, f, lambda);
  auto loss = [&](const ExpFamModel& m) { return cross_entropy(data, m.distribution()); };

  const int budget = boundary ? opts.max_iter : opts.gd_max_iter;
  std::vector<TraceEntry> trace;
  double obj = loss(model);
  Eigen::VectorXd grad = mean_parameters(model) - alpha;
  double step = 1.0;
  bool converged = f.dim() == 0;
  int it = 0;
  for (; it < budget && !converged; ++it) {
    const double gnorm = grad.cwiseAbs().maxCoeff();
    if (opts.trace) trace.push_back({it, obj, gnorm, step});
    if (gnorm <= opts.moment_tol) {
      converged = true;
      break;
    }
    const double g2 = grad.squaredNorm();
    double t = step;
    std::optional<ExpFamModel> next;
    Eigen::VectorXd next_grad;
    double next_obj = obj;
    for (int k = 0; k < 80; ++k, t *= 0.5) {
      ExpFamModel trial = model.with_lambda(model.lambda() - t * grad);
      const double o = loss(trial);
      const bool armijo = o <= obj - 1e-4 * t * g2;
      bool accept = armijo;
      Eigen::VectorXd tg;
      if (!armijo && std::abs(o - obj) <= 1e-13 * (1.0 + std::abs(obj))) {
        // At the rounding floor of the loss, fall back on gradient decrease.
        tg = mean_parameters(trial) - alpha;
        accept = tg.cwiseAbs().maxCoeff() < gnorm && o <= obj + 1e-15 * (1.0 + std::abs(obj));
      }
      if (accept) {
        next_grad = tg.size() ? tg : Eigen::VectorXd(mean_parameters(trial) - alpha);
        next_obj = o;
        next.emplace(std::move(trial));
        break;
      }
    }
    if (!next) break;
    const Eigen::VectorXd s = next->lambda() - model.lambda();
    const Eigen::VectorXd y = next_grad - grad;
    const double sy = s.dot(y);
    step = sy > 0.0 ? std::clamp(s.squaredNorm() / sy, 1e-10, 1e10) : std::min(2.0 * t, 1e10);
    model = std::move(*next);
    grad = std::move(next_grad);
    obj = next_obj;
    if (model.lambda().cwiseAbs().maxCoeff() > opts.lambda_cap) break;
  }
  if (!converged && f.dim() > 0 && grad.cwiseAbs().maxCoeff() <= opts.moment_tol) converged = true;
  if (opts.trace && (trace.empty() || trace.back().iteration != it)) trace.push_back({it, obj, grad.size() ? grad.cwiseAbs().maxCoeff() : 0.0, 0.0});
  // On the boundary the infimum is never attained, however small the gradient.
  const auto status = boundary    ? ProjectionStatus::BoundaryNonattained
                      : converged ? ProjectionStatus::Converged
                                  : ProjectionStatus::NotConverged;
  auto r = detail::make_result(prior, a, model, status);
  r.iterations = it;
  r.trace = std::move(trace);
  for (std::size_t i = 0; i < a.size(); ++i) r.active_set.push_back(i);
  return r;
}

struct RobustBayesValue {
  double value = kNaN;       // H(P*) for a uniform prior, else D(P* || P0)
  bool entropy_reading = false;
  double game_value = kNaN;  // value of the game with P* as the predictor, by LP over A
  ProjectionResult star;
};

/// Minimax log-loss value over A. For a uniform prior this is the maximum
/// entropy over A; otherwise the minimum discrimination information
/// D(P* || P0) is returned with entropy_reading = false. `game_value` recomputes
/// the value independently as the worst case over Q in A of the loss of P*.
inline RobustBayesValue robust_bayes_value(const FiniteDistribution& prior, const ConstraintSet& a,
                                           const SolverOptions& opts = {}) {
  RobustBayesValue out{kNaN, prior.is_uniform(), kNaN, project_inequality(prior, a, opts)};
  const auto& star = out.star;
  if (!star.solved()) return out;
  const auto& p = star.distribution();
  out.value = out.entropy_reading ? entropy(p) : star.min_divergence;
  // worst case over Q in A (supported where P* is) of H(Q, P*) or E_Q log(P0/P*)
  const auto support = star.support;
  const auto s = detail::moment_lp(a, support);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(s.m.cols());
  for (std::size_t j = 0; j < support.size(); ++j) {
    const auto x = support[j];
    const double loss = out.entropy_reading ? -p.log_prob(x) : prior.log_prob(x) - p.log_prob(x);
    c(Eigen::Index(j)) = -loss;
  }
  const auto res = lp::solve(s.m, s.b, c);
  if (res.status == lp::Status::Optimal) out.game_value = out.entropy_reading ? -res.objective : res.objective;
  return out;
}

}  // namespace maxent
