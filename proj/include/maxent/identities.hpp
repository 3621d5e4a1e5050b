#pragma once

// Numerical checks of the information identities relating a data
// distribution P, a constraint set A with projection P*, and members P_lambda
// of the exponential family built on A's features.
//
// Identities whose textbook form assumes a uniform prior are checked in their
// prior-relative form otherwise; the report's `mode` says which form was used.

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "maxent/core.hpp"
#include "maxent/expfam.hpp"
#include "maxent/projection.hpp"
#include "maxent/random.hpp"
#include "maxent/report.hpp"
#include "maxent/sanov.hpp"

namespace maxent {

namespace detail {

/// P must lie in A and, for sets with one-sided constraints, share all
/// feature moments with P* (the identities are stated for the moment class
/// of P*).
inline void require_member(const FiniteDistribution& p, const ProjectionResult& star, const char* who) {
  if (!star.solved()) throw DomainError(std::string(who) + ": projection was not solved");
  require_same_alphabet(p, star.prior, who);
  if (!constraint_contains(star.constraints, p, kMembershipTol))
    throw DomainError(std::string(who) + ": P is not in A");
  if (!star.constraints.equality_only()) {
    const Eigen::VectorXd gap = moments(p, star.constraints.features()) - mean_parameters(star.model);
    if (gap.size() && gap.cwiseAbs().maxCoeff() > 1e-8)
      throw DomainError(std::string(who) + ": P does not share the moments of P*");
  }
}

inline void require_family(const ExpFamModel& m, const ProjectionResult& star, const char* who) {
  if (!(m.features() == star.constraints.features())) throw ShapeError(std::string(who) + ": feature mismatch");
  const auto& p0 = star.prior;
  if (!m.prior().same_alphabet(p0)) throw ShapeError(std::string(who) + ": alphabet mismatch");
  for (std::size_t x = 0; x < p0.size(); ++x)
    if (m.prior().prob(x) != p0.prob(x)) throw ShapeError(std::string(who) + ": model prior differs from the projection's");
}

}  // namespace detail

/// D(P||P_lambda) = D(P||P*) + D(P*||P_lambda): regret splits into
/// approximation error and estimation error.
inline IdentityReport pythagorean(const FiniteDistribution& p, const ProjectionResult& star, const ExpFamModel& model,
                                  double tol = 1e-8) {
  detail::require_member(p, star, "pythagorean");
  detail::require_family(model, star, "pythagorean");
  const double regret = kl_divergence(p, model.distribution());
  const double estimation = kl_divergence(star.distribution(), model.distribution());
  const double approximation = kl_divergence(p, star.distribution());
  auto r = make_report("pythagorean", regret, estimation + approximation, tol);
  r.terms = {{"regret", regret}, {"estimation_error", estimation}, {"approximation_error", approximation}};
  return r;
}

/// For Q with the moments of P_a:
///   D(Q||P_b) - D(Q||P_a) = H(Q,P_b) - H(Q,P_a) = D(P_a||P_b).
inline IdentityReport robustness(const FiniteDistribution& q, const ExpFamModel& a, const ExpFamModel& b,
                                 double tol = 1e-8) {
  if (!a.same_family(b)) throw ShapeError("robustness: models belong to different families");
  require_same_alphabet(q, a.prior(), "robustness");
  const Eigen::VectorXd gap = moments(q, a.features()) - mean_parameters(a);
  if (gap.size() && gap.cwiseAbs().maxCoeff() > kMembershipTol)
    throw DomainError("robustness: Q does not share the moments of P_a");
  const double dqb = kl_divergence(q, b.distribution()), dqa = kl_divergence(q, a.distribution());
  const double dab = kl_divergence(a.distribution(), b.distribution());
  const double ce = cross_entropy(q, b.distribution()) - cross_entropy(q, a.distribution());
  auto r = make_report("robustness", dqb - dqa, dab, tol);
  r.pass = r.pass && std::abs(ce - dab) <= tol;
  r.terms = {{"divergence_to_b", dqb},
             {"divergence_to_a", dqa},
             {"cross_entropy_difference", ce},
             {"cross_entropy_residual", ce - dab}};
  return r;
}

struct BogoliubovCheck {
  IdentityReport upper;  // energies matched at the variational model
  IdentityReport lower;  // energies matched at the target model
};

namespace detail {

/// U^target(P_{c psi}) - U^{c psi}(P_{c psi}).
inline double upper_mismatch(const ExpFamModel& target, const ExpFamModel& variational, double c) {
  const ExpFamModel m = variational.with_lambda(c * variational.lambda());
  return internal_energy(target, m.distribution()) - internal_energy(m, m.distribution());
}

/// Scale c in [1e-3, 1e3] with upper_mismatch = 0: c = 1 if it already
/// matches, else bisection in log c on the first sign change of a log grid.
inline std::optional<double> match_upper_scale(const ExpFamModel& target, const ExpFamModel& variational) {
  auto h = [&](double c) { return upper_mismatch(target, variational, c); };
  if (std::abs(h(1.0)) <= 1e-13) return 1.0;
  constexpr int grid = 240;
  double lo = std::log(1e-3), hlo = h(1e-3);
  if (hlo == 0.0) return 1e-3;
  for (int k = 1; k <= grid; ++k) {
    const double hi = std::log(1e-3) + (std::log(1e3) - std::log(1e-3)) * k / grid;
    const double hhi = h(std::exp(hi));
    if (hhi == 0.0) return std::exp(hi);
    if ((hlo < 0.0) != (hhi < 0.0)) {
      double a = lo, b = hi, ha = hlo;
      for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
        const double mid = 0.5 * (a + b), hm = h(std::exp(mid));
        if (hm == 0.0) return std::exp(mid);
        if ((hm < 0.0) == (ha < 0.0)) {
          a = mid;
          ha = hm;
        } else {
          b = mid;
        }
      }
      return std::exp(0.5 * (a + b));
    }
    lo = hi;
    hlo = hhi;
  }
  return std::nullopt;
}

}  // namespace detail

/// Free-energy bounds from a variational family on the same prior. The
/// variational parameters are rescaled by c in [1e-3, 1e3] to match energies:
///   upper: U^lambda(P_psi) = U^psi(P_psi)  =>  F^psi(P_psi) - F^lambda(P_lambda) = D(P_psi||P_lambda) >= 0
///   lower: U^lambda(P_lambda) = U^psi(P_lambda)  =>  F^lambda(P_lambda) - F^psi(P_psi) = D(P_lambda||P_psi) >= 0
/// with F(P_lambda) = -A(lambda). Throws DomainError when no scale matches.
inline BogoliubovCheck bogoliubov(const ExpFamModel& target, const ExpFamModel& variational, double tol = 1e-9) {
  if (!target.prior().same_alphabet(variational.prior())) throw ShapeError("bogoliubov: alphabet mismatch");
  for (std::size_t x = 0; x < target.prior().size(); ++x)
    if (target.prior().prob(x) != variational.prior().prob(x))
      throw ShapeError("bogoliubov: target and variational families need the same prior");
  constexpr double sign_tol = 1e-10;
  const double f_target = -target.log_partition();
  BogoliubovCheck out;

  const auto cu = detail::match_upper_scale(target, variational);
  if (!cu) throw DomainError("bogoliubov: upper energy matching has no solution for scale in [1e-3, 1e3]");
  {
    const ExpFamModel v = variational.with_lambda(*cu * variational.lambda());
    const double gap = -v.log_partition() - f_target;
    const double div = kl_divergence(v.distribution(), target.distribution());
    out.upper = make_report("bogoliubov_upper", gap, div, tol);
    out.upper.pass = out.upper.pass && gap >= -sign_tol;
    out.upper.terms = {{"scale", *cu},
                       {"free_energy_variational", -v.log_partition()},
                       {"free_energy_target", f_target},
                       {"energy_mismatch", detail::upper_mismatch(target, variational, *cu)}};
  }

  const auto& pt = target.distribution();
  const double u_target = internal_energy(target, pt);
  const double u_psi = internal_energy(variational, pt);
  const double cl = u_psi != 0.0 ? u_target / u_psi : (u_target == 0.0 ? 1.0 : kNaN);
  if (!(cl >= 1e-3 && cl <= 1e3))
    throw DomainError("bogoliubov: lower energy matching has no solution for scale in [1e-3, 1e3]");
  {
    const ExpFamModel v = variational.with_lambda(cl * variational.lambda());
    const double gap = f_target + v.log_partition();
    const double div = kl_divergence(pt, v.distribution());
    out.lower = make_report("bogoliubov_lower", gap, div, tol);
    out.lower.pass = out.lower.pass && gap >= -sign_tol;
    out.lower.terms = {{"scale", cl},
                       {"free_energy_variational", -v.log_partition()},
                       {"free_energy_target", f_target},
                       {"energy_mismatch", u_target - internal_energy(v, pt)}};
  }
  return out;
}

/// Uniform prior: D(P||P*) = H(P*) - H(P). Otherwise the prior-relative form
/// D(P||P*) = D(P||P0) - D(P*||P0).
inline IdentityReport approximation_error_entropy(const FiniteDistribution& p, const ProjectionResult& star,
                                                  double tol = 1e-8) {
  detail::require_member(p, star, "approximation_error_entropy");
  const double lhs = kl_divergence(p, star.distribution());
  IdentityReport r;
  if (star.prior.is_uniform()) {
    const double hs = entropy(star.distribution()), hp = entropy(p);
    r = make_report("approximation_error_entropy", lhs, hs - hp, tol);
    r.mode = "uniform-entropy";
    r.terms = {{"entropy_star", hs}, {"entropy_data", hp}};
  } else {
    const double dp = kl_divergence(p, star.prior), ds = kl_divergence(star.distribution(), star.prior);
    r = make_report("approximation_error_entropy", lhs, dp - ds, tol);
    r.mode = "prior-relative";
    r.terms = {{"divergence_data_prior", dp}, {"divergence_star_prior", ds}};
  }
  return r;
}

/// Uniform prior: H(P, P_lambda) = H(P*, P_lambda). Otherwise the losses are
/// compared relative to the prior's: H(P,P_lambda) - H(P,P0).
inline IdentityReport pretend_data_identity(const FiniteDistribution& p, const ProjectionResult& star,
                                            const ExpFamModel& model, double tol = 1e-8) {
  detail::require_member(p, star, "pretend_data_identity");
  detail::require_family(model, star, "pretend_data_identity");
  const double hp = cross_entropy(p, model.distribution()), hs = cross_entropy(star.distribution(), model.distribution());
  IdentityReport r;
  if (star.prior.is_uniform()) {
    r = make_report("pretend_data_identity", hp, hs, tol);
    r.mode = "uniform";
  } else {
    const double bp = cross_entropy(p, star.prior), bs = cross_entropy(star.distribution(), star.prior);
    r = make_report("pretend_data_identity", hp - bp, hs - bs, tol);
    r.mode = "prior-relative";
    r.terms = {{"prior_loss_data", bp}, {"prior_loss_star", bs}};
  }
  r.terms.insert(r.terms.begin(), {{"loss_data", hp}, {"loss_star", hs}});
  return r;
}

/// (1/n) log Pr(in A) <= H(P*) - log|X| under a uniform prior.
inline IdentityReport entropy_multiplicity_bound(const ProjectionResult& star, const SanovReport& sanov,
                                                 double tol = 1e-10) {
  if (!star.prior.is_uniform()) throw DomainError("entropy_multiplicity_bound: prior must be uniform");
  if (!star.solved()) throw DomainError("entropy_multiplicity_bound: projection was not solved");
  const double h = entropy(star.distribution());
  const double log_x = std::log(double(star.prior.size()));
  auto r = make_report("entropy_multiplicity_bound", sanov.log_prob / double(sanov.n), h - log_x, tol,
                       CheckKind::LessEqual);
  r.terms = {{"entropy_star", h}, {"log_alphabet_size", log_x}};
  return r;
}

/// -D(P*||P) >= (1/n) log Pr(in A) >= -H(P*, P). The width of the sandwich
/// is H(P*). The upper bound always holds; the lower one is guaranteed for
/// equality events under a uniform prior.
inline IdentityReport data_approximates_family(const ProjectionResult& star, const FiniteDistribution& prior,
                                               const SanovReport& sanov, double tol = 1e-9) {
  if (!star.solved()) throw DomainError("data_approximates_family: projection was not solved");
  require_same_alphabet(prior, star.prior, "data_approximates_family");
  const double rate = sanov.log_prob / double(sanov.n);
  const double upper = -kl_divergence(star.distribution(), prior);
  const double lower = -cross_entropy(star.distribution(), prior);
  auto r = make_report("data_approximates_family", rate, upper, tol, CheckKind::LessEqual);
  const bool lower_ok = rate >= lower - tol;
  r.pass = r.pass && lower_ok;
  r.mode = star.constraints.equality_only() && prior.is_uniform() ? "guaranteed" : "upper-guaranteed";
  r.terms = {{"upper_bound", upper},
             {"lower_bound", lower},
             {"lower_bound_holds", lower_ok ? 1.0 : 0.0},
             {"sandwich_width", upper - lower}};
  return r;
}

/// F(P) - F(P_lambda) = D(P||P_lambda), with F(P_lambda) = -A(lambda).
inline IdentityReport free_energy_regret(const FiniteDistribution& p, const ExpFamModel& model, double tol = 1e-10) {
  const auto e = energies(model, p);
  const double div = kl_divergence(p, model.distribution());
  auto r = make_report("free_energy_regret", e.free_energy + model.log_partition(), div, tol * (1.0 + std::abs(div)));
  r.terms = {{"free_energy", e.free_energy}, {"free_energy_model", -model.log_partition()}};
  return r;
}

/// Largest relative deviation between the Fisher matrix and central
/// differences (step h) of the mean parameters.
inline IdentityReport fisher_finite_difference(const ExpFamModel& model, double h = 1e-5, double tol = 1e-4) {
  const Eigen::MatrixXd fi = fisher_information(model);
  const Eigen::Index d = fi.rows();
  Eigen::MatrixXd fd(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
    e(j) = h;
    fd.col(j) = (mean_parameters(model.with_lambda(model.lambda() + e)) -
                 mean_parameters(model.with_lambda(model.lambda() - e))) / (2.0 * h);
  }
  const double scale = d ? std::max(fi.cwiseAbs().maxCoeff(), 1e-12) : 1.0;
  const double rel = d ? (fi - fd).cwiseAbs().maxCoeff() / scale : 0.0;
  auto r = make_report("fisher_finite_difference", rel, 0.0, tol, CheckKind::LessEqual);
  r.terms = {{"step", h}, {"fisher_max_abs", d ? fi.cwiseAbs().maxCoeff() : 0.0}};
  return r;
}

/// max_i C_i <= 0.
inline IdentityReport heat_capacity_sign(const ExpFamModel& model) {
  double worst = -kInf;
  for (std::size_t i = 0; i < model.dim(); ++i) worst = std::max(worst, heat_capacity(model, i).value);
  if (model.dim() == 0) worst = 0.0;
  return make_report("heat_capacity_sign", worst, 0.0, 0.0, CheckKind::LessEqual);
}

// Random instance suite ----------------------------------------------------

struct InstanceDescriptor {
  std::uint64_t seed = 0;
  std::size_t index = 0;
  std::size_t alphabet_size = 0;
  std::size_t dim = 0;
  std::string prior_mode;  // "uniform" or "dirichlet1"
};

struct RandomInstance {
  InstanceDescriptor descriptor;
  FiniteDistribution prior;
  FiniteDistribution data;  // a random P; A is its moment class
  ConstraintSet constraints;
  ExpFamModel model;        // a random member of the family, |lambda_i| <= 3
  ExpFamModel variational;  // same prior, other features, sign-definite energy
};

inline constexpr std::uint64_t kTagIdentities = 0x4944454e54495459ull;  // "IDENTITY"

namespace detail {

inline std::vector<double> dirichlet1(std::size_t n, CounterRng& rng) {
  std::vector<double> w(n);
  double s = 0.0;
  for (auto& x : w) s += (x = rng.exponential());
  for (auto& x : w) x /= s;
  return w;
}

inline Eigen::MatrixXd random_features(std::size_t d, std::size_t n, CounterRng& rng) {
  Eigen::MatrixXd f(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(n));
  for (Eigen::Index x = 0; x < f.cols(); ++x)
    for (Eigen::Index i = 0; i < f.rows(); ++i) f(i, x) = 2.0 * rng.uniform() - 1.0;
  return f;
}

inline Eigen::VectorXd random_lambda(std::size_t d, double bound, CounterRng& rng) {
  Eigen::VectorXd l(static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < l.size(); ++i) l(i) = bound * (2.0 * rng.uniform() - 1.0);
  return l;
}

inline bool bogoliubov_attainable(const ExpFamModel& target, const ExpFamModel& variational) {
  try {
    (void)bogoliubov(target, variational);
    return true;
  } catch (const DomainError&) {
    return false;
  }
}

}  // namespace detail

/// Instance `index` of the suite for `seed`: |X| in [3, max_alphabet],
/// d in [1, max_dim], even indices on a uniform prior, odd on a Dirichlet(1)
/// prior. The variational family is redrawn until both Bogoliubov energy
/// matchings are attainable.
inline RandomInstance random_instance(std::uint64_t seed, std::size_t index, std::size_t max_alphabet = 20,
                                      std::size_t max_dim = 4) {
  CounterRng rng(seed, derive_stream(kTagIdentities, index));
  const std::size_t n = 3 + std::size_t(rng.next_u64() % (max_alphabet - 2));
  const std::size_t d = 1 + std::size_t(rng.next_u64() % std::min(max_dim, n - 1));
  const bool uniform = index % 2 == 0;
  FiniteDistribution prior = uniform ? FiniteDistribution::uniform(n) : FiniteDistribution(detail::dirichlet1(n, rng));
  FiniteDistribution data(detail::dirichlet1(n, rng));
  FeatureSet f(detail::random_features(d, n, rng));
  ConstraintSet a = ConstraintSet::equalities(f, moments(data, f));
  // The upper matching needs psi . f' to take the sign of the target's prior
  // energy, so the variational energy is drawn sign-definite. Both model and
  // variational family are redrawn until the lower matching is attainable too.
  std::optional<ExpFamModel> model, variational;
  for (int attempt = 0; attempt < 1000 && !variational; ++attempt) {
    ExpFamModel m(prior, f, detail::random_lambda(d, 3.0, rng));
    const double sign = m.lambda().dot(moments(prior, f)) < 0.0 ? -1.0 : 1.0;
    const std::size_t dv = 1 + std::size_t(rng.next_u64() % 3);
    Eigen::MatrixXd fv = detail::random_features(dv, n, rng);
    fv = sign * (0.525 * Eigen::MatrixXd::Ones(fv.rows(), fv.cols()) + 0.475 * fv);
    Eigen::VectorXd psi = detail::random_lambda(dv, 1.45, rng);
    psi.array() += 1.55;
    ExpFamModel v(prior, FeatureSet(fv), psi);
    if (detail::bogoliubov_attainable(m, v)) {
      model.emplace(std::move(m));
      variational.emplace(std::move(v));
    }
  }
  if (!variational) throw DomainError("random_instance: no variational family with attainable energy matching");
  InstanceDescriptor desc{seed, index, n, d, uniform ? "uniform" : "dirichlet1"};
  return {desc, std::move(prior), std::move(data), std::move(a), std::move(*model), std::move(*variational)};
}

struct SuiteEntry {
  InstanceDescriptor descriptor;
  std::vector<IdentityReport> reports;
  bool pass() const {
    for (const auto& r : reports)
      if (!r.pass) return false;
    return true;
  }
};

/// Every diagnostic on one instance. The projection of the prior onto A is
/// the reference P*; the data P is a member of A by construction.
inline SuiteEntry run_identity_suite(const RandomInstance& inst, const SolverOptions& opts = {}) {
  SuiteEntry e{inst.descriptor, {}};
  const ProjectionResult star = project(inst.prior, inst.constraints, opts);
  e.reports.push_back(pythagorean(inst.data, star, inst.model));
  e.reports.push_back(robustness(inst.data, star.model, inst.model));
  e.reports.push_back(approximation_error_entropy(inst.data, star));
  e.reports.push_back(pretend_data_identity(inst.data, star, inst.model));
  const auto bg = bogoliubov(inst.model, inst.variational);
  e.reports.push_back(bg.upper);
  e.reports.push_back(bg.lower);
  e.reports.push_back(free_energy_regret(inst.data, inst.model));
  e.reports.push_back(heat_capacity_sign(inst.model));
  e.reports.push_back(fisher_finite_difference(inst.model));
  return e;
}

/// Instances [0, count) for `seed`, computed in parallel and returned in
/// index order.
inline std::vector<SuiteEntry> identity_suite(std::uint64_t seed, std::size_t count, std::size_t threads = 1,
                                              const SolverOptions& opts = {}) {
  std::vector<SuiteEntry> out(count);
  parallel_for_chunks(count, threads, [&](std::size_t i) { out[i] = run_identity_suite(random_instance(seed, i), opts); });
  return out;
}

}  // namespace maxent
