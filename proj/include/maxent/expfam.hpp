#pragma once

// Exponential families P_lambda(x) = P0(x) exp(lambda . f(x) - A(lambda)) over a
// finite alphabet, and their analytics.
//
// The prior P0 is a normalized distribution rather than a counting measure,
// so entropies carry an explicit H(., P0) term and the free energy is
// measured relative to the prior: F(P) = U(P) + D(P || P0). With this
// convention F(P_lambda) = -A(lambda) and F(P) - F(P_lambda) = D(P || P_lambda)
// for every prior.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "maxent/core.hpp"

namespace maxent {

class ExpFamModel {
 public:
  ExpFamModel(FiniteDistribution prior, FeatureSet features, Eigen::VectorXd lambda)
      : prior_(std::move(prior)), features_(std::move(features)), lambda_(std::move(lambda)),
        dist_(build(prior_, features_, lambda_, log_partition_)) {}

  /// lambda = 0, i.e. the prior itself.
  ExpFamModel(FiniteDistribution prior, FeatureSet features)
      : ExpFamModel(std::move(prior), features, Eigen::VectorXd::Zero(Eigen::Index(features.dim()))) {}

  const FiniteDistribution& prior() const { return prior_; }
  const FeatureSet& features() const { return features_; }
  const Eigen::VectorXd& lambda() const { return lambda_; }
  double log_partition() const { return log_partition_; }
  const FiniteDistribution& distribution() const { return dist_; }
  FiniteDistribution to_distribution() const { return dist_; }
  std::size_t dim() const { return features_.dim(); }

  /// Same prior and features, new natural parameters.
  ExpFamModel with_lambda(Eigen::VectorXd lambda) const { return ExpFamModel(prior_, features_, std::move(lambda)); }

  bool same_family(const ExpFamModel& o) const {
    if (!prior_.same_alphabet(o.prior_) || !(features_ == o.features_)) return false;
    for (std::size_t i = 0; i < prior_.size(); ++i)
      if (prior_.prob(i) != o.prior_.prob(i)) return false;
    return true;
  }

 private:
  static FiniteDistribution build(const FiniteDistribution& prior, const FeatureSet& f,
                                  const Eigen::VectorXd& lambda, double& log_partition) {
    if (f.alphabet_size() != prior.size())
      throw ShapeError("ExpFamModel: features cover " + std::to_string(f.alphabet_size()) +
                       " outcomes, prior has " + std::to_string(prior.size()));
    if (std::size_t(lambda.size()) != f.dim())
      throw ShapeError("ExpFamModel: lambda has " + std::to_string(lambda.size()) +
                       " entries for " + std::to_string(f.dim()) + " features");
    if (!lambda.allFinite()) throw DomainError("ExpFamModel: non-finite natural parameter");
    std::vector<double> lw(prior.size());
    const Eigen::RowVectorXd energy = lambda.transpose() * f.matrix();
    for (std::size_t x = 0; x < lw.size(); ++x)
      lw[x] = prior.prob(x) > 0.0 ? prior.log_prob(x) + energy(Eigen::Index(x)) : -kInf;
    log_partition = log_sum_exp(lw);
    return FiniteDistribution::from_log_weights(prior.outcomes_ptr(), std::move(lw));
  }

  FiniteDistribution prior_;
  FeatureSet features_;
  Eigen::VectorXd lambda_;
  double log_partition_ = 0.0;
  FiniteDistribution dist_;
};

/// A(lambda) = log sum_x P0(x) exp(lambda . f(x)).
inline double log_partition(const ExpFamModel& m) { return m.log_partition(); }

/// Gradient of A: E_{P_lambda}[f].
inline Eigen::VectorXd mean_parameters(const ExpFamModel& m) {
  return moments(m.distribution(), m.features());
}

/// Hessian of A: cov_{P_lambda}[f], accumulated around the mean.
inline Eigen::MatrixXd fisher_information(const ExpFamModel& m) {
  const auto& f = m.features().matrix();
  const Eigen::VectorXd mu = mean_parameters(m);
  const Eigen::Index d = f.rows();
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  const auto& p = m.distribution();
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p.prob(x) == 0.0) continue;
    const Eigen::VectorXd c = f.col(Eigen::Index(x)) - mu;
    cov.noalias() += p.prob(x) * c * c.transpose();
  }
  return 0.5 * (cov + cov.transpose());
}

struct EnergyReport {
  double internal_energy = 0.0;       // U(P) = -lambda . E_P[f]
  double free_energy = 0.0;           // U(P) + D(P || P0)
  double rel_entropy_to_prior = 0.0;  // D(P || P0)
  double entropy = 0.0;               // H(P)
};

/// U(P) = -lambda . E_P[f].
inline double internal_energy(const ExpFamModel& m, const FiniteDistribution& p) {
  if (p.size() != m.prior().size()) throw ShapeError("internal_energy: alphabet mismatch");
  return -m.lambda().dot(moments(p, m.features()));
}

inline EnergyReport energies(const ExpFamModel& m, const FiniteDistribution& p) {
  require_same_alphabet(p, m.prior(), "energies");
  EnergyReport r;
  r.internal_energy = internal_energy(m, p);
  r.rel_entropy_to_prior = kl_divergence(p, m.prior());
  r.free_energy = r.internal_energy + r.rel_entropy_to_prior;
  r.entropy = entropy(p);
  return r;
}

/// H(P_lambda) = H(P_lambda, P0) - lambda . grad A + A.
inline double model_entropy(const ExpFamModel& m) {
  const double h_prior = cross_entropy(m.distribution(), m.prior());
  return std::max(0.0, h_prior - m.lambda().dot(mean_parameters(m)) + m.log_partition());
}

/// H(P, P_lambda) = H(P, P0) + U(P) + A; +inf when P leaves the prior's support.
inline double model_cross_entropy(const ExpFamModel& m, const FiniteDistribution& p) {
  require_same_alphabet(p, m.prior(), "model_cross_entropy");
  const double h_prior = cross_entropy(p, m.prior());
  if (!std::isfinite(h_prior)) return kInf;
  return h_prior + internal_energy(m, p) + m.log_partition();
}

/// D(P_star || P_lambda) = (lambda* - lambda) . alpha + A(lambda) - A(lambda*),
/// alpha the mean parameters of the star model.
inline double deviance(const ExpFamModel& star, const ExpFamModel& m) {
  if (!star.same_family(m)) throw ShapeError("deviance: models belong to different families");
  const Eigen::VectorXd alpha = mean_parameters(star);
  const double d = (star.lambda() - m.lambda()).dot(alpha) + m.log_partition() - star.log_partition();
  return std::max(d, 0.0);
}

/// A(lambda + theta) - A(lambda).
inline double cgf(const ExpFamModel& m, const Eigen::VectorXd& theta) {
  if (std::size_t(theta.size()) != m.dim()) throw ShapeError("cgf: theta dimension mismatch");
  return m.with_lambda(m.lambda() + theta).log_partition() - m.log_partition();
}

/// A(lambda + theta) - A(lambda) - theta . grad A(lambda): the Bregman divergence
/// of A, which equals D(P_lambda || P_{lambda+theta}).
inline double centered_cgf(const ExpFamModel& m, const Eigen::VectorXd& theta) {
  return cgf(m, theta) - theta.dot(mean_parameters(m));
}

struct HeatCapacity {
  double value = 0.0;                 // -lambda_i^2 var[f_i] <= 0
  std::optional<double> temperature;  // 1 / lambda_i; empty when lambda_i = 0
};

/// d E[f_i] / d T_i with T_i = 1 / lambda_i.
inline HeatCapacity heat_capacity(const ExpFamModel& m, std::size_t i) {
  if (i >= m.dim()) throw std::out_of_range("heat_capacity: feature index " + std::to_string(i));
  const auto k = Eigen::Index(i);
  const double li = m.lambda()(k);
  const double var = fisher_information(m)(k, k);
  HeatCapacity h;
  h.value = -li * li * std::max(var, 0.0);
  if (li != 0.0) h.temperature = 1.0 / li;
  return h;
}

}  // namespace maxent
