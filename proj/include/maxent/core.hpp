#pragma once

// Finite distributions, feature tables, moment constraints and the three
// information measures (entropy, cross entropy, relative entropy).
//
// All logarithms are natural. 0 log 0 is taken as 0, and a support violation
// yields +infinity rather than an exception.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace maxent {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Default tolerance for constraint membership tests.
inline constexpr double kMembershipTol = 1e-9;

/// Largest deviation of a probability vector's sum from 1 that is silently
/// renormalized at construction.
inline constexpr double kRenormalizeTol = 1e-9;

// Errors -------------------------------------------------------------------

/// Two objects that must share an outcome alphabet or feature dimension do not.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A value is outside the domain where an operation is defined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed user input (bad probabilities, schema violations, unknown labels).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerics -----------------------------------------------------------------

/// log(sum(exp(v))) with max subtraction. Returns -inf for an empty input or
/// when every entry is -inf.
inline double log_sum_exp(std::span<const double> v) {
  double hi = -kInf;
  for (double x : v) hi = std::max(hi, x);
  if (hi == -kInf) return -kInf;
  if (hi == kInf) return kInf;
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

/// Streaming log-sum-exp accumulator, optionally carrying exp-weighted sums
/// of side quantities so that normalized expectations E_w[g] can be formed in
/// a single pass without materializing the weights.
class LogSumExpAccumulator {
 public:
  explicit LogSumExpAccumulator(std::size_t n_side = 0) : side_(n_side, 0.0) {}

  void add(double log_w, std::span<const double> side = {}) {
    if (log_w == -kInf) return;
    if (log_w > max_) {
      const double scale = (max_ == -kInf) ? 0.0 : std::exp(max_ - log_w);
      sum_ *= scale;
      for (double& s : side_) s *= scale;
      max_ = log_w;
    }
    const double w = std::exp(log_w - max_);
    sum_ += w;
    for (std::size_t k = 0; k < side_.size(); ++k) side_[k] += w * side[k];
  }

  /// Merge another accumulator; the result does not depend on thread layout
  /// provided merges happen in a fixed order.
  void merge(const LogSumExpAccumulator& other) {
    if (other.max_ == -kInf) return;
    if (other.max_ > max_) {
      const double scale = (max_ == -kInf) ? 0.0 : std::exp(max_ - other.max_);
      sum_ *= scale;
      for (double& s : side_) s *= scale;
      max_ = other.max_;
    }
    const double scale = std::exp(other.max_ - max_);
    sum_ += scale * other.sum_;
    for (std::size_t k = 0; k < side_.size(); ++k) side_[k] += scale * other.side_[k];
  }

  double log_total() const { return max_ == -kInf ? -kInf : max_ + std::log(sum_); }

  /// Weighted mean of side quantity k.
  double mean(std::size_t k) const { return side_[k] / sum_; }

  bool empty() const { return max_ == -kInf; }

 private:
  double max_ = -kInf;
  double sum_ = 0.0;
  std::vector<double> side_;
};

// Types --------------------------------------------------------------------

inline std::vector<std::string> default_labels(std::size_t n) {
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(std::to_string(i));
  return out;
}

/// A probability vector over an explicit, ordered, finite outcome alphabet.
///
/// Both linear and log probabilities are stored; the information measures read
/// the log domain so that alphabets of 10^4..10^5 outcomes do not underflow.
class FiniteDistribution {
 public:
  FiniteDistribution(std::vector<std::string> outcomes, std::vector<double> probs)
      : outcomes_(std::make_shared<const std::vector<std::string>>(std::move(outcomes))),
        probs_(std::move(probs)) {
    validate_labels();
    if (probs_.size() != outcomes_->size())
      throw ShapeError("FiniteDistribution: " + std::to_string(probs_.size()) +
                       " probabilities for " + std::to_string(outcomes_->size()) + " outcomes");
    double total = 0.0;
    for (double p : probs_) {
      if (!std::isfinite(p) || p < 0.0)
        throw InputError("FiniteDistribution: probabilities must be finite and non-negative");
      total += p;
    }
    if (std::abs(total - 1.0) > kRenormalizeTol)
      throw InputError("FiniteDistribution: probabilities sum to " + std::to_string(total) +
                       ", not 1");
    // Sums already within rounding of 1 are kept as given.
    const bool rescale = std::abs(total - 1.0) > 1e-14;
    log_probs_.resize(probs_.size());
    for (std::size_t i = 0; i < probs_.size(); ++i) {
      if (rescale) probs_[i] /= total;
      log_probs_[i] = probs_[i] > 0.0 ? std::log(probs_[i]) : -kInf;
    }
  }

  /// Distribution with default labels "0", "1", ...
  explicit FiniteDistribution(const std::vector<double>& probs)
      : FiniteDistribution(default_labels(probs.size()), probs) {}

  /// Build from unnormalized log-weights; normalization happens in the log domain.
  static FiniteDistribution from_log_weights(std::shared_ptr<const std::vector<std::string>> outcomes,
                                             std::vector<double> log_weights) {
    if (log_weights.size() != outcomes->size())
      throw ShapeError("from_log_weights: size mismatch");
    // Shift by the maximum first so large offsets cancel exactly.
    double top = -kInf;
    for (double w : log_weights) {
      if (std::isnan(w) || w == kInf) throw InputError("from_log_weights: log-weights must be finite or -inf");
      top = std::max(top, w);
    }
    if (!std::isfinite(top)) throw DomainError("from_log_weights: total weight is zero or infinite");
    for (double& w : log_weights) w -= top;
    const double lz = log_sum_exp(log_weights);
    FiniteDistribution d;
    d.outcomes_ = std::move(outcomes);
    d.log_probs_ = std::move(log_weights);
    d.probs_.resize(d.log_probs_.size());
    for (std::size_t i = 0; i < d.log_probs_.size(); ++i) {
      d.log_probs_[i] -= lz;
      d.probs_[i] = std::exp(d.log_probs_[i]);
    }
    return d;
  }

  static FiniteDistribution from_log_weights(std::vector<std::string> outcomes,
                                             std::vector<double> log_weights) {
    auto labels = std::make_shared<const std::vector<std::string>>(std::move(outcomes));
    FiniteDistribution probe;
    probe.outcomes_ = labels;
    probe.validate_labels();
    return from_log_weights(std::move(labels), std::move(log_weights));
  }

  static FiniteDistribution uniform(std::vector<std::string> outcomes) {
    const std::size_t n = outcomes.size();
    if (n == 0) throw InputError("uniform: empty alphabet");
    return FiniteDistribution(std::move(outcomes), std::vector<double>(n, 1.0 / double(n)));
  }

  static FiniteDistribution uniform(std::size_t n) { return uniform(default_labels(n)); }

  static FiniteDistribution point_mass(std::size_t n, std::size_t at) {
    std::vector<double> p(n, 0.0);
    p.at(at) = 1.0;
    return FiniteDistribution(std::move(p));
  }

  std::size_t size() const { return probs_.size(); }
  const std::vector<std::string>& outcomes() const { return *outcomes_; }
  const std::shared_ptr<const std::vector<std::string>>& outcomes_ptr() const { return outcomes_; }
  std::span<const double> probs() const { return probs_; }
  std::span<const double> log_probs() const { return log_probs_; }
  double prob(std::size_t i) const { return probs_[i]; }
  double log_prob(std::size_t i) const { return log_probs_[i]; }

  bool same_alphabet(const FiniteDistribution& other) const {
    return outcomes_ == other.outcomes_ || *outcomes_ == *other.outcomes_;
  }

  /// Indices with positive probability.
  std::vector<std::size_t> support() const {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < probs_.size(); ++i)
      if (probs_[i] > 0.0) s.push_back(i);
    return s;
  }

  /// True when every outcome carries the same mass (within 1e-12).
  bool is_uniform() const {
    const double u = 1.0 / double(size());
    return std::all_of(probs_.begin(), probs_.end(),
                       [u](double p) { return std::abs(p - u) <= 1e-12; });
  }

  std::optional<std::size_t> index_of(const std::string& label) const {
    auto it = std::find(outcomes_->begin(), outcomes_->end(), label);
    if (it == outcomes_->end()) return std::nullopt;
    return std::size_t(it - outcomes_->begin());
  }

 private:
  FiniteDistribution() = default;

  void validate_labels() const {
    if (outcomes_->empty()) throw InputError("FiniteDistribution: empty alphabet");
    std::unordered_set<std::string> seen;
    for (const auto& s : *outcomes_)
      if (!seen.insert(s).second) throw InputError("FiniteDistribution: duplicate outcome '" + s + "'");
  }

  std::shared_ptr<const std::vector<std::string>> outcomes_;
  std::vector<double> probs_;
  std::vector<double> log_probs_;
};

/// d real-valued feature functions tabulated over an alphabet:
/// matrix(i, x) = f_i(x).
class FeatureSet {
 public:
  FeatureSet() = default;

  FeatureSet(std::vector<std::string> names, Eigen::MatrixXd matrix)
      : names_(std::move(names)), matrix_(std::move(matrix)) {
    if (names_.size() != std::size_t(matrix_.rows()))
      throw ShapeError("FeatureSet: " + std::to_string(names_.size()) + " names for " +
                       std::to_string(matrix_.rows()) + " feature rows");
    if (!matrix_.allFinite()) throw InputError("FeatureSet: non-finite feature value");
  }

  /// Anonymous features named f0, f1, ...
  explicit FeatureSet(const Eigen::MatrixXd& matrix) : FeatureSet(auto_names(matrix.rows()), matrix) {}

  /// d = 0 features over an alphabet of the given size.
  static FeatureSet empty(std::size_t alphabet_size) {
    return FeatureSet({}, Eigen::MatrixXd(0, Eigen::Index(alphabet_size)));
  }

  std::size_t dim() const { return std::size_t(matrix_.rows()); }
  std::size_t alphabet_size() const { return std::size_t(matrix_.cols()); }
  const std::vector<std::string>& names() const { return names_; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  double operator()(std::size_t i, std::size_t x) const { return matrix_(Eigen::Index(i), Eigen::Index(x)); }
  Eigen::VectorXd column(std::size_t x) const { return matrix_.col(Eigen::Index(x)); }

  /// Feature subset, in the given order.
  FeatureSet select(std::span<const std::size_t> rows) const {
    Eigen::MatrixXd m(Eigen::Index(rows.size()), matrix_.cols());
    std::vector<std::string> nm;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      m.row(Eigen::Index(k)) = matrix_.row(Eigen::Index(rows[k]));
      nm.push_back(names_.at(rows[k]));
    }
    return FeatureSet(std::move(nm), std::move(m));
  }

  bool operator==(const FeatureSet& o) const {
    return matrix_.rows() == o.matrix_.rows() && matrix_.cols() == o.matrix_.cols() &&
           matrix_ == o.matrix_;
  }

 private:
  static std::vector<std::string> auto_names(Eigen::Index d) {
    std::vector<std::string> out;
    for (Eigen::Index i = 0; i < d; ++i) out.push_back("f" + std::to_string(i));
    return out;
  }

  std::vector<std::string> names_;
  Eigen::MatrixXd matrix_;
};

enum class ConstraintKind { Eq, Ge, Le };

inline const char* to_string(ConstraintKind k) {
  switch (k) {
    case ConstraintKind::Eq: return "eq";
    case ConstraintKind::Ge: return "ge";
    case ConstraintKind::Le: return "le";
  }
  return "?";
}

/// Moment constraints E_Q[f_i] {=, >=, <=} alpha_i defining a convex set of
/// distributions.
class ConstraintSet {
 public:
  ConstraintSet() = default;

  ConstraintSet(FeatureSet features, std::vector<ConstraintKind> kinds, Eigen::VectorXd targets)
      : features_(std::move(features)), kinds_(std::move(kinds)), targets_(std::move(targets)) {
    if (kinds_.size() != features_.dim() || std::size_t(targets_.size()) != features_.dim())
      throw ShapeError("ConstraintSet: kinds/targets length must equal feature count " +
                       std::to_string(features_.dim()));
    if (!targets_.allFinite()) throw InputError("ConstraintSet: non-finite target");
  }

  /// All-equality constraints E[f] = alpha.
  static ConstraintSet equalities(FeatureSet features, Eigen::VectorXd targets) {
    std::vector<ConstraintKind> kinds(features.dim(), ConstraintKind::Eq);
    return ConstraintSet(std::move(features), std::move(kinds), std::move(targets));
  }

  /// The unconstrained set (the whole simplex).
  static ConstraintSet unconstrained(std::size_t alphabet_size) {
    return ConstraintSet(FeatureSet::empty(alphabet_size), {}, Eigen::VectorXd(0));
  }

  const FeatureSet& features() const { return features_; }
  const std::vector<ConstraintKind>& kinds() const { return kinds_; }
  const Eigen::VectorXd& targets() const { return targets_; }
  std::size_t size() const { return kinds_.size(); }
  std::size_t alphabet_size() const { return features_.alphabet_size(); }

  bool equality_only() const {
    return std::all_of(kinds_.begin(), kinds_.end(), [](ConstraintKind k) { return k == ConstraintKind::Eq; });
  }

  /// Signed slack of each constraint at moment vector m: Eq -> m - alpha,
  /// Ge -> m - alpha, Le -> alpha - m. Ge/Le are satisfied when slack >= 0.
  Eigen::VectorXd slack(const Eigen::VectorXd& m) const {
    Eigen::VectorXd s(static_cast<Eigen::Index>(size()));
    for (std::size_t i = 0; i < size(); ++i) {
      const auto k = Eigen::Index(i);
      s(k) = kinds_[i] == ConstraintKind::Le ? targets_(k) - m(k) : m(k) - targets_(k);
    }
    return s;
  }

  /// Componentwise violation: Eq -> m - alpha, Ge -> min(0, m - alpha),
  /// Le -> max(0, m - alpha).
  Eigen::VectorXd violation(const Eigen::VectorXd& m) const {
    Eigen::VectorXd v = m - targets_;
    for (std::size_t i = 0; i < size(); ++i) {
      auto& x = v(Eigen::Index(i));
      if (kinds_[i] == ConstraintKind::Ge) x = std::min(0.0, x);
      if (kinds_[i] == ConstraintKind::Le) x = std::max(0.0, x);
    }
    return v;
  }

  bool contains_moments(const Eigen::VectorXd& m, double tol = kMembershipTol) const {
    const Eigen::VectorXd s = slack(m);
    for (std::size_t i = 0; i < size(); ++i) {
      const double si = s(Eigen::Index(i));
      if (kinds_[i] == ConstraintKind::Eq ? std::abs(si) > tol : si < -tol) return false;
    }
    return true;
  }

  /// Constraint subset, in the given order.
  ConstraintSet select(std::span<const std::size_t> rows) const {
    std::vector<ConstraintKind> k;
    Eigen::VectorXd t(Eigen::Index(rows.size()));
    for (std::size_t j = 0; j < rows.size(); ++j) {
      k.push_back(kinds_.at(rows[j]));
      t(Eigen::Index(j)) = targets_(Eigen::Index(rows[j]));
    }
    return ConstraintSet(features_.select(rows), std::move(k), std::move(t));
  }

 private:
  FeatureSet features_;
  std::vector<ConstraintKind> kinds_;
  Eigen::VectorXd targets_;
};

/// Histogram of n observations over an alphabet.
class EmpiricalMeasure {
 public:
  explicit EmpiricalMeasure(std::vector<std::int64_t> counts) : counts_(std::move(counts)) {
    if (counts_.empty()) throw InputError("EmpiricalMeasure: empty alphabet");
    for (auto c : counts_) {
      if (c < 0) throw InputError("EmpiricalMeasure: negative count");
      n_ += c;
    }
    if (n_ < 1) throw InputError("EmpiricalMeasure: total count must be at least 1");
  }

  /// Tally newline-style sample labels against an alphabet.
  static EmpiricalMeasure from_samples(std::span<const std::string> samples,
                                       const std::vector<std::string>& alphabet) {
    std::vector<std::int64_t> counts(alphabet.size(), 0);
    for (const auto& s : samples) {
      auto it = std::find(alphabet.begin(), alphabet.end(), s);
      if (it == alphabet.end()) throw InputError("unknown outcome label '" + s + "'");
      ++counts[std::size_t(it - alphabet.begin())];
    }
    return EmpiricalMeasure(std::move(counts));
  }

  std::span<const std::int64_t> counts() const { return counts_; }
  std::int64_t count(std::size_t i) const { return counts_[i]; }
  std::int64_t n() const { return n_; }
  std::size_t size() const { return counts_.size(); }

  FiniteDistribution to_distribution(std::vector<std::string> outcomes) const {
    std::vector<double> p(counts_.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = double(counts_[i]) / double(n_);
    return FiniteDistribution(std::move(outcomes), std::move(p));
  }

  FiniteDistribution to_distribution() const { return to_distribution(default_labels(size())); }

 private:
  std::vector<std::int64_t> counts_;
  std::int64_t n_ = 0;
};

// Measures -----------------------------------------------------------------

inline void require_same_alphabet(const FiniteDistribution& p, const FiniteDistribution& q,
                                  const char* where) {
  if (!p.same_alphabet(q)) throw ShapeError(std::string(where) + ": alphabet mismatch");
}

/// H(P) = -sum P log P, in nats.
inline double entropy(const FiniteDistribution& p) {
  double h = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p.prob(i) > 0.0) h -= p.prob(i) * p.log_prob(i);
  return h;
}

/// H(P, Q) = E_{x~P}[-log Q(x)]; +inf when P puts mass where Q does not.
inline double cross_entropy(const FiniteDistribution& p, const FiniteDistribution& q) {
  require_same_alphabet(p, q, "cross_entropy");
  double h = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.prob(i) == 0.0) continue;
    if (q.prob(i) == 0.0) return kInf;
    h -= p.prob(i) * q.log_prob(i);
  }
  return h;
}

/// D(Q || P) = E_{x~Q}[log Q(x)/P(x)]; +inf on support violation.
inline double kl_divergence(const FiniteDistribution& q, const FiniteDistribution& p) {
  require_same_alphabet(q, p, "kl_divergence");
  double d = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q.prob(i) == 0.0) continue;
    if (p.prob(i) == 0.0) return kInf;
    d += q.prob(i) * (q.log_prob(i) - p.log_prob(i));
  }
  return std::max(d, 0.0);
}

inline double total_variation(const FiniteDistribution& p, const FiniteDistribution& q) {
  require_same_alphabet(p, q, "total_variation");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p.prob(i) - q.prob(i));
  return 0.5 * s;
}

inline double max_abs_difference(const FiniteDistribution& p, const FiniteDistribution& q) {
  require_same_alphabet(p, q, "max_abs_difference");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s = std::max(s, std::abs(p.prob(i) - q.prob(i)));
  return s;
}

/// Feature expectations E_P[f_i].
inline Eigen::VectorXd moments(const FiniteDistribution& p, const FeatureSet& f) {
  if (f.alphabet_size() != p.size())
    throw ShapeError("moments: feature table has " + std::to_string(f.alphabet_size()) +
                     " columns, distribution has " + std::to_string(p.size()) + " outcomes");
  const Eigen::Map<const Eigen::VectorXd> pv(p.probs().data(), Eigen::Index(p.size()));
  return f.matrix() * pv;
}

/// Moments of a histogram, sum_x (c_x/n) f(x).
inline Eigen::VectorXd moments(std::span<const std::int64_t> counts, std::int64_t n, const FeatureSet& f) {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(Eigen::Index(f.dim()));
  for (std::size_t x = 0; x < counts.size(); ++x)
    if (counts[x] != 0) m += double(counts[x]) * f.matrix().col(Eigen::Index(x));
  return m / double(n);
}

inline bool constraint_contains(const ConstraintSet& a, const FiniteDistribution& q,
                                double tol = kMembershipTol) {
  if (tol < 0.0) throw DomainError("constraint_contains: negative tolerance");
  if (a.alphabet_size() != q.size()) throw ShapeError("constraint_contains: alphabet size mismatch");
  return a.contains_moments(moments(q, a.features()), tol);
}

/// w P + (1 - w) Q.
inline FiniteDistribution mix(const FiniteDistribution& p, const FiniteDistribution& q, double w) {
  require_same_alphabet(p, q, "mix");
  if (!(w >= 0.0 && w <= 1.0)) throw DomainError("mix: weight outside [0, 1]");
  std::vector<double> m(p.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = w * p.prob(i) + (1.0 - w) * q.prob(i);
  return FiniteDistribution(p.outcomes(), std::move(m));
}

/// P restricted to a subset of outcomes and renormalized; other outcomes get 0.
inline FiniteDistribution restrict_to(const FiniteDistribution& p, std::span<const std::size_t> keep) {
  std::vector<double> lw(p.size(), -kInf);
  for (auto i : keep) lw.at(i) = p.log_prob(i);
  return FiniteDistribution::from_log_weights(p.outcomes_ptr(), std::move(lw));
}

}  // namespace maxent
