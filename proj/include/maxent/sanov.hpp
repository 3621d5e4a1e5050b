#pragma once

// Exact small-n large deviations: enumerate every histogram of n draws over
// a D-letter alphabet, accumulate Pr(empirical measure in A) in the log
// domain, and compare with the projection P* of P onto A.
//
// For half-space events the empirical moments of the conditioned law need not
// sit on the targets, so the per-sample residual carries a moment term:
//     (1/n) log Pr + D(P*||P) + (1/n) D(mu_A || P*^n) + lambda* . (E_mu[m] - alpha) = 0
// with lambda* = 0 on inactive constraints. For equality events the last
// term vanishes. `residual` is the sum of the last two terms.

#include <cmath>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "maxent/boltzmann.hpp"
#include "maxent/core.hpp"
#include "maxent/projection.hpp"
#include "maxent/random.hpp"
#include "maxent/report.hpp"

namespace maxent {

class CapExceeded : public DomainError {
 public:
  using DomainError::DomainError;
};

struct SanovOptions {
  double cap = 2e6;  // maximum number of histograms to enumerate
  double membership_tol = kMembershipTol;
  std::size_t threads = 1;
  SolverOptions solver;
};

enum class SanovMethod { ExactEnumeration, MonteCarlo };

inline const char* to_string(SanovMethod m) {
  return m == SanovMethod::ExactEnumeration ? "ExactEnumeration" : "MonteCarlo";
}

struct SanovReport {
  std::int64_t n = 0;
  SanovMethod method = SanovMethod::ExactEnumeration;
  double log_prob = -kInf;            // log Pr(empirical measure in A)
  double rate = kNaN;                 // D(P* || P)
  double residual = kNaN;             // divergence_to_product + moment_excess
  double divergence_to_product = kNaN;  // (1/n) D(mu_A || P*^n)
  double moment_excess = kNaN;        // lambda* . (E_mu[m] - alpha)
  double closure = kNaN;              // (1/n) log_prob + rate + residual
  std::uint64_t num_histograms_in_A = 0;
  std::uint64_t num_histograms = 0;
  bool empty_event = false;
  bool boundary = false;              // P* only reached in the limit
  ProjectionStatus star_status = ProjectionStatus::Infeasible;
  Eigen::VectorXd lambda_star;

  // Monte Carlo only.
  std::uint64_t trials = 0;
  std::uint64_t hits = 0;
  double prob_low = kNaN;   // Wilson 95% interval on the probability
  double prob_high = kNaN;
  bool estimate_defined = true;  // false when there were no hits
  bool residual_estimated = false;

  double prob() const { return std::exp(log_prob); }
};

struct ConditionalLaw {
  std::vector<std::vector<std::int64_t>> histograms;
  std::vector<double> masses;
  std::vector<double> log_masses;
};

/// C(n + D - 1, D - 1), as a double.
inline double composition_count(std::int64_t n, std::size_t d) {
  if (d == 0) return 0.0;
  return std::round(std::exp(std::lgamma(double(n + std::int64_t(d))) - std::lgamma(double(n) + 1.0) -
                             std::lgamma(double(d))));
}

namespace detail {

/// Calls fn(counts) for every composition of n into counts.size() parts with
/// counts[0] == first. Later parts vary fastest.
inline void for_each_histogram(std::int64_t n, std::int64_t first, std::vector<std::int64_t>& counts,
                               const std::function<void(const std::vector<std::int64_t>&)>& fn) {
  const std::size_t d = counts.size();
  counts[0] = first;
  if (d == 1) {
    if (first == n) fn(counts);
    return;
  }
  std::function<void(std::size_t, std::int64_t)> rec = [&](std::size_t pos, std::int64_t rem) {
    if (pos == d - 1) {
      counts[pos] = rem;
      fn(counts);
      return;
    }
    for (std::int64_t c = rem; c >= 0; --c) {
      counts[pos] = c;
      rec(pos + 1, rem - c);
    }
  };
  rec(1, n - first);
}

/// Precomputed per-histogram quantities for one (P, A, n).
class HistogramScorer {
 public:
  HistogramScorer(const FiniteDistribution& p, const ConstraintSet& a, std::int64_t n, double tol)
      : p_(p), a_(a), n_(n), tol_(tol), log_fact_(std::size_t(n) + 1) {
    for (std::int64_t k = 0; k <= n; ++k) log_fact_[std::size_t(k)] = std::lgamma(double(k) + 1.0);
    moments_.resize(a.size());
  }

  /// Moments c/n . F into `moments()`; returns membership in A.
  bool in_event(const std::vector<std::int64_t>& c) {
    const auto& f = a_.features().matrix();
    for (std::size_t k = 0; k < a_.size(); ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < c.size(); ++i)
        if (c[i]) s += double(c[i]) * f(Eigen::Index(k), Eigen::Index(i));
      moments_[k] = s / double(n_);
    }
    for (std::size_t k = 0; k < a_.size(); ++k) {
      const double sl = a_.kinds()[k] == ConstraintKind::Le ? a_.targets()(Eigen::Index(k)) - moments_[k]
                                                            : moments_[k] - a_.targets()(Eigen::Index(k));
      if (a_.kinds()[k] == ConstraintKind::Eq ? std::abs(sl) > tol_ : sl < -tol_) return false;
    }
    return true;
  }

  double log_multinomial(const std::vector<std::int64_t>& c) const {
    double s = log_fact_[std::size_t(n_)];
    for (auto k : c) s -= log_fact_[std::size_t(k)];
    return s;
  }

  /// sum_i c_i log q_i, -inf if a positive count hits q_i = 0.
  static double log_power(const std::vector<std::int64_t>& c, const FiniteDistribution& q) {
    double s = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (!c[i]) continue;
      if (q.prob(i) == 0.0) return -kInf;
      s += double(c[i]) * q.log_prob(i);
    }
    return s;
  }

  const std::vector<double>& moments() const { return moments_; }
  const FiniteDistribution& p() const { return p_; }

 private:
  const FiniteDistribution& p_;
  const ConstraintSet& a_;
  std::int64_t n_;
  double tol_;
  std::vector<double> log_fact_;
  std::vector<double> moments_;
};

inline void check_instance(const FiniteDistribution& p, const ConstraintSet& a, std::int64_t n, const SanovOptions& opts,
                           const char* who) {
  if (a.alphabet_size() != p.size()) throw ShapeError(std::string(who) + ": alphabet size mismatch");
  if (n < 1) throw DomainError(std::string(who) + ": n must be >= 1");
  const double count = composition_count(n, p.size());
  if (count > opts.cap)
    throw CapExceeded(std::string(who) + ": " + detail::fmt_double(count) + " histograms exceed the cap of " +
                      detail::fmt_double(opts.cap));
}

/// Event statistics accumulated over the histograms in one event.
/// Side sums: [0] = sum_i c_i (log P - log P*)_i, [1..d] = moments of a
/// reference constraint set.
struct EventSums {
  LogSumExpAccumulator acc;
  std::uint64_t count = 0;
  explicit EventSums(std::size_t d) : acc(d + 1) {}
  void merge(const EventSums& o) {
    acc.merge(o.acc);
    count += o.count;
  }
};

struct ClosureTerms {
  double divergence_to_product = kNaN;
  double moment_excess = kNaN;
};

/// (1/n) D(mu||P*^n) and lambda* . (E_mu m - alpha) from the event sums.
inline ClosureTerms closure_terms(const EventSums& s, std::int64_t n, const ProjectionResult& star) {
  ClosureTerms t;
  const double log_prob = s.acc.log_total();
  t.divergence_to_product = (s.acc.mean(0) - log_prob) / double(n);
  double ex = 0.0;
  for (Eigen::Index k = 0; k < star.lambda_star.size(); ++k) {
    const double l = star.lambda_star(k);
    if (l != 0.0) ex += l * (s.acc.mean(std::size_t(k) + 1) - star.constraints.targets()(k));
  }
  t.moment_excess = ex;
  return t;
}

inline constexpr std::uint64_t kTagMonteCarlo = 0x4d4f4e5445434152ull;  // "MONTECAR"

}  // namespace detail

/// Exact Pr(empirical measure of n draws from P lies in A), with the closure
/// terms against the projection of P onto A. The event sums are reduced over
/// blocks of histograms sharing their first count, in block order.
inline SanovReport enumerate_event(const FiniteDistribution& p, const ConstraintSet& a, std::int64_t n,
                                   const SanovOptions& opts = {}) {
  detail::check_instance(p, a, n, opts, "enumerate_event");
  SanovReport r;
  r.n = n;
  r.method = SanovMethod::ExactEnumeration;
  r.num_histograms = std::uint64_t(composition_count(n, p.size()));
  const ProjectionResult star = project_inequality(p, a, opts.solver);
  r.star_status = star.status;
  r.boundary = star.status == ProjectionStatus::BoundaryNonattained;
  r.lambda_star = star.lambda_star;
  r.rate = star.min_divergence;
  const FiniteDistribution& ps = star.distribution();
  const std::size_t d = a.size();

  const std::size_t blocks = std::size_t(n) + 1;
  std::vector<detail::EventSums> parts(blocks, detail::EventSums(d));
  parallel_for_chunks(blocks, opts.threads, [&](std::size_t b) {
    detail::HistogramScorer sc(p, a, n, opts.membership_tol);
    std::vector<std::int64_t> counts(p.size());
    std::vector<double> side(d + 1);
    auto& part = parts[b];
    detail::for_each_histogram(n, std::int64_t(b), counts, [&](const std::vector<std::int64_t>& c) {
      if (!sc.in_event(c)) return;
      const double lp = detail::HistogramScorer::log_power(c, p);
      if (lp == -kInf) return;
      const double ls = detail::HistogramScorer::log_power(c, ps);
      side[0] = lp - ls;
      for (std::size_t k = 0; k < d; ++k) side[k + 1] = sc.moments()[k];
      part.acc.add(sc.log_multinomial(c) + lp, side);
      ++part.count;
    });
  });
  detail::EventSums total(d);
  for (const auto& part : parts) total.merge(part);

  r.num_histograms_in_A = total.count;
  r.log_prob = total.acc.log_total();
  if (total.acc.empty()) {
    r.empty_event = true;
    return r;
  }
  if (!star.solved()) return r;
  const auto t = detail::closure_terms(total, n, star);
  r.divergence_to_product = t.divergence_to_product;
  r.moment_excess = t.moment_excess;
  r.residual = t.divergence_to_product + t.moment_excess;
  r.closure = r.log_prob / double(n) + r.rate + r.residual;
  return r;
}

/// The law of the histogram given that it falls in A.
inline ConditionalLaw conditional_law(const FiniteDistribution& p, const ConstraintSet& a, std::int64_t n,
                                      const SanovOptions& opts = {}) {
  detail::check_instance(p, a, n, opts, "conditional_law");
  ConditionalLaw law;
  detail::HistogramScorer sc(p, a, n, opts.membership_tol);
  std::vector<std::int64_t> counts(p.size());
  for (std::int64_t b = 0; b <= n; ++b) {
    detail::for_each_histogram(n, b, counts, [&](const std::vector<std::int64_t>& c) {
      if (!sc.in_event(c)) return;
      const double lp = detail::HistogramScorer::log_power(c, p);
      if (lp == -kInf) return;
      law.histograms.push_back(c);
      law.log_masses.push_back(sc.log_multinomial(c) + lp);
    });
  }
  if (law.histograms.empty()) throw DomainError("conditional_law: the event has probability zero");
  const double z = log_sum_exp(law.log_masses);
  for (auto& lm : law.log_masses) {
    lm -= z;
    law.masses.push_back(std::exp(lm));
  }
  return law;
}

/// enumerate_event at each n.
inline std::vector<SanovReport> gibbs_conditioning_curve(const FiniteDistribution& p, const ConstraintSet& a,
                                                         const std::vector<std::int64_t>& ns,
                                                         const SanovOptions& opts = {}) {
  std::vector<SanovReport> out;
  for (auto n : ns) out.push_back(enumerate_event(p, a, n, opts));
  return out;
}

inline void write_curve_csv(std::ostream& os, const std::vector<SanovReport>& curve) {
  using detail::fmt_double;
  os << "n,log_prob,rate,residual,divergence_to_product,moment_excess,closure\n";
  for (const auto& r : curve)
    os << r.n << ',' << fmt_double(r.log_prob) << ',' << fmt_double(r.rate) << ',' << fmt_double(r.residual) << ','
       << fmt_double(r.divergence_to_product) << ',' << fmt_double(r.moment_excess) << ',' << fmt_double(r.closure)
       << '\n';
}

/// log Pr(in B | in A) against the divergence form
///   -[(D(mu_B||P*^n) + n m_B) - (D(mu_A||P*^n) + n m_A)]
/// with P* the projection onto A and m_E = lambda* . (E_{mu_E}[f_A] - alpha_A)
/// (zero when A is an equality event).
inline IdentityReport nested_relative_probability(const FiniteDistribution& p, const ConstraintSet& a,
                                                  const ConstraintSet& b, std::int64_t n,
                                                  const SanovOptions& opts = {}, double tol = 1e-10) {
  detail::check_instance(p, a, n, opts, "nested_relative_probability");
  if (b.alphabet_size() != p.size()) throw ShapeError("nested_relative_probability: alphabet size mismatch");
  const ProjectionResult star = project_inequality(p, a, opts.solver);
  if (!star.solved()) throw DomainError("nested_relative_probability: A is infeasible");
  const FiniteDistribution& ps = star.distribution();
  const std::size_t d = a.size();
  detail::HistogramScorer sa(p, a, n, opts.membership_tol), sb(p, b, n, opts.membership_tol);
  detail::EventSums ea(d), eb(d);
  std::vector<std::int64_t> counts(p.size());
  std::vector<double> side(d + 1);
  bool nested = true;
  for (std::int64_t blk = 0; blk <= n; ++blk) {
    detail::for_each_histogram(n, blk, counts, [&](const std::vector<std::int64_t>& c) {
      const bool in_a = sa.in_event(c), in_b = sb.in_event(c);
      if (!in_a && !in_b) return;
      const double lp = detail::HistogramScorer::log_power(c, p);
      if (lp == -kInf) return;
      if (in_b && !in_a) {
        nested = false;
        return;
      }
      side[0] = lp - detail::HistogramScorer::log_power(c, ps);
      for (std::size_t k = 0; k < d; ++k) side[k + 1] = sa.moments()[k];
      const double lw = sa.log_multinomial(c) + lp;
      ea.acc.add(lw, side);
      ++ea.count;
      if (in_b) {
        eb.acc.add(lw, side);
        ++eb.count;
      }
    });
  }
  if (!nested) throw DomainError("nested_relative_probability: B is not contained in A at this n");
  if (ea.acc.empty() || eb.acc.empty()) throw DomainError("nested_relative_probability: empty event");

  const double nn = double(n);
  const auto ta = detail::closure_terms(ea, n, star), tb = detail::closure_terms(eb, n, star);
  const double lhs = eb.acc.log_total() - ea.acc.log_total();
  const double div_a = nn * ta.divergence_to_product, div_b = nn * tb.divergence_to_product;
  const double rhs = -((div_b + nn * tb.moment_excess) - (div_a + nn * ta.moment_excess));
  auto rep = make_report("nested_relative_probability", lhs, rhs, tol);
  rep.mode = a.equality_only() ? "equality" : "moment-corrected";
  rep.terms = {{"log_prob_A", ea.acc.log_total()},
               {"log_prob_B", eb.acc.log_total()},
               {"divergence_A", div_a},
               {"divergence_B", div_b},
               {"moment_term_A", nn * ta.moment_excess},
               {"moment_term_B", nn * tb.moment_excess},
               {"histograms_A", double(ea.count)},
               {"histograms_B", double(eb.count)}};
  return rep;
}

/// Wilson score interval for a binomial proportion.
inline std::pair<double, double> wilson_interval(std::uint64_t hits, std::uint64_t trials, double z = 1.959963984540054) {
  const double nt = double(trials), ph = double(hits) / nt, z2 = z * z;
  const double denom = 1.0 + z2 / nt;
  const double centre = (ph + z2 / (2.0 * nt)) / denom;
  const double half = z / denom * std::sqrt(ph * (1.0 - ph) / nt + z2 / (4.0 * nt * nt));
  // The endpoints are exactly 0 and 1 at the extremes; avoid rounding noise there.
  const double lo = hits == 0 ? 0.0 : std::max(0.0, centre - half);
  const double hi = hits == trials ? 1.0 : std::min(1.0, centre + half);
  return {lo, hi};
}

/// Hit-frequency estimate of Pr(empirical measure in A). Trials run in fixed
/// chunks of 2^14, each with its own counter-based stream, so the result
/// depends on (seed, n, trials) only.
inline SanovReport monte_carlo_event(const FiniteDistribution& p, const ConstraintSet& a, std::int64_t n,
                                     std::uint64_t trials, std::uint64_t seed, const SanovOptions& opts = {}) {
  if (a.alphabet_size() != p.size()) throw ShapeError("monte_carlo_event: alphabet size mismatch");
  if (n < 1) throw DomainError("monte_carlo_event: n must be >= 1");
  if (trials < 1) throw DomainError("monte_carlo_event: trials must be >= 1");
  SanovReport r;
  r.n = n;
  r.method = SanovMethod::MonteCarlo;
  r.trials = trials;
  const ProjectionResult star = project_inequality(p, a, opts.solver);
  r.star_status = star.status;
  r.boundary = star.status == ProjectionStatus::BoundaryNonattained;
  r.lambda_star = star.lambda_star;
  r.rate = star.min_divergence;

  constexpr std::uint64_t chunk = 1u << 14;
  const std::size_t chunks = std::size_t((trials + chunk - 1) / chunk);
  std::vector<double> cumulative(p.size());
  std::partial_sum(p.probs().begin(), p.probs().end(), cumulative.begin());
  std::vector<std::uint64_t> hits(chunks, 0);
  parallel_for_chunks(chunks, opts.threads, [&](std::size_t ch) {
    CounterRng rng(seed, derive_stream(detail::kTagMonteCarlo, std::uint64_t(n), ch));
    detail::HistogramScorer sc(p, a, n, opts.membership_tol);
    std::vector<std::int64_t> counts(p.size());
    const std::uint64_t begin = ch * chunk, end = std::min(trials, begin + chunk);
    std::uint64_t h = 0;
    for (std::uint64_t t = begin; t < end; ++t) {
      std::fill(counts.begin(), counts.end(), 0);
      for (std::int64_t k = 0; k < n; ++k) ++counts[sample_categorical(cumulative, rng.uniform())];
      h += sc.in_event(counts);
    }
    hits[ch] = h;
  });
  for (auto h : hits) r.hits += h;
  std::tie(r.prob_low, r.prob_high) = wilson_interval(r.hits, trials);
  r.num_histograms = std::uint64_t(composition_count(n, p.size()));
  if (r.hits == 0) {
    r.estimate_defined = false;
    r.empty_event = true;
    return r;
  }
  r.log_prob = std::log(double(r.hits) / double(trials));
  if (star.solved()) {
    r.residual = -r.log_prob / double(n) - r.rate;
    r.residual_estimated = true;
    r.closure = 0.0;
  }
  return r;
}

}  // namespace maxent
