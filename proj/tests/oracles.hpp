#pragma once

// Reference computations for the tests. Each works from first principles and
// shares no code path with the library routine it checks.

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "maxent/maxent.hpp"

namespace oracle {

using big_float = boost::multiprecision::cpp_bin_float_50;
using big_int = boost::multiprecision::cpp_int;
using rational = boost::multiprecision::cpp_rational;

/// A probability p_i = num_i / den with integer numerators.
struct RationalDist {
  std::vector<std::int64_t> num;
  std::int64_t den = 1;
  maxent::FiniteDistribution to_distribution() const {
    std::vector<double> p;
    for (auto n : num) p.push_back(double(n) / double(den));
    return maxent::FiniteDistribution(p);
  }
};

inline big_int factorial(std::int64_t n) {
  big_int f = 1;
  for (std::int64_t k = 2; k <= n; ++k) f *= k;
  return f;
}

/// n! / prod c_i! * prod p_i^c_i as an exact rational.
inline rational histogram_prob(const std::vector<std::int64_t>& counts, const RationalDist& p) {
  std::int64_t n = 0;
  for (auto c : counts) n += c;
  big_int coef = factorial(n);
  for (auto c : counts) coef /= factorial(c);
  big_int num = coef, den = 1;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    for (std::int64_t k = 0; k < counts[i]; ++k) {
      num *= p.num[i];
      den *= p.den;
    }
  }
  return rational(num, den);
}

inline double log_of(const rational& r) {
  if (r == 0) return -std::numeric_limits<double>::infinity();
  const big_float x = big_float(boost::multiprecision::numerator(r)) / big_float(boost::multiprecision::denominator(r));
  return static_cast<double>(boost::multiprecision::log(x));
}

inline double entropy(const std::vector<double>& p) {
  big_float h = 0;
  for (double x : p)
    if (x > 0) h -= big_float(x) * boost::multiprecision::log(big_float(x));
  return static_cast<double>(h);
}

inline double kl(const std::vector<double>& q, const std::vector<double>& p) {
  big_float d = 0;
  for (std::size_t i = 0; i < q.size(); ++i)
    if (q[i] > 0) d += big_float(q[i]) * boost::multiprecision::log(big_float(q[i]) / big_float(p[i]));
  return static_cast<double>(d);
}

/// Every composition of n into d parts.
inline std::vector<std::vector<std::int64_t>> compositions(std::int64_t n, std::size_t d) {
  std::vector<std::vector<std::int64_t>> out;
  std::vector<std::int64_t> c(d, 0);
  std::function<void(std::size_t, std::int64_t)> rec = [&](std::size_t pos, std::int64_t rem) {
    if (pos + 1 == d) {
      c[pos] = rem;
      out.push_back(c);
      return;
    }
    for (std::int64_t k = 0; k <= rem; ++k) {
      c[pos] = k;
      rec(pos + 1, rem - k);
    }
  };
  rec(0, n);
  return out;
}

/// Event probabilities computed sequence by sequence over all |X|^n
/// microstates.
struct MicrostateEvent {
  double prob = 0.0;              // Pr(empirical measure in A)
  double kl_to_product = 0.0;     // D(mu_A || Q^n) for the reference Q
  std::vector<double> mean_moments;  // E_mu[empirical moments]
};

inline MicrostateEvent microstates(const maxent::FiniteDistribution& p, const maxent::ConstraintSet& a,
                                   std::int64_t n, const maxent::FiniteDistribution& q, double tol = 1e-9) {
  const std::size_t d = p.size();
  std::vector<std::size_t> seq(std::size_t(n), 0);
  std::vector<long double> probs;
  std::vector<long double> qprobs;
  std::vector<std::vector<double>> mom;
  for (;;) {
    Eigen::VectorXd m = Eigen::VectorXd::Zero(Eigen::Index(a.size()));
    long double pr = 1.0L, qr = 1.0L;
    for (auto x : seq) {
      pr *= p.prob(x);
      qr *= q.prob(x);
      for (std::size_t k = 0; k < a.size(); ++k) m(Eigen::Index(k)) += a.features()(k, x);
    }
    m /= double(n);
    if (a.contains_moments(m, tol) && pr > 0) {
      probs.push_back(pr);
      qprobs.push_back(qr);
      mom.emplace_back(m.data(), m.data() + m.size());
    }
    std::size_t k = 0;
    while (k < seq.size() && ++seq[k] == d) seq[k++] = 0;
    if (k == seq.size()) break;
  }
  MicrostateEvent out;
  long double total = 0.0L;
  for (auto v : probs) total += v;
  out.prob = double(total);
  out.mean_moments.assign(a.size(), 0.0);
  if (total == 0.0L) return out;
  long double kl = 0.0L;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const long double mu = probs[i] / total;
    kl += mu * std::log(mu / qprobs[i]);
    for (std::size_t k = 0; k < a.size(); ++k) out.mean_moments[k] += double(mu) * mom[i][k];
  }
  out.kl_to_product = double(kl);
  return out;
}

/// min D(Q||P0) over Q on {0,1,2} with E_Q[f] = alpha, scanned along the
/// feasible segment with q_0 on a grid of the given step.
inline double grid_min_divergence(const maxent::FiniteDistribution& prior, const std::vector<double>& f, double alpha,
                                  double step) {
  double best = std::numeric_limits<double>::infinity();
  const long steps = std::lround(1.0 / step);
  for (long i = 0; i <= steps; ++i) {
    const double q0 = double(i) * step;
    // q1 + q2 = 1 - q0, f1 q1 + f2 q2 = alpha - f0 q0
    const double r = 1.0 - q0, s = alpha - f[0] * q0;
    if (f[1] == f[2]) continue;
    const double q2 = (s - f[1] * r) / (f[2] - f[1]);
    const double q1 = r - q2;
    if (q1 < 0 || q2 < 0) continue;
    const std::vector<double> q{q0, q1, q2};
    double d = 0.0;
    for (int k = 0; k < 3; ++k)
      if (q[k] > 0) d += q[k] * std::log(q[k] / prior.prob(std::size_t(k)));
    best = std::min(best, d);
  }
  return best;
}

}  // namespace oracle
