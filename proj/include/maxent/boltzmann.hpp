#pragma once

// Exact log-probability of a histogram of i.i.d. draws, the Stirling
// expansions of its multinomial coefficient, and the accuracy experiment that
// compares them on large alphabets.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "maxent/core.hpp"
#include "maxent/random.hpp"

namespace maxent {

/// log( n! / (n_1! ... n_D!) ), via log-gamma.
inline double log_multinomial(const EmpiricalMeasure& counts) {
  double s = std::lgamma(double(counts.n()) + 1.0);
  for (auto c : counts.counts())
    if (c > 1) s -= std::lgamma(double(c) + 1.0);
  return std::max(s, 0.0);
}

/// log Pr(histogram = counts) under i.i.d. sampling from P. Returns -inf when
/// a positive count falls on an outcome P excludes.
inline double log_histogram_prob(const EmpiricalMeasure& counts, const FiniteDistribution& p) {
  if (counts.size() != p.size()) throw ShapeError("log_histogram_prob: alphabet size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const auto c = counts.count(i);
    if (c == 0) continue;
    if (p.prob(i) == 0.0) return -kInf;
    s += double(c) * p.log_prob(i);
  }
  return log_multinomial(counts) + s;
}

enum class StirlingOrder { Zeroth, First };

/// n H(Q) with Q = counts / n.
inline double stirling_zeroth(const EmpiricalMeasure& counts) {
  const double n = double(counts.n());
  double s = 0.0;
  for (auto c : counts.counts())
    if (c > 0) s -= double(c) * std::log(double(c) / n);
  return std::max(s, 0.0);
}

/// 1/2 [log(2 pi n) - sum_i log(2 pi n_i)] over the listed bins.
inline double stirling_correction(const EmpiricalMeasure& counts, bool occupied_only) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double s = std::log(two_pi * double(counts.n()));
  for (auto c : counts.counts()) {
    if (c == 0) {
      if (occupied_only) continue;
      throw DomainError("first-order Stirling correction needs every count >= 1");
    }
    s -= std::log(two_pi * double(c));
  }
  return 0.5 * s;
}

/// Stirling approximation of log_multinomial. The first-order form requires
/// full support; a zero count raises DomainError.
inline double stirling_log_multinomial(const EmpiricalMeasure& counts, StirlingOrder order) {
  const double zeroth = stirling_zeroth(counts);
  if (order == StirlingOrder::Zeroth) return zeroth;
  return zeroth + stirling_correction(counts, /*occupied_only=*/false);
}

struct HistogramLogProb {
  double exact_log_prob = 0.0;
  double log_multinomial = 0.0;
  double stirling_zeroth = 0.0;
  std::optional<double> stirling_first_correction;  // empty when a count is zero
  std::int64_t n = 0;
  std::size_t alphabet_size = 0;
};

inline HistogramLogProb analyze_histogram(const EmpiricalMeasure& counts, const FiniteDistribution& p) {
  HistogramLogProb r;
  r.exact_log_prob = log_histogram_prob(counts, p);
  r.log_multinomial = log_multinomial(counts);
  r.stirling_zeroth = stirling_zeroth(counts);
  const auto cs = counts.counts();
  if (std::all_of(cs.begin(), cs.end(), [](auto c) { return c > 0; }))
    r.stirling_first_correction = stirling_correction(counts, false);
  r.n = counts.n();
  r.alphabet_size = counts.size();
  return r;
}

// Accuracy experiment ------------------------------------------------------

enum class PriorMode { Dirichlet1, UniformOrthant };

inline const char* to_string(PriorMode m) {
  return m == PriorMode::Dirichlet1 ? "dirichlet1" : "orthant";
}

/// How the experiment treats empty bins under the first-order correction.
///   Occupied: empty bins contribute log 0! = 0 exactly and are left out of the
///             correction product (the Stirling expansion is applied per
///             occupied bin).
///   Skip:     rows with any empty bin get no first-order value and are flagged.
enum class ZeroCountPolicy { Occupied, Skip };

struct ExperimentConfig {
  std::size_t alphabet_size = 1000;
  std::vector<std::int64_t> n_grid{5000, 10000, 20000, 40000};
  PriorMode prior_mode = PriorMode::Dirichlet1;
  std::size_t trials = 20;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  ZeroCountPolicy zero_policy = ZeroCountPolicy::Occupied;
};

struct ExperimentRow {
  PriorMode prior_mode = PriorMode::Dirichlet1;
  std::size_t alphabet_size = 0;
  std::int64_t n = 0;
  std::size_t trial = 0;
  double exact = 0.0;
  double zeroth = 0.0;
  double first = kNaN;
  double err_zeroth = 0.0;
  double err_first = kNaN;
  bool skipped_first = false;
  std::size_t empty_bins = 0;
};

inline constexpr std::uint64_t kTagExperiment = 0x45585045524d4e54ull;  // "EXPERMNT"

/// Draws P from the prior mode, using one stream per (n, trial) cell.
inline std::vector<double> sample_prior(PriorMode mode, std::size_t dim, CounterRng& rng) {
  std::vector<double> p(dim);
  double total = 0.0;
  for (auto& x : p) {
    x = mode == PriorMode::Dirichlet1 ? rng.exponential() : rng.uniform_pos();
    total += x;
  }
  for (auto& x : p) x /= total;
  return p;
}

/// Multinomial(n, p) counts by inverse-CDF sampling of each draw.
inline std::vector<std::int64_t> sample_counts(std::span<const double> p, std::int64_t n, CounterRng& rng) {
  std::vector<double> cumulative(p.size());
  std::partial_sum(p.begin(), p.end(), cumulative.begin());
  std::vector<std::int64_t> counts(p.size(), 0);
  for (std::int64_t k = 0; k < n; ++k) ++counts[sample_categorical(cumulative, rng.uniform())];
  return counts;
}

/// One experiment row from an explicit histogram.
inline ExperimentRow experiment_row(const EmpiricalMeasure& counts, PriorMode mode, std::size_t trial,
                                    ZeroCountPolicy policy) {
  ExperimentRow row;
  row.prior_mode = mode;
  row.alphabet_size = counts.size();
  row.n = counts.n();
  row.trial = trial;
  row.exact = log_multinomial(counts);
  row.zeroth = stirling_zeroth(counts);
  row.err_zeroth = row.exact - row.zeroth;
  const auto cs = counts.counts();
  row.empty_bins = std::size_t(std::count(cs.begin(), cs.end(), std::int64_t{0}));
  if (row.empty_bins > 0 && policy == ZeroCountPolicy::Skip) {
    row.skipped_first = true;
  } else {
    row.first = row.zeroth + stirling_correction(counts, /*occupied_only=*/true);
    row.err_first = row.exact - row.first;
  }
  return row;
}

/// Rows ordered by (n grid position, trial). Deterministic in cfg.seed and
/// independent of cfg.threads.
inline std::vector<ExperimentRow> entropy_approx_experiment(const ExperimentConfig& cfg) {
  if (cfg.alphabet_size < 2) throw DomainError("entropy_approx_experiment: alphabet size must be >= 2");
  if (cfg.trials < 1) throw DomainError("entropy_approx_experiment: trials must be >= 1");
  for (auto n : cfg.n_grid)
    if (n < 1) throw DomainError("entropy_approx_experiment: every n must be >= 1");
  const std::size_t cells = cfg.n_grid.size() * cfg.trials;
  std::vector<ExperimentRow> rows(cells);
  parallel_for_chunks(cells, cfg.threads, [&](std::size_t cell) {
    const std::size_t gi = cell / cfg.trials, trial = cell % cfg.trials;
    const auto n = cfg.n_grid[gi];
    CounterRng rng(cfg.seed, derive_stream(kTagExperiment, std::uint64_t(n), trial));
    const auto p = sample_prior(cfg.prior_mode, cfg.alphabet_size, rng);
    EmpiricalMeasure counts(sample_counts(p, n, rng));
    rows[cell] = experiment_row(counts, cfg.prior_mode, trial, cfg.zero_policy);
  });
  return rows;
}

namespace detail {
inline std::string fmt_double(double x) {
  if (std::isnan(x)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}
}  // namespace detail

/// CSV with the columns prior_mode, D, n, trial, exact, zeroth, first,
/// err_zeroth, err_first, skipped_first, then relative (error / exact) and
/// per-sample (error / n) normalizations and the empty-bin count.
inline void write_experiment_csv(std::ostream& os, const std::vector<ExperimentRow>& rows) {
  using detail::fmt_double;
  os << "prior_mode,D,n,trial,exact,zeroth,first,err_zeroth,err_first,skipped_first,"
        "rel_err_zeroth,rel_err_first,per_n_err_zeroth,per_n_err_first,empty_bins\n";
  for (const auto& r : rows) {
    const double rel = r.exact != 0.0 ? 1.0 / r.exact : kNaN;
    os << to_string(r.prior_mode) << ',' << r.alphabet_size << ',' << r.n << ',' << r.trial << ','
       << fmt_double(r.exact) << ',' << fmt_double(r.zeroth) << ',' << fmt_double(r.first) << ','
       << fmt_double(r.err_zeroth) << ',' << fmt_double(r.err_first) << ',' << (r.skipped_first ? 1 : 0)
       << ',' << fmt_double(r.err_zeroth * rel) << ',' << fmt_double(r.err_first * rel) << ','
       << fmt_double(r.err_zeroth / double(r.n)) << ',' << fmt_double(r.err_first / double(r.n)) << ','
       << r.empty_bins << '\n';
  }
}

inline double median(std::vector<double> v) {
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

struct ExperimentSummary {
  std::int64_t n = 0;
  std::size_t rows = 0;
  std::size_t first_rows = 0;  // rows with a first-order value
  double median_abs_err_zeroth = kNaN;
  double median_abs_err_first = kNaN;
  std::size_t first_better = 0;  // rows where |err_first| < |err_zeroth|
};

inline std::vector<ExperimentSummary> summarize(const std::vector<ExperimentRow>& rows) {
  std::vector<ExperimentSummary> out;
  for (const auto& r : rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& s) { return s.n == r.n; });
    if (it == out.end()) {
      out.push_back({});
      it = out.end() - 1;
      it->n = r.n;
    }
    ++it->rows;
  }
  for (auto& s : out) {
    std::vector<double> ez, ef;
    for (const auto& r : rows) {
      if (r.n != s.n) continue;
      ez.push_back(std::abs(r.err_zeroth));
      if (!r.skipped_first) {
        ef.push_back(std::abs(r.err_first));
        ++s.first_rows;
        if (std::abs(r.err_first) < std::abs(r.err_zeroth)) ++s.first_better;
      }
    }
    s.median_abs_err_zeroth = median(ez);
    s.median_abs_err_first = median(ef);
  }
  return out;
}

}  // namespace maxent
