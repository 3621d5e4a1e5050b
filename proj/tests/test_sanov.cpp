#include <gtest/gtest.h>

#include <map>
#include <sstream>

#include "maxent/sanov.hpp"
#include "oracles.hpp"

using namespace maxent;

namespace {

FeatureSet line(std::size_t n) {
  Eigen::MatrixXd f(1, static_cast<Eigen::Index>(n));
  for (Eigen::Index x = 0; x < f.cols(); ++x) f(0, x) = double(x);
  return FeatureSet({"x"}, f);
}

ConstraintSet ge(const FeatureSet& f, double alpha) {
  return ConstraintSet(f, {ConstraintKind::Ge}, Eigen::VectorXd::Constant(1, alpha));
}

const FiniteDistribution kFair = FiniteDistribution::uniform(2);

// Exact binomial tail: sum_{k >= 8} C(10, k) = 45 + 10 + 1 = 56.
TEST(Enumerate, BernoulliTail) {
  const auto r = enumerate_event(kFair, ge(line(2), 0.8), 10);
  EXPECT_EQ(r.num_histograms, 11u);
  EXPECT_EQ(r.num_histograms_in_A, 3u);
  EXPECT_NEAR(r.log_prob, std::log(56.0 / 1024.0), 1e-13);
  EXPECT_NEAR(r.prob(), 56.0 / 1024.0, 1e-15);
  EXPECT_NEAR(r.rate, 0.192745, 1e-6);
  EXPECT_LE(std::abs(r.closure), 1e-10);
  EXPECT_NEAR(r.residual, 0.097867, 1e-6);
  EXPECT_EQ(r.star_status, ProjectionStatus::Converged);
}

TEST(Enumerate, BernoulliTailMatchesMicrostates) {
  const auto a = ge(line(2), 0.8);
  const auto r = enumerate_event(kFair, a, 10);
  const auto star = project_inequality(kFair, a);
  const auto micro = oracle::microstates(kFair, a, 10, star.distribution());
  EXPECT_NEAR(r.prob(), micro.prob, 1e-15);
  EXPECT_NEAR(r.divergence_to_product, micro.kl_to_product / 10.0, 1e-12);
  EXPECT_NEAR(r.moment_excess, star.lambda_star(0) * (micro.mean_moments[0] - 0.8), 1e-12);
  EXPECT_NEAR(r.divergence_to_product, 0.068161, 1e-6);
}

TEST(Enumerate, RandomInstancesMatchMicrostates) {
  CounterRng rng(31, 0);
  for (int t = 0; t < 20; ++t) {
    const std::size_t d = 2 + rng.next_u64() % 2;
    const std::int64_t n = 3 + std::int64_t(rng.next_u64() % 5);
    std::vector<double> w(d);
    double s = 0.0;
    for (auto& x : w) s += (x = rng.exponential());
    for (auto& x : w) x /= s;
    const FiniteDistribution p(w);
    Eigen::MatrixXd f(1, static_cast<Eigen::Index>(d));
    for (Eigen::Index x = 0; x < f.cols(); ++x) f(0, x) = 2.0 * rng.uniform() - 1.0;
    const double mean = moments(p, FeatureSet(f))(0);
    const double alpha = mean + (f.maxCoeff() - mean) * 0.5 * rng.uniform();
    const ConstraintSet a(FeatureSet(f), {ConstraintKind::Ge}, Eigen::VectorXd::Constant(1, alpha));
    const auto r = enumerate_event(p, a, n);
    if (r.empty_event) continue;
    const auto star = project_inequality(p, a);
    const auto micro = oracle::microstates(p, a, n, star.distribution());
    EXPECT_NEAR(r.prob(), micro.prob, 1e-12 * std::max(1.0, micro.prob));
    EXPECT_NEAR(r.divergence_to_product, micro.kl_to_product / double(n), 1e-10);
    EXPECT_LE(std::abs(r.closure), 1e-10);
  }
}

TEST(Enumerate, HistogramProbabilitiesSumToOne) {
  const oracle::RationalDist p{{1, 2, 3, 4}, 10};
  const auto r = enumerate_event(p.to_distribution(), ConstraintSet::unconstrained(4), 15);
  EXPECT_NEAR(r.log_prob, 0.0, 1e-13);
  EXPECT_EQ(r.num_histograms, 816u);  // C(18, 3)
  EXPECT_EQ(r.num_histograms_in_A, 816u);
  EXPECT_NEAR(r.residual, 0.0, 1e-13);
}

TEST(Enumerate, ClosureOnRandomInstances) {
  CounterRng rng(32, 0);
  int checked = 0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t d = 2 + rng.next_u64() % 3;
    const std::int64_t n = 5 + std::int64_t(rng.next_u64() % 26);
    std::vector<double> w(d);
    double s = 0.0;
    for (auto& x : w) s += (x = rng.exponential());
    for (auto& x : w) x /= s;
    const FiniteDistribution p(w);
    Eigen::MatrixXd f(1, static_cast<Eigen::Index>(d));
    for (Eigen::Index x = 0; x < f.cols(); ++x) f(0, x) = 2.0 * rng.uniform() - 1.0;
    const double mean = moments(p, FeatureSet(f))(0);
    const double alpha = mean + (f.maxCoeff() - mean) * 0.6 * rng.uniform();
    const ConstraintSet a(FeatureSet(f), {ConstraintKind::Ge}, Eigen::VectorXd::Constant(1, alpha));
    const auto r = enumerate_event(p, a, n);
    ASSERT_FALSE(r.empty_event);
    EXPECT_LE(std::abs(r.closure), 1e-10) << "instance " << t;
    EXPECT_GE(r.divergence_to_product, -1e-12);
    EXPECT_GE(r.moment_excess, -1e-12);
    ++checked;
  }
  EXPECT_EQ(checked, 50);
}

TEST(Enumerate, EmptyEvent) {
  const auto r = enumerate_event(kFair, ge(line(2), 0.95), 10);
  EXPECT_FALSE(r.empty_event);  // the all-ones histogram still qualifies
  const auto e = enumerate_event(kFair, ge(line(2), 0.95), 3);
  EXPECT_FALSE(e.empty_event);
  const ConstraintSet mid = ConstraintSet::equalities(line(2), Eigen::VectorXd::Constant(1, 0.5));
  const auto odd = enumerate_event(kFair, mid, 3);
  EXPECT_TRUE(odd.empty_event);
  EXPECT_EQ(odd.log_prob, -kInf);
  EXPECT_EQ(odd.num_histograms_in_A, 0u);
}

TEST(Enumerate, BoundaryEvent) {
  const auto r = enumerate_event(kFair, ge(line(2), 1.0), 5);
  EXPECT_TRUE(r.boundary);
  EXPECT_EQ(r.star_status, ProjectionStatus::BoundaryNonattained);
  EXPECT_NEAR(r.log_prob, -5.0 * std::log(2.0), 1e-13);
  EXPECT_NEAR(r.residual, 0.0, 1e-13);
}

TEST(Enumerate, CapExceeded) {
  SanovOptions opts;
  opts.cap = 1000;
  EXPECT_THROW(enumerate_event(FiniteDistribution::uniform(5), ConstraintSet::unconstrained(5), 20, opts), CapExceeded);
  EXPECT_THROW(enumerate_event(kFair, ge(line(2), 0.5), 0), DomainError);
  EXPECT_DOUBLE_EQ(composition_count(20, 5), 10626.0);
}

TEST(Enumerate, IndependentOfThreadCount) {
  const oracle::RationalDist p{{1, 2, 3, 4}, 10};
  Eigen::MatrixXd f(1, 4);
  f << -1.0, 0.3, 0.5, 1.0;
  const ConstraintSet a(FeatureSet(f), {ConstraintKind::Ge}, Eigen::VectorXd::Constant(1, 0.6));
  SanovOptions one, eight;
  eight.threads = 8;
  const auto r1 = enumerate_event(p.to_distribution(), a, 25, one);
  const auto r8 = enumerate_event(p.to_distribution(), a, 25, eight);
  EXPECT_EQ(r1.log_prob, r8.log_prob);
  EXPECT_EQ(r1.residual, r8.residual);
  EXPECT_EQ(r1.closure, r8.closure);
}

TEST(ConditionalLaw, BernoulliTail) {
  const auto law = conditional_law(kFair, ge(line(2), 0.8), 10);
  ASSERT_EQ(law.histograms.size(), 3u);
  // histograms (2,8), (1,9), (0,10) with masses 45/56, 10/56, 1/56
  std::map<std::int64_t, double> by_ones;
  double total = 0.0;
  for (std::size_t i = 0; i < law.histograms.size(); ++i) {
    by_ones[law.histograms[i][1]] = law.masses[i];
    total += law.masses[i];
  }
  EXPECT_NEAR(by_ones[8], 45.0 / 56.0, 1e-14);
  EXPECT_NEAR(by_ones[9], 10.0 / 56.0, 1e-14);
  EXPECT_NEAR(by_ones[10], 1.0 / 56.0, 1e-14);
  EXPECT_NEAR(total, 1.0, 1e-14);
  EXPECT_THROW(conditional_law(kFair, ConstraintSet::equalities(line(2), Eigen::VectorXd::Constant(1, 0.5)), 3),
               DomainError);
}

TEST(Curve, ResidualShrinks) {
  const auto curve = gibbs_conditioning_curve(kFair, ge(line(2), 0.8), {10, 20, 40});
  ASSERT_EQ(curve.size(), 3u);
  EXPECT_LT(curve[2].residual, curve[0].residual);
  for (const auto& r : curve) EXPECT_LE(std::abs(r.closure), 1e-10);
  std::ostringstream os;
  write_curve_csv(os, curve);
  std::istringstream is(os.str());
  std::string header, first;
  std::getline(is, header);
  std::getline(is, first);
  EXPECT_EQ(header, "n,log_prob,rate,residual,divergence_to_product,moment_excess,closure");
  EXPECT_EQ(first.rfind("10,", 0), 0u);
}

TEST(Nested, TailInsideTail) {
  const auto f = line(2);
  const auto r = nested_relative_probability(kFair, ge(f, 0.8), ge(f, 0.9), 10);
  EXPECT_TRUE(r.pass) << r.residual;
  EXPECT_NEAR(r.lhs, std::log(11.0 / 56.0), 1e-12);
  EXPECT_NEAR(r.rhs, std::log(11.0 / 56.0), 1e-10);
  EXPECT_EQ(r.mode, "moment-corrected");
  EXPECT_EQ(r.term("histograms_A"), 3.0);
  EXPECT_EQ(r.term("histograms_B"), 2.0);
}

TEST(Nested, EqualityEvent) {
  Eigen::MatrixXd f(1, 3);
  f << 0.0, 1.0, 2.0;
  const FiniteDistribution p({0.2, 0.5, 0.3});
  const auto a = ConstraintSet::equalities(FeatureSet(f), Eigen::VectorXd::Constant(1, 1.25));
  Eigen::MatrixXd g(2, 3);
  g << 0.0, 1.0, 2.0, 1.0, 0.0, 0.0;
  const ConstraintSet b(FeatureSet(g), {ConstraintKind::Eq, ConstraintKind::Ge}, Eigen::Vector2d(1.25, 0.2));
  const auto r = nested_relative_probability(p, a, b, 8);
  EXPECT_EQ(r.mode, "equality");
  EXPECT_TRUE(r.pass) << r.residual;
  EXPECT_EQ(r.term("moment_term_A"), 0.0);
}

TEST(Nested, RejectsNonNested) {
  const auto f = line(2);
  EXPECT_THROW(nested_relative_probability(kFair, ge(f, 0.9), ge(f, 0.8), 10), DomainError);
}

TEST(MonteCarlo, Wilson) {
  const auto [lo, hi] = wilson_interval(50, 100);
  // closed form for 50/100
  const double z = 1.959963984540054, n = 100.0;
  const double half = z / (1 + z * z / n) * std::sqrt(0.25 / n + z * z / (4 * n * n));
  EXPECT_NEAR(lo, 0.5 - half, 1e-15);
  EXPECT_NEAR(hi, 0.5 + half, 1e-15);
  const auto [l0, h0] = wilson_interval(0, 10);
  EXPECT_EQ(l0, 0.0);
  EXPECT_GT(h0, 0.0);
}

TEST(MonteCarlo, CoversExactProbability) {
  const auto a = ge(line(2), 0.8);
  const auto r = monte_carlo_event(kFair, a, 10, 200000, 17);
  EXPECT_EQ(r.method, SanovMethod::MonteCarlo);
  EXPECT_EQ(r.trials, 200000u);
  EXPECT_TRUE(r.estimate_defined);
  EXPECT_TRUE(r.residual_estimated);
  // 0.0546875 lies inside a 95% interval with high probability; seed fixed in advance
  EXPECT_LE(r.prob_low, 56.0 / 1024.0);
  EXPECT_GE(r.prob_high, 56.0 / 1024.0);
}

TEST(MonteCarlo, IndependentOfThreadCount) {
  const auto a = ge(line(2), 0.8);
  SanovOptions one, eight;
  eight.threads = 8;
  const auto r1 = monte_carlo_event(kFair, a, 10, 100000, 3, one);
  const auto r8 = monte_carlo_event(kFair, a, 10, 100000, 3, eight);
  EXPECT_EQ(r1.hits, r8.hits);
  EXPECT_NE(r1.hits, monte_carlo_event(kFair, a, 10, 100000, 4, one).hits);
}

TEST(MonteCarlo, NoHits) {
  const auto r = monte_carlo_event(kFair, ge(line(2), 1.0), 30, 1000, 1);
  EXPECT_EQ(r.hits, 0u);
  EXPECT_FALSE(r.estimate_defined);
  EXPECT_EQ(r.prob_low, 0.0);
  EXPECT_THROW(monte_carlo_event(kFair, ge(line(2), 1.0), 30, 0, 1), DomainError);
}

}  // namespace
