#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "maxent/io.hpp"
#include "maxent/maxent.hpp"

using namespace maxent;
using io::json;

namespace {

std::string error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Io, DistributionRoundTrip) {
  const FiniteDistribution p({"a", "b", "c"}, {0.1, 0.2, 0.7});
  const auto q = io::distribution_from_json(io::parse_json(io::dump(io::to_json(p)), "test"));
  EXPECT_EQ(q.outcomes(), p.outcomes());
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(q.prob(i), p.prob(i));
}

TEST(Io, ConstraintsRoundTrip) {
  Eigen::MatrixXd m(2, 3);
  m << 0, 1, 2, 1, 0, 0.3333333333333333;
  const ConstraintSet a(FeatureSet({"x", "y"}, m), {ConstraintKind::Eq, ConstraintKind::Le}, Eigen::Vector2d(1.1, 0.4));
  const auto b = io::constraints_from_json(io::to_json(a));
  EXPECT_EQ(b.features().names(), a.features().names());
  EXPECT_EQ(b.features().matrix(), a.features().matrix());
  EXPECT_EQ(b.kinds(), a.kinds());
  EXPECT_EQ(b.targets(), a.targets());
  const auto none = io::constraints_from_json(io::to_json(ConstraintSet::unconstrained(4)));
  EXPECT_EQ(none.size(), 0u);
  EXPECT_EQ(none.alphabet_size(), 4u);
}

TEST(Io, ModelAndEmpiricalRoundTrip) {
  Eigen::MatrixXd m(1, 2);
  m << 0, 1;
  const ExpFamModel model(FiniteDistribution::uniform(2), FeatureSet({"x"}, m), Eigen::VectorXd::Constant(1, 0.25));
  const auto back = io::model_from_json(io::to_json(model));
  EXPECT_EQ(back.lambda(), model.lambda());
  EXPECT_EQ(back.log_partition(), model.log_partition());
  const EmpiricalMeasure e({3, 0, 4});
  EXPECT_EQ(io::empirical_from_json(io::to_json(e)).n(), 7);
}

TEST(Io, ErrorsNameTheField) {
  const auto bad_probs = io::parse_json(R"({"outcomes": ["a", "b"], "probs": [0.5, "x"]})", "t");
  EXPECT_NE(error_of([&] { io::distribution_from_json(bad_probs, "prior"); }).find("prior.probs[1]"), std::string::npos);
  const auto missing = io::parse_json(R"({"outcomes": ["a"]})", "t");
  EXPECT_NE(error_of([&] { io::distribution_from_json(missing, "prior"); }).find("probs"), std::string::npos);
  const auto bad_sum = io::parse_json(R"({"outcomes": ["a", "b"], "probs": [0.5, 0.6]})", "t");
  EXPECT_NE(error_of([&] { io::distribution_from_json(bad_sum, "prior"); }).find("prior"), std::string::npos);
  const auto bad_kind = io::parse_json(
      R"({"featureset": {"names": ["x"], "matrix": [[0, 1]]}, "kinds": ["gt"], "targets": [0.5]})", "t");
  EXPECT_NE(error_of([&] { io::constraints_from_json(bad_kind); }).find("kinds[0]"), std::string::npos);
  const auto ragged = io::parse_json(
      R"({"featureset": {"names": ["x", "y"], "matrix": [[0, 1], [1]]}, "kinds": ["eq", "eq"], "targets": [0.5, 0.5]})",
      "t");
  EXPECT_NE(error_of([&] { io::constraints_from_json(ragged); }).find("matrix[1]"), std::string::npos);
  EXPECT_THROW(io::parse_json("{not json", "t"), InputError);
  const auto counts = io::parse_json(R"({"counts": [1, 2.5]})", "t");
  EXPECT_NE(error_of([&] { io::empirical_from_json(counts); }).find("counts[1]"), std::string::npos);
}

TEST(Io, SolverOptions) {
  const auto o = io::solver_options_from_json(io::parse_json(R"({"moment_tol": 1e-10, "max_iter": 50})", "t"));
  EXPECT_EQ(o.moment_tol, 1e-10);
  EXPECT_EQ(o.max_iter, 50);
  EXPECT_EQ(o.lambda_cap, SolverOptions{}.lambda_cap);
  EXPECT_THROW(io::solver_options_from_json(io::parse_json(R"({"tolerance": 1})", "t")), InputError);
  EXPECT_THROW(io::solver_options_from_json(io::parse_json(R"({"moment_tol": -1})", "t")), InputError);
}

TEST(Io, NonFiniteBecomesNull) {
  SanovReport r;
  r.n = 3;
  const auto j = io::to_json(r);
  EXPECT_TRUE(j["log_prob"].is_null());
  EXPECT_TRUE(j["rate"].is_null());
  EXPECT_FALSE(j.contains("hits"));
}

TEST(Io, ProjectionResultFields) {
  Eigen::MatrixXd m(1, 2);
  m << 0, 1;
  SolverOptions opts;
  opts.trace = true;
  const auto r = project(FiniteDistribution::uniform(2),
                         ConstraintSet::equalities(FeatureSet({"x"}, m), Eigen::VectorXd::Constant(1, 0.8)), opts);
  const auto j = io::to_json(r);
  EXPECT_EQ(j["status"], "Converged");
  EXPECT_NEAR(j["lambda_star"][0].get<double>(), std::log(4.0), 1e-8);
  EXPECT_TRUE(j["trace"].is_array());
  EXPECT_TRUE(j.contains("moment_residual"));
}

TEST(Io, ReadSamples) {
  const auto path = std::filesystem::temp_directory_path() / "maxent_io_samples.txt";
  {
    std::ofstream out(path);
    out << "a\n  b \n\nc\r\n";
  }
  EXPECT_EQ(io::read_samples(path.string()), (std::vector<std::string>{"a", "b", "c"}));
  std::filesystem::remove(path);
  EXPECT_THROW(io::read_samples("/nonexistent/samples.txt"), InputError);
}
