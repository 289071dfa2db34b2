#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "oracle_utils.hpp"
#include "skeptic/estimators.hpp"
#include "skeptic/likelihoods.hpp"
#include "skeptic/numerics.hpp"

using namespace skeptic;
using namespace skeptic::estimators;

namespace {

DesignMatrix column_design(const std::vector<std::string>& names,
                           const Eigen::MatrixXd& cols) {
  DesignMatrix x;
  x.names = names;
  x.values.resize(cols.rows(), cols.cols() + 1);
  x.values.col(0).setOnes();
  x.values.rightCols(cols.cols()) = cols;
  x.names.insert(x.names.begin(), "const");
  return x;
}

}  // namespace

TEST_CASE("fit_ols reproduces an exact linear relation") {
  const int n = 10;
  Eigen::MatrixXd col(n, 1);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    col(i, 0) = i + 1.0;
    y[i] = 2.0 + 3.0 * (i + 1.0);
  }
  const auto fit = fit_ols(y, column_design({"x"}, col));
  CHECK(fit.coefficients[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit.coefficients[1] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.residual_std_error < 1e-10);
}

TEST_CASE("fit_ols on a constant response, intercept only") {
  Eigen::VectorXd y = Eigen::VectorXd::Constant(8, 4.25);
  DesignMatrix x;
  x.names = {"const"};
  x.values = Eigen::MatrixXd::Ones(8, 1);
  const auto fit = fit_ols(y, x);
  CHECK(fit.coefficients[0] == doctest::Approx(4.25).epsilon(1e-14));
  CHECK(fit.residual_std_error == doctest::Approx(0.0));
  CHECK(fit.adj_r_squared <= fit.r_squared);
}

TEST_CASE("fit_ols recovers planted coefficients within 2 SE") {
  std::mt19937 gen(101);
  std::normal_distribution<double> z(0.0, 1.0);
  const int n = 400;
  Eigen::MatrixXd cols(n, 2);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    cols(i, 0) = 30.0 + 10.0 * z(gen);
    cols(i, 1) = z(gen) > 0.3 ? 1.0 : 0.0;
    y[i] = 1.7 + 0.023 * cols(i, 0) + 0.99 * cols(i, 1) + 2.3 * z(gen);
  }
  const auto fit = fit_ols(y, column_design({"a", "b"}, cols));
  const Eigen::Vector3d truth(1.7, 0.023, 0.99);
  for (int j = 0; j < 3; ++j) {
    CHECK(std::fabs(fit.coefficients[j] - truth[j]) < 2.0 * fit.standard_errors[j]);
  }
  CHECK(fit.f_df1 == 2);
  CHECK(fit.f_df2 == n - 3);
}

TEST_CASE("fit_ols error paths") {
  Eigen::MatrixXd col = Eigen::MatrixXd::Ones(10, 1);  // duplicates the intercept
  Eigen::VectorXd y = Eigen::VectorXd::Random(10);
  CHECK_THROWS_AS(fit_ols(y, column_design({"dup"}, col)), RankDeficientError);

  Eigen::MatrixXd two(2, 2);
  two << 1.0, 2.0, 3.0, 4.0;
  Eigen::VectorXd y2(2);
  y2 << 1.0, 2.0;
  CHECK_THROWS_AS(fit_ols(y2, column_design({"a", "b"}, two)),
                  InsufficientObservationsError);
}

TEST_CASE("fit_binary intercept-only fits the sample frequency") {
  const int n = 200;
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y[i] = i < 100 ? 1.0 : 0.0;
  DesignMatrix x;
  x.names = {"const"};
  x.values = Eigen::MatrixXd::Ones(n, 1);

  for (Link link : {Link::probit, Link::logit}) {
    const auto fit = fit_binary(y, x, link);
    CHECK(std::fabs(fit.coefficients[0]) < 1e-8);  // mean 0.5 under both links
    CHECK(fit.aic == doctest::Approx(2.0 - 2.0 * fit.log_likelihood));
  }

  Eigen::VectorXd y3(n);
  for (int i = 0; i < n; ++i) y3[i] = i < 60 ? 1.0 : 0.0;  // mean 0.3
  const auto probit = fit_binary(y3, x, Link::probit);
  const double oracle_c = oracle::bisect(
      [](double c) { return numerics::std_normal_cdf(c); }, 0.3, -5.0, 5.0);
  CHECK(std::fabs(probit.coefficients[0] - oracle_c) < 1e-8);
}

TEST_CASE("fit_binary recovers probit truth and reports sane errors") {
  std::mt19937 gen(1234);
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 4000;
  Eigen::MatrixXd cols(n, 2);
  Eigen::VectorXd y(n);
  const double b0 = -0.4, b1 = 0.8, b2 = -0.5;
  for (int i = 0; i < n; ++i) {
    cols(i, 0) = z(gen);
    cols(i, 1) = u(gen) < 0.4 ? 1.0 : 0.0;
    const double p = numerics::std_normal_cdf(b0 + b1 * cols(i, 0) + b2 * cols(i, 1));
    y[i] = u(gen) < p ? 1.0 : 0.0;
  }
  const auto fit = fit_binary(y, column_design({"x", "d"}, cols), Link::probit);
  CHECK(fit.converged);
  const Eigen::Vector3d truth(b0, b1, b2);
  for (int j = 0; j < 3; ++j) {
    CHECK(std::fabs(fit.coefficients[j] - truth[j]) < 2.0 * fit.standard_errors[j]);
  }
  // covariance is symmetric positive definite
  CHECK((fit.covariance - fit.covariance.transpose()).norm() < 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(fit.covariance);
  CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("fit_binary single class and separation") {
  DesignMatrix x;
  x.names = {"const"};
  x.values = Eigen::MatrixXd::Ones(20, 1);
  CHECK_THROWS_AS(fit_binary(Eigen::VectorXd::Ones(20), x, Link::logit),
                  SingleClassError);

  // perfectly separated toy data
  const int n = 40;
  Eigen::MatrixXd col(n, 1);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    col(i, 0) = i < 20 ? -1.0 - 0.05 * i : 1.0 + 0.05 * i;
    y[i] = i < 20 ? 0.0 : 1.0;
  }
  CHECK_THROWS_AS(fit_binary(y, column_design({"x"}, col), Link::logit),
                  SeparationError);
  CHECK_THROWS_AS(fit_binary(y, column_design({"x"}, col), Link::probit),
                  SeparationError);
}

TEST_CASE("logit over probit slope ratio lands on the usual link scale") {
  std::mt19937 gen(77);
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 20000;
  Eigen::MatrixXd cols(n, 2);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    cols(i, 0) = z(gen);
    cols(i, 1) = u(gen) < 0.5 ? 1.0 : 0.0;
    const double p = numerics::std_normal_cdf(0.2 + 0.9 * cols(i, 0) - 0.7 * cols(i, 1));
    y[i] = u(gen) < p ? 1.0 : 0.0;
  }
  const auto x = column_design({"x", "d"}, cols);
  const auto probit = fit_binary(y, x, Link::probit);
  const auto logit = fit_binary(y, x, Link::logit);
  for (int j = 1; j < 3; ++j) {
    const double t = probit.coefficients[j] / probit.standard_errors[j];
    if (std::fabs(t) > 3.0) {
      const double ratio = logit.coefficients[j] / probit.coefficients[j];
      CHECK(ratio > 1.4);
      CHECK(ratio < 2.1);
    }
  }
}

TEST_CASE("gradient fidelity of every shipped likelihood at random points") {
  std::mt19937 gen(13);
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 300;
  Eigen::MatrixXd zx(n, 3);
  Eigen::VectorXd yb(n), yc(n);
  for (int i = 0; i < n; ++i) {
    zx(i, 0) = 1.0;
    zx(i, 1) = z(gen);
    zx(i, 2) = 20.0 + 5.0 * z(gen);
    const double p = numerics::std_normal_cdf(-0.3 + 0.6 * zx(i, 1));
    yb[i] = u(gen) < p ? 1.0 : 0.0;
    const double latent = 1.0 + 0.8 * zx(i, 1) + 0.05 * zx(i, 2) + 2.0 * z(gen);
    yc[i] = std::max(0.0, latent);
  }

  const auto probit = probit_loglik(yb, zx);
  const auto logit = logit_loglik(yb, zx);
  const auto tobit = tobit_loglik(yc, zx);
  const auto ols = ols_profiled_loglik(yc, zx);

  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd beta(3);
    beta << 0.3 * z(gen), 0.3 * z(gen), 0.05 * z(gen);
    CHECK(numerics::grad_check(probit, beta) < 1e-6);
    CHECK(numerics::grad_check(logit, beta) < 1e-6);
    CHECK(numerics::grad_check(ols, beta) < 1e-6);
    Eigen::VectorXd full(4);
    full << beta, 0.5 + 0.2 * z(gen);
    CHECK(numerics::grad_check(tobit, full) < 1e-6);
  }
}

TEST_CASE("marginal effects: zero coefficient, numeric derivative, dummy flip") {
  std::mt19937 gen(3);
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 500;
  Eigen::MatrixXd cols(n, 3);
  for (int i = 0; i < n; ++i) {
    cols(i, 0) = z(gen);
    cols(i, 1) = u(gen) < 0.35 ? 1.0 : 0.0;
    cols(i, 2) = 2.0 * z(gen);
  }
  const auto x = column_design({"x", "d", "w"}, cols);

  BinaryFit fit;
  fit.link = Link::probit;
  fit.names = x.names;
  fit.coefficients = Eigen::VectorXd(4);
  fit.coefficients << -0.2, 0.7, -0.4, 0.0;  // w gets exactly zero
  fit.covariance = Eigen::MatrixXd::Identity(4, 4) * 0.01;
  fit.standard_errors = fit.covariance.diagonal().array().sqrt();
  fit.n = n;

  const auto ame = marginal_effects(fit, x);
  REQUIRE(ame.names.size() == 3);
  CHECK(ame.names[2] == "w");
  CHECK(ame.ame[2] == 0.0);

  // continuous covariate: AME equals the central finite difference of the
  // average fitted probability when the column is shifted
  const auto avg_prob = [&](int col, double shift) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd row = x.values.row(i);
      row[col] += shift;
      acc += numerics::std_normal_cdf(row.dot(fit.coefficients));
    }
    return acc / n;
  };
  const double h = 1e-5;
  const double fd = (avg_prob(1, h) - avg_prob(1, -h)) / (2.0 * h);
  CHECK(std::fabs(ame.ame[0] - fd) < 1e-6);
  CHECK_FALSE(ame.discrete[0]);

  // dummy covariate: AME equals the average discrete difference
  CHECK(ame.discrete[1]);
  double diff = 0.0;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd row1 = x.values.row(i), row0 = x.values.row(i);
    row1[2] = 1.0;
    row0[2] = 0.0;
    diff += numerics::std_normal_cdf(row1.dot(fit.coefficients)) -
            numerics::std_normal_cdf(row0.dot(fit.coefficients));
  }
  CHECK(ame.ame[1] == doctest::Approx(diff / n).epsilon(1e-12));

  // with a flat index the density factor is phi(0)
  BinaryFit flat = fit;
  flat.coefficients << 0.0, 0.0, 0.0, 1e-6;
  const auto tiny = marginal_effects(flat, x);
  CHECK(tiny.ame[2] / 1e-6 ==
        doctest::Approx(0.3989422804014327).epsilon(1e-4));

  // conformability
  DesignMatrix wrong = x;
  wrong.names[1] = "renamed";
  CHECK_THROWS_AS(marginal_effects(fit, wrong), ConformabilityError);
}

TEST_CASE("predict_change trivial cases") {
  dataio::Dataset data;
  for (int i = 0; i < 50; ++i) {
    dataio::SurveyRecord r;
    r.prior = 40.0 + i;
    r.post = r.prior;
    r.change = 0;
    r.gender = i % 2;
    r.age = 30 + (i % 20);
    r.police = 3;
    r.educ_int = 1;
    r.matching_gender = 1;
    data.rows.push_back(r);
  }
  // five updaters
  for (int i = 0; i < 5; ++i) {
    dataio::SurveyRecord r = data.rows[i];
    r.change = 1;
    r.post = 1.0;
    data.rows.push_back(r);
  }

  BinaryFit fit;
  fit.link = Link::probit;
  fit.names = {"const", "prior"};
  fit.coefficients = Eigen::VectorXd(2);
  fit.coefficients << -3.0, 0.001;  // probabilities all far below 0.5
  fit.covariance = Eigen::MatrixXd::Identity(2, 2);
  fit.standard_errors = fit.covariance.diagonal().array().sqrt();

  const auto report = predict_change(fit, data, 0.5);
  CHECK(report.n == 55);
  CHECK(report.success_rate == doctest::Approx(50.0 / 55.0));
  CHECK(report.confusion[0][0] == 50);
  CHECK(report.confusion[1][0] == 5);

  const auto all_ones = predict_change(fit, data, 0.0);
  CHECK(all_ones.success_rate == doctest::Approx(5.0 / 55.0));

  // intercept-only fit with updater share below the threshold: the success
  // rate equals the non-updater share exactly
  BinaryFit intercept;
  intercept.link = Link::logit;
  intercept.names = {"const"};
  intercept.coefficients = Eigen::VectorXd::Constant(1, -2.0);
  intercept.covariance = Eigen::MatrixXd::Identity(1, 1);
  intercept.standard_errors = intercept.covariance.diagonal().array().sqrt();
  const auto base = predict_change(intercept, data, 0.5);
  CHECK(base.success_rate == doctest::Approx(50.0 / 55.0));
}

TEST_CASE("classify_skepticism applies the gamma rule and labels deltas") {
  TobitFit fit;
  fit.names = {"prior", "const", "age", "matching_gender"};
  fit.delta = Eigen::VectorXd(3);
  fit.delta << 232.0, 0.728, -63.5;

  fit.gamma = 0.498;
  CHECK(classify_skepticism(fit).agents == AgentClass::Updater);
  fit.gamma = 1.5;
  CHECK(classify_skepticism(fit).agents == AgentClass::Skeptical);
  fit.gamma = 1.0;
  CHECK(classify_skepticism(fit).agents == AgentClass::Indeterminate);
  fit.gamma = 1.0004;  // inside the printed-precision band
  CHECK(classify_skepticism(fit).agents == AgentClass::Indeterminate);

  const auto call = classify_skepticism(fit);
  REQUIRE(call.directions.size() == 2);  // intercept is not labeled
  CHECK(call.directions[0].name == "age");
  CHECK(call.directions[0].sign == 1);
  CHECK(call.directions[0].label == "raises latent posterior (against update)");
  CHECK(call.directions[1].sign == -1);
}

TEST_CASE("tobit scale map is an involution") {
  std::mt19937 gen(23);
  std::normal_distribution<double> z(0.0, 10.0);
  for (int i = 0; i < 100; ++i) {
    const double gamma = z(gen);
    Eigen::VectorXd delta = Eigen::VectorXd::NullaryExpr(4, [&]() { return z(gen); });
    const auto [g1, d1] = tobit_scale_map(gamma, delta);
    const auto [g2, d2] = tobit_scale_map(g1, d1);
    CHECK(g2 == doctest::Approx(gamma).epsilon(1e-15));
    CHECK((d2 - delta).norm() == 0.0);  // negation is exact
  }
}
