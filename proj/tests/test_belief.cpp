#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>

#include "skeptic/belief.hpp"

using namespace skeptic;
using namespace skeptic::belief;

TEST_CASE("prior_mean") {
  CHECK(prior_mean(BetaBelief(1, 1)) == 0.5);
  CHECK(prior_mean(BetaBelief(2, 6)) == 0.25);
  CHECK(prior_mean(BetaBelief(3, 5)) == 0.375);
}

TEST_CASE("type invariants are enforced") {
  CHECK_THROWS_AS(BetaBelief(0.0, 1.0), InvalidArgumentError);
  CHECK_THROWS_AS(BetaBelief(1.0, -2.0), InvalidArgumentError);
  CHECK_THROWS_AS(EvidenceCounts(-1, 0), InvalidArgumentError);
  CHECK_THROWS_AS(InfoShock(1.5, 10.0), InvalidArgumentError);
  CHECK_THROWS_AS(InfoShock(0.5, 0.0), InvalidArgumentError);
  CHECK_THROWS_AS(QualityWeight(-0.1), InvalidArgumentError);
}

TEST_CASE("update_conjugate") {
  {
    const auto post = update_conjugate(BetaBelief(1, 1), EvidenceCounts(0, 0));
    CHECK(post.alpha == 1.0);
    CHECK(post.beta == 1.0);
  }
  {
    const auto post = update_conjugate(BetaBelief(2, 2), EvidenceCounts(1, 3));
    CHECK(post.alpha == 3.0);
    CHECK(post.beta == 5.0);
    CHECK(prior_mean(post) == 0.375);
  }
  {
    const auto post = update_conjugate(BetaBelief(5, 95), EvidenceCounts(37, 99963));
    CHECK(post.alpha == 42.0);
    CHECK(post.beta == 100058.0);
    CHECK(prior_mean(post) == doctest::Approx(42.0 / 100100.0).epsilon(1e-15));
  }
}

TEST_CASE("posterior_mean_structural worked values") {
  CHECK(posterior_mean_structural(0.5, InfoShock(0.25, 4.0), 4.0) ==
        doctest::Approx(0.375).epsilon(1e-15));
  CHECK(posterior_mean_structural(0.37, InfoShock(0.37, 123.0), 9.0) ==
        doctest::Approx(0.37).epsilon(1e-15));
  CHECK(posterior_mean_structural(0.8, InfoShock(0.0, 9.0), 1.0) ==
        doctest::Approx(0.08).epsilon(1e-15));
  CHECK_THROWS_AS(posterior_mean_structural(0.5, InfoShock(0.5, 1.0), 0.0),
                  InvalidArgumentError);
}

TEST_CASE("posterior_mean_quality limits") {
  CHECK(posterior_mean_quality(0.9, 0.01, QualityWeight(0.0)) == 0.9);
  CHECK(posterior_mean_quality(0.9, 0.01, QualityWeight(1.0)) ==
        doctest::Approx(0.455).epsilon(1e-15));
  CHECK(std::fabs(posterior_mean_quality(0.9, 0.01, QualityWeight(1e9)) - 0.01) < 1e-6);
}

TEST_CASE("conjugacy and reparameterization equivalences over random draws") {
  std::mt19937 gen(42);
  std::uniform_real_distribution<double> shape(0.1, 100.0);
  std::uniform_int_distribution<long> count(0, 10000);
  for (int i = 0; i < 2000; ++i) {
    const double a = shape(gen);
    const double b = shape(gen);
    long n1 = count(gen);
    long n0 = count(gen);
    if (n1 + n0 == 0) n1 = 1;
    const double n = static_cast<double>(n1 + n0);

    const BetaBelief prior(a, b);
    const double pi0 = prior_mean(prior);
    const double exact = prior_mean(update_conjugate(prior, EvidenceCounts(n1, n0)));

    const InfoShock shock(static_cast<double>(n1) / n, n);
    const double structural = posterior_mean_structural(pi0, shock, a + b);
    CHECK(std::fabs(structural - exact) < 1e-12);

    const double quality =
        posterior_mean_quality(pi0, shock.pi_star, QualityWeight(n / (a + b)));
    CHECK(std::fabs(quality - structural) < 1e-12);

    const double lo = std::min(pi0, shock.pi_star);
    const double hi = std::max(pi0, shock.pi_star);
    CHECK(structural >= lo - 1e-15);
    CHECK(structural <= hi + 1e-15);
  }
}

TEST_CASE("posterior mean is non-increasing in eta when pi0 > pi_star") {
  std::mt19937 gen(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    double pi0 = u(gen);
    double pi_star = u(gen);
    if (pi0 < pi_star) std::swap(pi0, pi_star);
    double prev = posterior_mean_quality(pi0, pi_star, QualityWeight(0.0));
    CHECK(prev == pi0);
    for (int g = 1; g <= 100; ++g) {
      const double eta = std::pow(10.0, -3.0 + 6.0 * g / 100.0);
      const double cur = posterior_mean_quality(pi0, pi_star, QualityWeight(eta));
      CHECK(cur <= prev);
      prev = cur;
    }
  }
}
