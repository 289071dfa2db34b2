#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "skeptic/estimators.hpp"
#include "skeptic/survey.hpp"

namespace skeptic::simulate {

enum class DgpModel { tobit, hurdle };

std::string to_string(DgpModel model);

// Per-covariate sampling laws; defaults are the survey sample moments.
// The truncated (Prior) and discretized (Age, Police) normals are
// re-parameterized internally so the realized mean/sd hit the targets.
struct CovariateLaws {
  double gender_p = 0.53;
  double age_mean = 38.55;
  double age_sd = 16.23;
  int age_min = 16;
  int age_max = 94;
  double police_mean = 2.95;
  double police_sd = 0.96;
  int police_min = 1;
  int police_max = 5;
  double educ_int_p = 0.83;
  double matching_p = 0.77;
  double prior_mean = 34.91;
  double prior_sd = 26.49;
  double prior_min = 1.0;
  double prior_max = 98.0;
  // exchangeable Gaussian-copula correlation across the covariate margins;
  // 0 draws them independently
  double copula_rho = 0.0;
};

// Linear index over the schema covariates; unused slots stay zero.
struct IndexCoeffs {
  double intercept = 0.0;
  double prior = 0.0;
  double age = 0.0;
  double gender = 0.0;
  double police = 0.0;
  double educ_int = 0.0;
  double matching_gender = 0.0;
};

void set_coeff(IndexCoeffs& coeffs, const std::string& name, double value);

struct DgpConfig {
  DgpModel model = DgpModel::tobit;
  long n = 2885;
  std::uint64_t seed = 1;
  CovariateLaws laws;

  // tobit: Post* = tobit-index + Normal(0, sigma^2), Post = min(Prior, Post*).
  // `tobit.prior` is the structural gamma; the rest are delta.
  IndexCoeffs tobit;
  double sigma = 100.0;

  // hurdle: Change ~ Bernoulli(Phi(change-index)); given an update,
  // G(Post) = level-index + Normal(0, level_sigma^2).
  IndexCoeffs change;
  IndexCoeffs level;
  double level_sigma = 0.8;
  estimators::Transform transform = estimators::Transform::log_scale;

  // Keep simulated Post inside the instrument range [0.1, Prior). The
  // parameter-recovery harness switches this off so the data law is exactly
  // the estimator's model.
  bool clamp_post = true;

  // covariate lists the Monte-Carlo harness hands the estimators
  std::vector<std::string> tobit_covariates = {"age", "gender", "matching_gender",
                                               "educ_int"};
  std::vector<std::string> change_covariates = {"age", "gender", "matching_gender",
                                                "educ_int"};
  std::vector<std::string> level_covariates = {"age", "gender", "matching_gender",
                                               "educ_int", "police"};
  estimators::Link link = estimators::Link::probit;
};

void validate(const DgpConfig& config);

// Survey-sample truths: gamma = 0.498, delta = (+0.728 age, +18.036 gender,
// -63.480 matching, -19.307 educ_int, +232.149 const), sigma calibrated so
// ~95.6% of respondents keep their prior.
DgpConfig default_tobit_config();

// Two-stage truths: the probit changing-decision coefficients plus the
// updater-subsample level equation (identity scale).
DgpConfig default_hurdle_config();

dataio::Dataset simulate_survey(const DgpConfig& config);

// Bisects sigma until the expected non-updater share hits `target` under the
// config's covariate laws and tobit coefficients. Uses its own fixed draw
// stream, so the result depends only on the config values.
double calibrate_sigma(const DgpConfig& config, double target = 0.956,
                       long draws = 50000);

struct ParamSummary {
  std::string name;
  double truth = 0.0;
  double mean = 0.0;
  double bias = 0.0;
  double mc_se = 0.0;  // sd / sqrt(successful replications)
  double sd = 0.0;
  double coverage = 0.0;  // share of nominal-95% intervals covering the truth
};

struct McReport {
  long replications = 0;
  long failures = 0;
  std::vector<std::string> failure_notes;
  std::vector<ParamSummary> params;
};

// Simulates `replications` datasets with seeds derived from (config.seed, r),
// fits the matching estimator, and summarizes recovery per parameter.
// Honors SKEPTIC_UPDATE_THREADS; results do not depend on the thread count.
McReport mc_recover(const DgpConfig& config, long replications);

}  // namespace skeptic::simulate
