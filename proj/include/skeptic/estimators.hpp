#pragma once

#include <Eigen/Core>

#include <array>
#include <string>
#include <vector>

#include "skeptic/design.hpp"
#include "skeptic/survey.hpp"

namespace skeptic::estimators {

enum class Link { probit, logit };
enum class Transform { log_scale, identity };

std::string to_string(Link link);
std::string to_string(Transform transform);

// ---- fitted-model values -----------------------------------------------------

struct LinearFit {
  std::vector<std::string> names;
  Eigen::VectorXd coefficients;
  Eigen::VectorXd standard_errors;
  double residual_std_error = 0.0;  // sqrt(RSS/(n-k))
  double r_squared = 0.0;
  double adj_r_squared = 0.0;
  double f_statistic = 0.0;
  int f_df1 = 0;
  long f_df2 = 0;
  long n = 0;
};

struct BinaryFit {
  Link link = Link::probit;
  std::vector<std::string> names;
  Eigen::VectorXd coefficients;
  Eigen::VectorXd standard_errors;
  Eigen::MatrixXd covariance;
  double log_likelihood = 0.0;
  double aic = 0.0;
  long n = 0;
  bool converged = false;
};

// Censored regression of (prior - post) on (prior, X) with the censoring
// threshold at each respondent's own prior. `theta` is the transformed-model
// parameter the likelihood actually estimates; gamma/delta are the
// latent-posterior coefficients recovered through (1 - theta_prior, -theta_X).
struct TobitFit {
  std::vector<std::string> names;  // "prior", then X names ("const", ...)
  Eigen::VectorXd theta;           // transformed scale, aligned with names
  Eigen::VectorXd theta_se;
  double gamma = 0.0;
  Eigen::VectorXd delta;           // aligned with names[1..]
  double sigma = 0.0;
  Eigen::MatrixXd covariance;  // (gamma, delta..., log sigma) ordering
  double log_likelihood = 0.0;
  double wald_statistic = 0.0;
  int wald_df = 0;
  double wald_p = 1.0;
  long n = 0;
  long n_censored = 0;
  bool converged = false;
};

struct HurdleFit {
  BinaryFit change_stage;
  LinearFit level_stage;
  Transform transform = Transform::log_scale;
  double sigma = 0.0;  // level-stage residual std. error
};

struct PredictionReport {
  double threshold = 0.5;
  long n = 0;
  long n_correct = 0;
  double success_rate = 0.0;
  std::array<std::array<long, 2>, 2> confusion{};  // [observed][predicted]
};

struct MarginalEffects {
  std::vector<std::string> names;  // non-intercept terms
  Eigen::VectorXd ame;
  Eigen::VectorXd standard_errors;
  std::vector<bool> discrete;  // average discrete difference vs derivative
};

enum class AgentClass { Skeptical, Updater, Indeterminate };

struct CovariateDirection {
  std::string name;
  int sign = 0;  // sign of delta_k
  std::string label;
};

struct SkepticismCall {
  AgentClass agents = AgentClass::Indeterminate;
  std::vector<CovariateDirection> directions;
};

// ---- operations ----------------------------------------------------------------

LinearFit fit_ols(const Eigen::VectorXd& y, const DesignMatrix& x);

BinaryFit fit_binary(const Eigen::VectorXd& y, const DesignMatrix& x, Link link);

struct TobitOptions {
  // Lets the censored likelihood run on data with no censored rows, where it
  // degenerates to normal regression. Off by default: that situation is a
  // NoCensoringError and plain OLS is the right tool.
  bool allow_no_censoring = false;
};

TobitFit fit_tobit_generalized(const Eigen::VectorXd& prior,
                               const Eigen::VectorXd& post,
                               const DesignMatrix& x,
                               const TobitOptions& options = {});

// gamma > 1: skeptics (higher priors stick); gamma < 1: updaters.
// |gamma - 1| below `boundary_tol` (half a printed 3-decimal digit) is
// reported Indeterminate.
SkepticismCall classify_skepticism(const TobitFit& fit,
                                   double boundary_tol = 5e-4);

// The (gamma, delta) <-> (1 - gamma, -delta) reparameterization; applying it
// twice is the identity.
std::pair<double, Eigen::VectorXd> tobit_scale_map(double gamma,
                                                   const Eigen::VectorXd& delta);

HurdleFit fit_hurdle(const dataio::Dataset& data,
                     const std::vector<std::string>& change_covariates,
                     const std::vector<std::string>& level_covariates,
                     Link link, Transform transform);

struct HurdleExpectation {
  double conditional = 0.0;    // E[post | covariates, update]
  double unconditional = 0.0;  // Phi(change index) * conditional
};

// Log-normal level stage only (TransformMismatchError otherwise).
HurdleExpectation hurdle_expectation(const HurdleFit& fit,
                                     const dataio::SurveyRecord& row);

MarginalEffects marginal_effects(const BinaryFit& fit, const DesignMatrix& x);

PredictionReport predict_change(const BinaryFit& fit,
                                const dataio::Dataset& data,
                                double threshold = 0.5);

}  // namespace skeptic::estimators
