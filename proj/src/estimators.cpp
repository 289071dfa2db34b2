#include "skeptic/estimators.hpp"

#include <Eigen/Dense>

#include <cmath>

#include "skeptic/dataio.hpp"
#include "skeptic/likelihoods.hpp"
#include "skeptic/numerics.hpp"

namespace skeptic::estimators {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void require_full_rank(const MatrixXd& z, const std::string& what) {
  Eigen::ColPivHouseholderQR<MatrixXd> qr(z);
  qr.setThreshold(1e-10);
  if (qr.rank() < z.cols()) {
    throw RankDeficientError(what + ": design matrix is rank deficient (rank " +
                             std::to_string(qr.rank()) + " of " +
                             std::to_string(z.cols()) + ")");
  }
}

int intercept_index(const std::vector<std::string>& names) {
  for (size_t j = 0; j < names.size(); ++j) {
    if (names[j] == "const") return static_cast<int>(j);
  }
  throw InvalidArgumentError("design matrix has no 'const' column");
}

// Centers and scales non-constant columns so the optimizer works on O(1)
// parameters; coefficients and covariance map back through the affine matrix A
// with theta_raw = A * theta_std.
struct Standardizer {
  VectorXd center;
  VectorXd scale;
  int intercept = 0;

  static Standardizer fit(const MatrixXd& z, int intercept_col) {
    Standardizer s;
    s.intercept = intercept_col;
    const long k = z.cols();
    s.center = VectorXd::Zero(k);
    s.scale = VectorXd::Ones(k);
    const double n = static_cast<double>(z.rows());
    for (long j = 0; j < k; ++j) {
      if (j == intercept_col) continue;
      const double m = z.col(j).mean();
      const double sd = std::sqrt((z.col(j).array() - m).square().sum() / n);
      if (sd > 0.0) {
        s.center[j] = m;
        s.scale[j] = sd;
      }
    }
    return s;
  }

  MatrixXd apply(const MatrixXd& z) const {
    MatrixXd out = z;
    for (long j = 0; j < z.cols(); ++j) {
      if (j == intercept) continue;
      out.col(j) = (z.col(j).array() - center[j]) / scale[j];
    }
    return out;
  }

  MatrixXd backmap() const {
    const long k = center.size();
    MatrixXd a = MatrixXd::Zero(k, k);
    for (long j = 0; j < k; ++j) {
      if (j == intercept) {
        a(intercept, intercept) = 1.0;
      } else {
        a(j, j) = 1.0 / scale[j];
        a(intercept, j) = -center[j] / scale[j];
      }
    }
    return a;
  }
};

MatrixXd mle_covariance(const numerics::Objective& objective, const VectorXd& at,
                        const std::string& what) {
  const MatrixXd info = -numerics::fd_hessian(objective, at);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(info);
  if (es.eigenvalues().minCoeff() <= 0.0) {
    throw RankDeficientError(what + ": observed information is not positive definite");
  }
  return es.eigenvectors() *
         es.eigenvalues().cwiseInverse().asDiagonal() *
         es.eigenvectors().transpose();
}

double link_cdf(Link link, double x) {
  if (link == Link::probit) return numerics::std_normal_cdf(x);
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double link_density(Link link, double x) {
  if (link == Link::probit) return numerics::std_normal_pdf(x);
  const double p = link_cdf(Link::logit, x);
  return p * (1.0 - p);
}

double link_density_deriv(Link link, double x) {
  if (link == Link::probit) return -x * numerics::std_normal_pdf(x);
  const double p = link_cdf(Link::logit, x);
  return p * (1.0 - p) * (1.0 - 2.0 * p);
}

double record_value(const dataio::SurveyRecord& row, const std::string& name) {
  if (name == "const") return 1.0;
  const auto v = dataio::field_value(row, name);
  if (!v) throw MissingCovariateError("covariate '" + name + "' missing on row");
  return *v;
}

}  // namespace

std::string to_string(Link link) {
  return link == Link::probit ? "probit" : "logit";
}

std::string to_string(Transform transform) {
  return transform == Transform::log_scale ? "log" : "identity";
}

LinearFit fit_ols(const VectorXd& y, const DesignMatrix& x) {
  const long n = x.values.rows();
  const long k = x.values.cols();
  if (y.size() != n) throw ConformabilityError("fit_ols: y and X row counts differ");
  if (n <= k) {
    throw InsufficientObservationsError("fit_ols: need n > k, have n = " +
                                        std::to_string(n) + ", k = " + std::to_string(k));
  }
  require_full_rank(x.values, "fit_ols");

  Eigen::ColPivHouseholderQR<MatrixXd> qr(x.values);
  const VectorXd beta = qr.solve(y);
  const VectorXd resid = y - x.values * beta;
  const double rss = resid.squaredNorm();
  const double sigma2 = rss / static_cast<double>(n - k);

  const MatrixXd xtx_inv =
      (x.values.transpose() * x.values).ldlt().solve(MatrixXd::Identity(k, k));

  LinearFit fit;
  fit.names = x.names;
  fit.coefficients = beta;
  fit.standard_errors = (sigma2 * xtx_inv.diagonal().array()).sqrt();
  fit.residual_std_error = std::sqrt(sigma2);
  fit.n = n;

  const double ybar = y.mean();
  const double tss = (y.array() - ybar).square().sum();
  fit.f_df1 = static_cast<int>(k - 1);
  fit.f_df2 = n - k;
  if (tss > 0.0) {
    fit.r_squared = 1.0 - rss / tss;
    fit.adj_r_squared = 1.0 - (1.0 - fit.r_squared) *
                                  (static_cast<double>(n - 1) / static_cast<double>(n - k));
    fit.f_statistic = (k > 1 && rss > 0.0)
                          ? (fit.r_squared / static_cast<double>(k - 1)) /
                                ((1.0 - fit.r_squared) / static_cast<double>(n - k))
                          : 0.0;
  } else {
    fit.r_squared = 0.0;
    fit.adj_r_squared = 0.0;
    fit.f_statistic = 0.0;
  }
  return fit;
}

BinaryFit fit_binary(const VectorXd& y, const DesignMatrix& x, Link link) {
  const long n = x.values.rows();
  const long k = x.values.cols();
  if (y.size() != n) throw ConformabilityError("fit_binary: y and X row counts differ");
  long ones = 0;
  for (long i = 0; i < n; ++i) {
    if (y[i] != 0.0 && y[i] != 1.0) {
      throw InvalidArgumentError("fit_binary: y must be 0/1");
    }
    ones += y[i] == 1.0 ? 1 : 0;
  }
  if (ones == 0 || ones == n) {
    throw SingleClassError("fit_binary: y contains a single class");
  }
  require_full_rank(x.values, "fit_binary");

  const int ic = intercept_index(x.names);
  const Standardizer std_map = Standardizer::fit(x.values, ic);
  const MatrixXd zs = std_map.apply(x.values);

  const numerics::Objective objective =
      link == Link::probit ? probit_loglik(y, zs) : logit_loglik(y, zs);
  const numerics::OptimResult res = maximize(objective, VectorXd::Zero(k));

  const VectorXd eta = zs * res.argmax;
  const double max_index = eta.cwiseAbs().maxCoeff();
  if (max_index > 30.0) {
    throw SeparationError("fit_binary: fitted |index| reaches " +
                          std::to_string(max_index) + "; probabilities saturate");
  }

  const MatrixXd cov_std = mle_covariance(objective, res.argmax, "fit_binary");
  const MatrixXd a = std_map.backmap();

  BinaryFit fit;
  fit.link = link;
  fit.names = x.names;
  fit.coefficients = a * res.argmax;
  fit.covariance = a * cov_std * a.transpose();
  fit.standard_errors = fit.covariance.diagonal().array().sqrt();
  fit.log_likelihood = res.value;
  fit.aic = 2.0 * static_cast<double>(k) - 2.0 * res.value;
  fit.n = n;
  fit.converged = res.converged;
  return fit;
}

std::pair<double, VectorXd> tobit_scale_map(double gamma, const VectorXd& delta) {
  return {1.0 - gamma, -delta};
}

TobitFit fit_tobit_generalized(const VectorXd& prior, const VectorXd& post,
                               const DesignMatrix& x, const TobitOptions& options) {
  const long n = x.values.rows();
  const long kx = x.values.cols();
  if (prior.size() != n || post.size() != n) {
    throw ConformabilityError("fit_tobit_generalized: row counts differ");
  }
  for (long i = 0; i < n; ++i) {
    if (post[i] > prior[i]) {
      throw InvalidArgumentError(
          "fit_tobit_generalized: post > prior at row " + std::to_string(i) +
          "; upward updates are outside this model");
    }
  }

  const VectorXd y = prior - post;
  long censored = 0;
  for (long i = 0; i < n; ++i) censored += y[i] <= 0.0 ? 1 : 0;
  if (censored == n) {
    throw AllCensoredError("fit_tobit_generalized: every observation is censored");
  }
  if (censored == 0 && !options.allow_no_censoring) {
    throw NoCensoringError(
        "fit_tobit_generalized: no censored observations; use fit_ols");
  }

  // regressors (prior, X); prior slot first
  MatrixXd z(n, kx + 1);
  z.col(0) = prior;
  z.rightCols(kx) = x.values;
  std::vector<std::string> names;
  names.push_back("prior");
  for (const auto& nm : x.names) names.push_back(nm);
  require_full_rank(z, "fit_tobit_generalized");

  const int ic = intercept_index(names);
  const Standardizer std_map = Standardizer::fit(z, ic);
  const MatrixXd zs = std_map.apply(z);

  // start at OLS of y on z with the n-denominator residual scale
  VectorXd start(kx + 2);
  const VectorXd beta0 = zs.colPivHouseholderQr().solve(y);
  const double rss0 = (y - zs * beta0).squaredNorm();
  start.head(kx + 1) = beta0;
  start[kx + 1] = 0.5 * std::log(std::max(rss0 / static_cast<double>(n), 1e-12));

  const numerics::Objective objective = tobit_loglik(y, zs);
  const numerics::OptimResult res = maximize(objective, start);

  const MatrixXd cov_std = mle_covariance(objective, res.argmax, "fit_tobit_generalized");

  // map (theta_std, log sigma) back to the raw covariate scale
  const long p = kx + 2;
  MatrixXd a_full = MatrixXd::Zero(p, p);
  a_full.topLeftCorner(kx + 1, kx + 1) = std_map.backmap();
  a_full(p - 1, p - 1) = 1.0;
  const VectorXd params = a_full * res.argmax;
  const MatrixXd cov_theta = a_full * cov_std * a_full.transpose();

  TobitFit fit;
  fit.names = names;
  fit.theta = params.head(kx + 1);
  fit.theta_se = cov_theta.topLeftCorner(kx + 1, kx + 1).diagonal().array().sqrt();
  fit.sigma = std::exp(params[p - 1]);
  fit.log_likelihood = res.value;
  fit.n = n;
  fit.n_censored = censored;
  fit.converged = res.converged;

  auto [gamma, delta] = tobit_scale_map(fit.theta[0], fit.theta.tail(kx));
  fit.gamma = gamma;
  fit.delta = delta;

  // covariance on the (gamma, delta..., log sigma) scale: the theta block
  // flips sign jointly, so only the log-sigma cross terms change sign
  MatrixXd d = MatrixXd::Identity(p, p) * -1.0;
  d(p - 1, p - 1) = 1.0;
  fit.covariance = d * cov_theta * d;

  // joint test that all printed slopes (everything but the intercept) vanish
  std::vector<int> slope_idx;
  for (size_t j = 0; j < names.size(); ++j) {
    if (names[j] != "const") slope_idx.push_back(static_cast<int>(j));
  }
  const int m = static_cast<int>(slope_idx.size());
  VectorXd b(m);
  MatrixXd v(m, m);
  for (int r = 0; r < m; ++r) {
    b[r] = fit.theta[slope_idx[r]];
    for (int c = 0; c < m; ++c) v(r, c) = cov_theta(slope_idx[r], slope_idx[c]);
  }
  fit.wald_statistic = b.dot(v.ldlt().solve(b));
  fit.wald_df = m;
  fit.wald_p = numerics::chi_square_sf(fit.wald_statistic, m);
  return fit;
}

SkepticismCall classify_skepticism(const TobitFit& fit, double boundary_tol) {
  SkepticismCall call;
  if (std::fabs(fit.gamma - 1.0) < boundary_tol) {
    call.agents = AgentClass::Indeterminate;
  } else {
    call.agents = fit.gamma > 1.0 ? AgentClass::Skeptical : AgentClass::Updater;
  }
  for (long j = 0; j < fit.delta.size(); ++j) {
    const std::string& name = fit.names[1 + j];
    if (name == "const") continue;
    CovariateDirection dir;
    dir.name = name;
    const double d = fit.delta[j];
    dir.sign = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
    dir.label = d > 0.0   ? "raises latent posterior (against update)"
                : d < 0.0 ? "lowers latent posterior (toward update)"
                          : "no direction";
    call.directions.push_back(std::move(dir));
  }
  return call;
}

HurdleFit fit_hurdle(const dataio::Dataset& data,
                     const std::vector<std::string>& change_covariates,
                     const std::vector<std::string>& level_covariates,
                     Link link, Transform transform) {
  HurdleFit fit;
  fit.transform = transform;

  const AnalysisFrame change_frame = make_frame(data, change_covariates);
  if ((change_frame.change.array() == 1.0).count() == 0) {
    throw EmptyUpdaterSubsampleError("fit_hurdle: no updaters in the sample");
  }
  fit.change_stage = fit_binary(change_frame.change,
                                design_with_prior(change_frame), link);

  const AnalysisFrame level_frame = make_frame(data, level_covariates);
  std::vector<long> updaters;
  for (long i = 0; i < level_frame.change.size(); ++i) {
    if (level_frame.change[i] == 1.0) updaters.push_back(i);
  }
  if (updaters.empty()) {
    throw EmptyUpdaterSubsampleError("fit_hurdle: no updaters in the sample");
  }

  const DesignMatrix level_full = design_with_prior(level_frame);
  DesignMatrix level_x;
  level_x.names = level_full.names;
  level_x.values.resize(static_cast<long>(updaters.size()), level_full.values.cols());
  VectorXd g(static_cast<long>(updaters.size()));
  for (size_t r = 0; r < updaters.size(); ++r) {
    level_x.values.row(static_cast<long>(r)) = level_full.values.row(updaters[r]);
    const double post = level_frame.post[updaters[r]];
    if (transform == Transform::log_scale) {
      if (!(post > 0.0)) {
        throw InvalidArgumentError("fit_hurdle: log transform needs post > 0");
      }
      g[static_cast<long>(r)] = std::log(post);
    } else {
      g[static_cast<long>(r)] = post;
    }
  }
  fit.level_stage = fit_ols(g, level_x);
  fit.sigma = fit.level_stage.residual_std_error;
  return fit;
}

HurdleExpectation hurdle_expectation(const HurdleFit& fit,
                                     const dataio::SurveyRecord& row) {
  if (fit.transform != Transform::log_scale) {
    throw TransformMismatchError(
        "hurdle_expectation: closed form requires the log transform");
  }
  double level_index = 0.0;
  for (size_t j = 0; j < fit.level_stage.names.size(); ++j) {
    level_index += fit.level_stage.coefficients[static_cast<long>(j)] *
                   record_value(row, fit.level_stage.names[j]);
  }
  double change_index = 0.0;
  for (size_t j = 0; j < fit.change_stage.names.size(); ++j) {
    change_index += fit.change_stage.coefficients[static_cast<long>(j)] *
                    record_value(row, fit.change_stage.names[j]);
  }
  HurdleExpectation out;
  out.conditional = std::exp(level_index + 0.5 * fit.sigma * fit.sigma);
  out.unconditional = link_cdf(fit.change_stage.link, change_index) * out.conditional;
  return out;
}

MarginalEffects marginal_effects(const BinaryFit& fit, const DesignMatrix& x) {
  if (x.names != fit.names || x.values.cols() != fit.coefficients.size()) {
    throw ConformabilityError("marginal_effects: X does not match the fit");
  }
  const long n = x.values.rows();
  const long k = x.values.cols();
  if (n == 0) throw ConformabilityError("marginal_effects: empty X");
  const VectorXd eta = x.values * fit.coefficients;

  MarginalEffects out;
  for (long j = 0; j < k; ++j) {
    if (x.names[j] == "const") continue;
    const bool is_dummy = [&] {
      for (long i = 0; i < n; ++i) {
        const double v = x.values(i, j);
        if (v != 0.0 && v != 1.0) return false;
      }
      return true;
    }();

    double ame = 0.0;
    VectorXd grad = VectorXd::Zero(k);
    if (is_dummy) {
      // average discrete difference of fitted probabilities flipping x_j
      for (long i = 0; i < n; ++i) {
        const double base = eta[i] - x.values(i, j) * fit.coefficients[j];
        const double z1 = base + fit.coefficients[j];
        const double z0 = base;
        ame += link_cdf(fit.link, z1) - link_cdf(fit.link, z0);
        const double f1 = link_density(fit.link, z1);
        const double f0 = link_density(fit.link, z0);
        for (long m = 0; m < k; ++m) {
          const double xm = x.values(i, m);
          const double x1 = m == j ? 1.0 : xm;
          const double x0 = m == j ? 0.0 : xm;
          grad[m] += f1 * x1 - f0 * x0;
        }
      }
    } else {
      // AME_j = beta_j * mean g(eta_i)
      for (long i = 0; i < n; ++i) {
        const double g = link_density(fit.link, eta[i]);
        const double gp = link_density_deriv(fit.link, eta[i]);
        ame += g * fit.coefficients[j];
        grad += gp * fit.coefficients[j] * x.values.row(i).transpose();
        grad[j] += g;
      }
    }
    ame /= static_cast<double>(n);
    grad /= static_cast<double>(n);

    out.names.push_back(x.names[j]);
    out.discrete.push_back(is_dummy);
    const long idx = static_cast<long>(out.names.size()) - 1;
    out.ame.conservativeResize(idx + 1);
    out.standard_errors.conservativeResize(idx + 1);
    out.ame[idx] = ame;
    out.standard_errors[idx] = std::sqrt(grad.dot(fit.covariance * grad));
  }
  return out;
}

PredictionReport predict_change(const BinaryFit& fit, const dataio::Dataset& data,
                                double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw InvalidArgumentError("predict_change: threshold must lie in [0,1]");
  }
  PredictionReport report;
  report.threshold = threshold;
  for (const auto& row : data.rows) {
    if (!row.valid) continue;
    double index = 0.0;
    bool complete = true;
    for (size_t j = 0; j < fit.names.size(); ++j) {
      if (fit.names[j] == "const") {
        index += fit.coefficients[static_cast<long>(j)];
        continue;
      }
      const auto v = dataio::field_value(row, fit.names[j]);
      if (!v) {
        complete = false;
        break;
      }
      index += fit.coefficients[static_cast<long>(j)] * (*v);
    }
    if (!complete) continue;
    const double p = link_cdf(fit.link, index);
    const int predicted = p >= threshold ? 1 : 0;
    const int observed = row.change;
    ++report.n;
    report.confusion[observed][predicted] += 1;
    if (predicted == observed) ++report.n_correct;
  }
  if (report.n == 0) {
    throw MissingCovariateError("predict_change: no usable rows");
  }
  report.success_rate =
      static_cast<double>(report.n_correct) / static_cast<double>(report.n);
  return report;
}

}  // namespace skeptic::estimators
