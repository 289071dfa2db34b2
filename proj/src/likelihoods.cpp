#include "skeptic/likelihoods.hpp"

#include <cmath>
#include <utility>

namespace skeptic::estimators {

namespace {

constexpr double kLogSqrt2Pi = 0.9189385332046727417803297;

double softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::fabs(x)));
}

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

numerics::Objective probit_loglik(Eigen::VectorXd y, Eigen::MatrixXd z) {
  return [y = std::move(y), z = std::move(z)](const Eigen::VectorXd& beta) {
    numerics::ObjectiveEvaluation out;
    out.gradient = Eigen::VectorXd::Zero(z.cols());
    const Eigen::VectorXd eta = z * beta;
    double ll = 0.0;
    for (long i = 0; i < z.rows(); ++i) {
      if (y[i] > 0.5) {
        ll += numerics::std_normal_logcdf(eta[i]);
        out.gradient += numerics::inverse_mills(eta[i]) * z.row(i).transpose();
      } else {
        ll += numerics::std_normal_logcdf(-eta[i]);
        out.gradient -= numerics::inverse_mills(-eta[i]) * z.row(i).transpose();
      }
    }
    out.value = ll;
    return out;
  };
}

numerics::Objective logit_loglik(Eigen::VectorXd y, Eigen::MatrixXd z) {
  return [y = std::move(y), z = std::move(z)](const Eigen::VectorXd& beta) {
    numerics::ObjectiveEvaluation out;
    const Eigen::VectorXd eta = z * beta;
    double ll = 0.0;
    Eigen::VectorXd w(z.rows());
    for (long i = 0; i < z.rows(); ++i) {
      ll += y[i] * eta[i] - softplus(eta[i]);
      w[i] = y[i] - logistic(eta[i]);
    }
    out.value = ll;
    out.gradient = z.transpose() * w;
    return out;
  };
}

numerics::Objective tobit_loglik(Eigen::VectorXd y, Eigen::MatrixXd z) {
  return [y = std::move(y), z = std::move(z)](const Eigen::VectorXd& params) {
    const long k = z.cols();
    const Eigen::VectorXd theta = params.head(k);
    const double log_sigma = params[k];
    const double sigma = std::exp(log_sigma);

    numerics::ObjectiveEvaluation out;
    out.gradient = Eigen::VectorXd::Zero(k + 1);
    const Eigen::VectorXd index = z * theta;
    double ll = 0.0;
    for (long i = 0; i < z.rows(); ++i) {
      if (y[i] <= 0.0) {
        const double a = index[i] / sigma;
        ll += numerics::std_normal_logcdf(-a);
        const double mills = numerics::inverse_mills(-a);
        out.gradient.head(k) -= (mills / sigma) * z.row(i).transpose();
        out.gradient[k] += mills * a;
      } else {
        const double r = (y[i] - index[i]) / sigma;
        ll += -0.5 * r * r - log_sigma - kLogSqrt2Pi;
        out.gradient.head(k) += (r / sigma) * z.row(i).transpose();
        out.gradient[k] += r * r - 1.0;
      }
    }
    out.value = ll;
    return out;
  };
}

numerics::Objective ols_profiled_loglik(Eigen::VectorXd y, Eigen::MatrixXd z) {
  return [y = std::move(y), z = std::move(z)](const Eigen::VectorXd& beta) {
    const double n = static_cast<double>(z.rows());
    const Eigen::VectorXd resid = y - z * beta;
    const double rss = resid.squaredNorm();
    numerics::ObjectiveEvaluation out;
    out.value = -0.5 * n * (2.0 * kLogSqrt2Pi + 1.0 + std::log(rss / n));
    out.gradient = (n / rss) * (z.transpose() * resid);
    return out;
  };
}

}  // namespace skeptic::estimators
