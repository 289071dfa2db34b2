#pragma once

#include <Eigen/Core>

#include "skeptic/numerics.hpp"

namespace skeptic::estimators {

// Log-likelihood objectives with analytic gradients, shared by the fitters
// and by the gradient-fidelity checks. Parameter vectors run over the columns
// of z; the censored objective appends log(sigma) as its last parameter.

// Bernoulli log-likelihood with a probit link: params beta (z columns).
numerics::Objective probit_loglik(Eigen::VectorXd y, Eigen::MatrixXd z);

// Bernoulli log-likelihood with a logit link: params beta.
numerics::Objective logit_loglik(Eigen::VectorXd y, Eigen::MatrixXd z);

// Censored-at-zero normal regression: params (theta, log sigma).
// Rows with y == 0 contribute log(1 - Phi(z'theta/sigma)); positive rows
// contribute log phi((y - z'theta)/sigma) - log sigma.
numerics::Objective tobit_loglik(Eigen::VectorXd y, Eigen::MatrixXd z);

// Gaussian regression log-likelihood with sigma profiled out: params beta.
numerics::Objective ols_profiled_loglik(Eigen::VectorXd y, Eigen::MatrixXd z);

}  // namespace skeptic::estimators
