#pragma once

#include <Eigen/Core>

#include <functional>

#include "skeptic/errors.hpp"

namespace skeptic::numerics {

// ---- standard-normal distribution ----------------------------------------

// (2*pi)^(-1/2) * exp(-x^2/2)
double std_normal_pdf(double x);

// Phi(x) via erfc; clamps to exact 0/1 for |x| >= 38.5 so the deep tail
// never returns denormal noise.
double std_normal_cdf(double x);

// log Phi(x), stable down to x ~ -1e7 (asymptotic expansion in the tail).
double std_normal_logcdf(double x);

// Inverse of Phi, Wichura's AS241 (PPND16), ~1 ulp over (0,1).
double std_normal_quantile(double p);

// phi(z)/Phi(z); tends to -z as z -> -inf without overflow.
double inverse_mills(double z);

// ---- tail probabilities for reporting -------------------------------------

double regularized_incomplete_beta(double a, double b, double x);
double regularized_gamma_q(double a, double x);  // upper tail Q(a, x)

double student_t_cdf(double t, double df);
double student_t_two_sided_p(double t, double df);
double normal_two_sided_p(double z);
double chi_square_sf(double x, double df);
double f_distribution_sf(double f, double df1, double df2);

// ---- smooth maximization ---------------------------------------------------

struct ObjectiveEvaluation {
  double value = 0.0;
  Eigen::VectorXd gradient;
};

using Objective = std::function<ObjectiveEvaluation(const Eigen::VectorXd&)>;

struct ConvergenceSpec {
  double gradient_tol = 1e-8;      // max-norm of the gradient
  double objective_rel_tol = 1e-12;
  int max_iterations = 500;
};

struct OptimResult {
  Eigen::VectorXd argmax;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;  // true only when the gradient test passed
  double gradient_norm = 0.0;
};

// Called after every accepted ascent step with the new objective value.
using StepObserver = std::function<void(int iteration, double value)>;

// BFGS ascent with backtracking (Armijo) line search. Accepted steps never
// decrease the objective. Throws NonFiniteError if the objective or its
// gradient is non-finite at an accepted point; an iteration-cap exit returns
// the best point found with converged = false.
OptimResult maximize(const Objective& objective, Eigen::VectorXd start,
                     const ConvergenceSpec& spec = {},
                     const StepObserver& observer = {});

// Worst relative discrepancy between the analytic gradient and central
// finite differences (step 1e-6 * max(1, |theta_k|), denominator
// max(1, |analytic_k|)).
double grad_check(const Objective& objective, const Eigen::VectorXd& point);

// Central-difference Hessian of the objective's gradient,
// step 1e-5 * max(1, |theta_k|); symmetrized.
Eigen::MatrixXd fd_hessian(const Objective& objective,
                           const Eigen::VectorXd& point);

}  // namespace skeptic::numerics
