#include "skeptic/numerics.hpp"

#include <cmath>
#include <limits>

namespace skeptic::numerics {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;
constexpr double kLogSqrt2Pi = 0.9189385332046727417803297;
constexpr double kInvSqrt2 = 0.7071067811865475244008444;

bool finite(double x) { return std::isfinite(x); }

}  // namespace

double std_normal_pdf(double x) {
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double std_normal_cdf(double x) {
  if (x <= -38.5) return 0.0;
  if (x >= 38.5) return 1.0;
  return 0.5 * std::erfc(-x * kInvSqrt2);
}

double std_normal_logcdf(double x) {
  if (x > 6.0) {
    // log(1 - Q) with Q tiny
    return std::log1p(-0.5 * std::erfc(x * kInvSqrt2));
  }
  if (x > -20.0) {
    return std::log(0.5 * std::erfc(-x * kInvSqrt2));
  }
  // Asymptotic expansion of Mills' ratio for the deep lower tail:
  // Phi(x) = phi(x)/(-x) * (1 - 1/x^2 + 3/x^4 - 15/x^6 + 105/x^8 - ...)
  const double z2 = x * x;
  double series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2) +
                  105.0 / (z2 * z2 * z2 * z2) - 945.0 / (z2 * z2 * z2 * z2 * z2);
  return -0.5 * z2 - kLogSqrt2Pi - std::log(-x) + std::log(series);
}

double std_normal_quantile(double p) {
  // Wichura (1988), algorithm AS241, PPND16.
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw OutOfRangeError("std_normal_quantile: p must be in [0,1]");
  }
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
               1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
               5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double x;
  if (r <= 5.0) {
    r -= 1.6;
    x = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
            3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
          4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
          2.05319162663775882187e+0) * r + 1.0);
  } else {
    r -= 5.0;
    x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
          5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0.0 ? -x : x;
}

double inverse_mills(double z) {
  if (z < -30.0) {
    // Phi(z) = phi(z)/(-z) * S(z) with S the tail series, so phi/Phi = -z/S.
    const double z2 = z * z;
    const double series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) -
                          15.0 / (z2 * z2 * z2) + 105.0 / (z2 * z2 * z2 * z2) -
                          945.0 / (z2 * z2 * z2 * z2 * z2);
    return -z / series;
  }
  return std_normal_pdf(z) / std_normal_cdf(z);
}

namespace {

// Continued fraction for the regularized incomplete beta (modified Lentz).
double beta_cf(double a, double b, double x) {
  const double tiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 300; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) {
    throw InvalidArgumentError("incomplete beta: a, b must be positive");
  }
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                       a * std::log(x) + b * std::log1p(-x);
  const double bt = std::exp(ln_bt);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return bt * beta_cf(a, b, x) / a;
  }
  return 1.0 - bt * beta_cf(b, a, 1.0 - x) / b;
}

double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) {
    throw InvalidArgumentError("incomplete gamma: bad arguments");
  }
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) {
    // series for P(a,x), return 1 - P
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 500; ++n) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
    }
    const double p = sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    return 1.0 - p;
  }
  // continued fraction for Q(a,x), modified Lentz
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double student_t_cdf(double t, double df) {
  if (!(df > 0.0)) throw InvalidArgumentError("student_t_cdf: df must be > 0");
  if (t == 0.0) return 0.5;
  const double x = df / (df + t * t);
  const double tail = 0.5 * regularized_incomplete_beta(0.5 * df, 0.5, x);
  return t > 0.0 ? 1.0 - tail : tail;
}

double student_t_two_sided_p(double t, double df) {
  const double x = df / (df + t * t);
  return regularized_incomplete_beta(0.5 * df, 0.5, x);
}

double normal_two_sided_p(double z) {
  return std::erfc(std::fabs(z) * kInvSqrt2);
}

double chi_square_sf(double x, double df) {
  if (x <= 0.0) return 1.0;
  return regularized_gamma_q(0.5 * df, 0.5 * x);
}

double f_distribution_sf(double f, double df1, double df2) {
  if (f <= 0.0) return 1.0;
  return regularized_incomplete_beta(0.5 * df2, 0.5 * df1,
                                     df2 / (df2 + df1 * f));
}

// ---- BFGS ascent ------------------------------------------------------------

namespace {

ObjectiveEvaluation checked_eval(const Objective& objective,
                                 const Eigen::VectorXd& x, int dim) {
  ObjectiveEvaluation e = objective(x);
  if (e.gradient.size() != dim) {
    throw ConformabilityError("objective gradient has wrong dimension");
  }
  return e;
}

bool eval_is_finite(const ObjectiveEvaluation& e) {
  return finite(e.value) && e.gradient.allFinite();
}

}  // namespace

OptimResult maximize(const Objective& objective, Eigen::VectorXd start,
                     const ConvergenceSpec& spec, const StepObserver& observer) {
  const int dim = static_cast<int>(start.size());
  if (dim == 0) throw InvalidArgumentError("maximize: empty start vector");
  if (!start.allFinite()) throw NonFiniteError("maximize: non-finite start");

  Eigen::VectorXd x = std::move(start);
  ObjectiveEvaluation cur = checked_eval(objective, x, dim);
  if (!eval_is_finite(cur)) {
    throw NonFiniteError("maximize: objective non-finite at start");
  }

  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(dim, dim);
  OptimResult result;
  result.iterations = 0;

  const double c1 = 1e-4;
  bool reset_since_fail = false;
  bool scaled_h = false;
  int stall_count = 0;
  double prev_grad_norm = cur.gradient.lpNorm<Eigen::Infinity>();

  for (int iter = 1; iter <= spec.max_iterations; ++iter) {
    const double grad_norm = cur.gradient.lpNorm<Eigen::Infinity>();
    if (grad_norm <= spec.gradient_tol) {
      result.converged = true;
      break;
    }

    Eigen::VectorXd direction = h * cur.gradient;
    double slope = direction.dot(cur.gradient);
    if (!(slope > 0.0) || !direction.allFinite()) {
      h.setIdentity();
      direction = cur.gradient;
      slope = direction.squaredNorm();
    }

    // Backtracking line search; Armijo condition on the ascent direction.
    // Once the true per-step gain falls below the floating-point resolution
    // of the objective, a step that strictly shrinks the gradient counts as
    // progress: the gradient stays accurately computable after the value
    // flattens out.
    const double noise = 4.0 * 2.22e-16 * (1.0 + std::fabs(cur.value));
    const double grad_norm_cur = cur.gradient.lpNorm<Eigen::Infinity>();
    double step = 1.0;
    bool accepted = false;
    ObjectiveEvaluation next;
    Eigen::VectorXd x_next;
    for (int ls = 0; ls < 60; ++ls) {
      x_next = x + step * direction;
      next = checked_eval(objective, x_next, dim);
      if (eval_is_finite(next)) {
        if (next.value >= cur.value + c1 * step * slope) {
          accepted = true;
          break;
        }
        if (std::fabs(next.value - cur.value) <= noise &&
            next.gradient.lpNorm<Eigen::Infinity>() < 0.999 * grad_norm_cur) {
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }

    if (!accepted) {
      if (!reset_since_fail) {
        // retry once from a fresh steepest-ascent state
        h.setIdentity();
        reset_since_fail = true;
        continue;
      }
      break;  // no ascent step exists at this scale; stop where we are
    }
    reset_since_fail = false;

    result.iterations = iter;
    if (observer) observer(iter, next.value);

    const Eigen::VectorXd s = x_next - x;
    const Eigen::VectorXd y = next.gradient - cur.gradient;
    const double sy = -s.dot(y);  // positive under concavity
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (!scaled_h) {
        // size the initial inverse curvature from the first accepted step
        h *= sy / y.squaredNorm();
        scaled_h = true;
      }
      // inverse-curvature (BFGS) update in ascent form
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd i = Eigen::MatrixXd::Identity(dim, dim);
      const Eigen::MatrixXd v = i + rho * s * y.transpose();
      h = v * h * v.transpose() + rho * s * s.transpose();
    }

    const double improvement = next.value - cur.value;
    x = std::move(x_next);
    cur = std::move(next);

    // Near the optimum the per-step objective gain drops below double
    // precision while the gradient is still contracting, so a stalled step
    // only counts when the gradient has also stopped improving.
    const double grad_now = cur.gradient.lpNorm<Eigen::Infinity>();
    if (std::fabs(improvement) <=
            spec.objective_rel_tol * (1.0 + std::fabs(cur.value)) &&
        grad_now > 0.99 * prev_grad_norm) {
      if (++stall_count >= 5) break;
    } else {
      stall_count = 0;
    }
    prev_grad_norm = grad_now;
  }

  result.gradient_norm = cur.gradient.lpNorm<Eigen::Infinity>();
  if (result.gradient_norm <= spec.gradient_tol) result.converged = true;
  result.argmax = std::move(x);
  result.value = cur.value;
  return result;
}

double grad_check(const Objective& objective, const Eigen::VectorXd& point) {
  const int dim = static_cast<int>(point.size());
  ObjectiveEvaluation at = checked_eval(objective, point, dim);
  if (!eval_is_finite(at)) {
    throw NonFiniteError("grad_check: objective non-finite at point");
  }
  double worst = 0.0;
  Eigen::VectorXd x = point;
  for (int k = 0; k < dim; ++k) {
    const double h = 1e-6 * std::max(1.0, std::fabs(point[k]));
    x[k] = point[k] + h;
    const double up = objective(x).value;
    x[k] = point[k] - h;
    const double down = objective(x).value;
    x[k] = point[k];
    if (!finite(up) || !finite(down)) {
      throw NonFiniteError("grad_check: objective non-finite near point");
    }
    const double fd = (up - down) / (2.0 * h);
    const double rel =
        std::fabs(fd - at.gradient[k]) / std::max(1.0, std::fabs(at.gradient[k]));
    worst = std::max(worst, rel);
  }
  return worst;
}

Eigen::MatrixXd fd_hessian(const Objective& objective,
                           const Eigen::VectorXd& point) {
  const int dim = static_cast<int>(point.size());
  Eigen::MatrixXd hess(dim, dim);
  Eigen::VectorXd x = point;
  for (int k = 0; k < dim; ++k) {
    const double h = 1e-5 * std::max(1.0, std::fabs(point[k]));
    x[k] = point[k] + h;
    const Eigen::VectorXd gp = objective(x).gradient;
    x[k] = point[k] - h;
    const Eigen::VectorXd gm = objective(x).gradient;
    x[k] = point[k];
    if (!gp.allFinite() || !gm.allFinite()) {
      throw NonFiniteError("fd_hessian: gradient non-finite near point");
    }
    hess.col(k) = (gp - gm) / (2.0 * h);
  }
  return 0.5 * (hess + hess.transpose());
}

}  // namespace skeptic::numerics
