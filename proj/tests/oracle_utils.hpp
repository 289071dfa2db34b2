#pragma once

// Test-side oracles, kept independent of the library code paths they check.

#include <Eigen/Core>

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

// Phi(x) by composite Simpson quadrature of the density from 0 to x,
// accumulated in long double. Good to ~1e-14 absolute on [-8, 8].
inline double normal_cdf_quadrature(double x) {
  const long double inv_sqrt_2pi = 0.39894228040143267793994605993438L;
  const auto density = [&](long double t) {
    return inv_sqrt_2pi * std::exp(-0.5L * t * t);
  };
  const long double a = 0.0L;
  const long double b = x;
  const long n = std::max<long>(64, static_cast<long>(std::fabs(x) * 20000));
  const long double h = (b - a) / (2.0L * n);
  long double sum = density(a) + density(b);
  for (long i = 1; i < 2 * n; ++i) {
    sum += density(a + h * i) * (i % 2 == 1 ? 4.0L : 2.0L);
  }
  return static_cast<double>(0.5L + sum * h / 3.0L);
}

// Solves f(c) = target by bisection on [lo, hi].
inline double bisect(const std::function<double(double)>& f, double target,
                     double lo, double hi, double tol = 1e-12) {
  double flo = f(lo) - target;
  for (int i = 0; i < 400 && hi - lo > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid) - target;
    if ((fm <= 0.0) == (flo <= 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Direct per-row evaluation of the censored-at-zero log-likelihood,
// written against erfc/log only.
inline double naive_tobit_loglik(const Eigen::VectorXd& y,
                                 const Eigen::MatrixXd& z,
                                 const Eigen::VectorXd& theta, double sigma) {
  const double log_sqrt_2pi = 0.9189385332046727417803297;
  double ll = 0.0;
  for (long i = 0; i < y.size(); ++i) {
    const double mu = z.row(i).dot(theta);
    if (y[i] <= 0.0) {
      // 1 - Phi(t) = erfc(t/sqrt(2))/2
      ll += std::log(0.5 * std::erfc((mu / sigma) / std::sqrt(2.0)));
    } else {
      const double r = (y[i] - mu) / sigma;
      ll += -0.5 * r * r - log_sqrt_2pi - std::log(sigma);
    }
  }
  return ll;
}

// Multi-stage refining grid search: evaluates a dense grid, re-centers a
// shrunken window on the incumbent (re-expanding any dimension whose argmax
// hit the window edge), and repeats until the cell size per coordinate drops
// below `resolution`. Returns the final grid argmax.
inline std::vector<double> grid_search_max(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> lo, std::vector<double> hi, int points_per_dim,
    double resolution) {
  const size_t dim = lo.size();
  std::vector<double> best(dim);
  for (int stage = 0; stage < 80; ++stage) {
    std::vector<double> step(dim);
    std::vector<int> idx(dim, 0);
    std::vector<int> best_idx(dim, 0);
    for (size_t d = 0; d < dim; ++d) {
      step[d] = (hi[d] - lo[d]) / (points_per_dim - 1);
    }
    double best_value = -std::numeric_limits<double>::infinity();
    std::vector<double> point(dim);
    for (;;) {
      for (size_t d = 0; d < dim; ++d) point[d] = lo[d] + step[d] * idx[d];
      const double value = f(point);
      if (value > best_value) {
        best_value = value;
        best = point;
        best_idx = idx;
      }
      size_t d = 0;
      while (d < dim && ++idx[d] == points_per_dim) {
        idx[d] = 0;
        ++d;
      }
      if (d == dim) break;
    }
    bool done = true;
    bool any_edge = false;
    for (size_t d = 0; d < dim; ++d) {
      if (step[d] > resolution) done = false;
      if (best_idx[d] == 0 || best_idx[d] == points_per_dim - 1) any_edge = true;
    }
    if (done && !any_edge) break;
    for (size_t d = 0; d < dim; ++d) {
      if (best_idx[d] == 0 || best_idx[d] == points_per_dim - 1) {
        // argmax sits on the boundary: widen this dimension instead
        const double width = hi[d] - lo[d];
        lo[d] = best[d] - width;
        hi[d] = best[d] + width;
      } else {
        lo[d] = best[d] - 4.0 * step[d];
        hi[d] = best[d] + 4.0 * step[d];
      }
    }
  }
  return best;
}

}  // namespace oracle
