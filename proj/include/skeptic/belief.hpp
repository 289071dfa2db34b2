#pragma once

#include <algorithm>
#include <cmath>

#include "skeptic/errors.hpp"

namespace skeptic::belief {

// Subjective distribution over the victimization probability, Beta(alpha, beta).
// alpha counts perceived victimization outcomes, beta the complement.
struct BetaBelief {
  double alpha;
  double beta;

  BetaBelief(double a, double b) : alpha(a), beta(b) {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
      throw InvalidArgumentError("BetaBelief: alpha and beta must be positive finite");
    }
  }
};

// An informational shock translated into a run of Bernoulli outcomes:
// n1 ones (victimizations) and n0 zeros.
struct EvidenceCounts {
  long n1;
  long n0;

  EvidenceCounts(long ones, long zeros) : n1(ones), n0(zeros) {
    if (ones < 0 || zeros < 0) {
      throw InvalidArgumentError("EvidenceCounts: counts must be non-negative");
    }
  }
  long total() const { return n1 + n0; }
};

// The shock as the respondent perceives it: a value pi* in [0,1] carried with
// an effective sample size. The weight is a positive real, not an integer.
struct InfoShock {
  double pi_star;
  double weight;

  InfoShock(double value, double effective_n) : pi_star(value), weight(effective_n) {
    if (!(value >= 0.0 && value <= 1.0)) {
      throw InvalidArgumentError("InfoShock: pi_star must lie in [0,1]");
    }
    if (!(effective_n > 0.0) || !std::isfinite(effective_n)) {
      throw InvalidArgumentError("InfoShock: weight must be positive finite");
    }
  }
};

// Informational quality eta = N / (alpha + beta): shock weight relative to the
// concentration of the prior. eta = 0 means the shock carries nothing.
struct QualityWeight {
  double eta;

  explicit QualityWeight(double quality) : eta(quality) {
    if (!(quality >= 0.0) || !std::isfinite(quality)) {
      throw InvalidArgumentError("QualityWeight: eta must be non-negative finite");
    }
  }
};

inline double prior_mean(const BetaBelief& belief) {
  return belief.alpha / (belief.alpha + belief.beta);
}

inline BetaBelief update_conjugate(const BetaBelief& belief,
                                   const EvidenceCounts& evidence) {
  return BetaBelief(belief.alpha + static_cast<double>(evidence.n1),
                    belief.beta + static_cast<double>(evidence.n0));
}

// Posterior mean as the convex combination
//   N/(a+b+N) * pi_star + (a+b)/(a+b+N) * pi0,
// with concentration = alpha + beta of the prior.
inline double posterior_mean_structural(double pi0, const InfoShock& shock,
                                        double concentration) {
  if (!(concentration > 0.0) || !std::isfinite(concentration)) {
    throw InvalidArgumentError("posterior_mean_structural: concentration must be positive");
  }
  if (!(pi0 >= 0.0 && pi0 <= 1.0)) {
    throw InvalidArgumentError("posterior_mean_structural: pi0 must lie in [0,1]");
  }
  const double w = shock.weight / (concentration + shock.weight);
  return w * shock.pi_star + (1.0 - w) * pi0;
}

// Same posterior mean written through the quality weight:
//   (1 + 1/eta)^(-1) * pi_star + (1 + eta)^(-1) * pi0.
// At eta = 0 the shock term vanishes in the limit and the prior survives intact.
inline double posterior_mean_quality(double pi0, double pi_star,
                                     const QualityWeight& q) {
  if (!(pi0 >= 0.0 && pi0 <= 1.0) || !(pi_star >= 0.0 && pi_star <= 1.0)) {
    throw InvalidArgumentError("posterior_mean_quality: probabilities must lie in [0,1]");
  }
  if (q.eta == 0.0) return pi0;
  const double w0 = 1.0 / (1.0 + q.eta);
  return (1.0 - w0) * pi_star + w0 * pi0;
}

}  // namespace skeptic::belief
