#include "skeptic/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <thread>

#include "skeptic/numerics.hpp"
#include "skeptic/rng.hpp"

namespace skeptic::simulate {

namespace {

using numerics::std_normal_cdf;
using numerics::std_normal_pdf;
using numerics::std_normal_quantile;

// ---- moment-matched covariate margins ---------------------------------------

struct TruncNormParams {
  double mu = 0.0;
  double sigma = 1.0;
};

void truncnorm_moments(double mu, double sigma, double lo, double hi,
                       double* mean, double* sd) {
  const double a = (lo - mu) / sigma;
  const double b = (hi - mu) / sigma;
  const double z = std_normal_cdf(b) - std_normal_cdf(a);
  const double pa = std_normal_pdf(a);
  const double pb = std_normal_pdf(b);
  const double m = mu + sigma * (pa - pb) / z;
  const double v =
      sigma * sigma *
      (1.0 + (a * pa - b * pb) / z - ((pa - pb) / z) * ((pa - pb) / z));
  *mean = m;
  *sd = std::sqrt(std::max(v, 1e-12));
}

void rounded_truncnorm_moments(double mu, double sigma, int lo, int hi,
                               double* mean, double* sd) {
  const double a = lo - 0.5;
  const double b = hi + 0.5;
  const double z =
      std_normal_cdf((b - mu) / sigma) - std_normal_cdf((a - mu) / sigma);
  double m = 0.0, m2 = 0.0;
  for (int k = lo; k <= hi; ++k) {
    const double p = (std_normal_cdf((k + 0.5 - mu) / sigma) -
                      std_normal_cdf((k - 0.5 - mu) / sigma)) /
                     z;
    m += p * k;
    m2 += p * static_cast<double>(k) * k;
  }
  *mean = m;
  *sd = std::sqrt(std::max(m2 - m * m, 1e-12));
}

// 2-D Newton (numeric Jacobian) driving the realized (mean, sd) of a
// truncated or discretized normal onto the targets.
template <typename Moments>
TruncNormParams match_moments(double target_mean, double target_sd,
                              const Moments& moments) {
  TruncNormParams p{target_mean, target_sd};
  for (int it = 0; it < 100; ++it) {
    double m, s;
    moments(p.mu, p.sigma, &m, &s);
    const double f1 = m - target_mean;
    const double f2 = s - target_sd;
    if (std::fabs(f1) < 1e-9 && std::fabs(f2) < 1e-9) break;
    const double h1 = 1e-5 * std::max(1.0, std::fabs(p.mu));
    const double h2 = 1e-5 * std::max(0.1, p.sigma);
    double m_mu, s_mu, m_sig, s_sig;
    moments(p.mu + h1, p.sigma, &m_mu, &s_mu);
    moments(p.mu, p.sigma + h2, &m_sig, &s_sig);
    const double j11 = (m_mu - m) / h1;
    const double j21 = (s_mu - s) / h1;
    const double j12 = (m_sig - m) / h2;
    const double j22 = (s_sig - s) / h2;
    const double det = j11 * j22 - j12 * j21;
    if (std::fabs(det) < 1e-14) break;
    double step_mu = (j22 * f1 - j12 * f2) / det;
    double step_sigma = (-j21 * f1 + j11 * f2) / det;
    // keep sigma positive; damp if the step overshoots
    double damp = 1.0;
    while (p.sigma - damp * step_sigma <= 1e-6 && damp > 1e-6) damp *= 0.5;
    p.mu -= damp * step_mu;
    p.sigma -= damp * step_sigma;
  }
  return p;
}

// Bounded percent variable as a scaled Beta on [lo, hi]: the only margin here
// that can carry the survey's large spread (a truncated normal on [1,98]
// caps out below the observed sd at this mean). Quantiles go through a fine
// inverse-CDF grid so each draw costs one uniform.
struct BetaMargin {
  double a = 1.0;
  double b = 1.0;
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> cdf;  // regularized incomplete beta on a uniform x grid

  static constexpr int kGrid = 8193;

  static BetaMargin fit(double mean, double sd, double lo, double hi) {
    const double m01 = (mean - lo) / (hi - lo);
    const double v01 = sd * sd / ((hi - lo) * (hi - lo));
    if (!(m01 > 0.0 && m01 < 1.0) || !(v01 > 0.0) || v01 >= m01 * (1.0 - m01)) {
      throw InvalidConfigError("prior mean/sd are infeasible on the given range");
    }
    BetaMargin margin;
    const double nu = m01 * (1.0 - m01) / v01 - 1.0;
    margin.a = m01 * nu;
    margin.b = (1.0 - m01) * nu;
    margin.lo = lo;
    margin.hi = hi;
    margin.cdf.resize(kGrid);
    for (int i = 0; i < kGrid; ++i) {
      const double x = static_cast<double>(i) / (kGrid - 1);
      margin.cdf[i] = numerics::regularized_incomplete_beta(margin.a, margin.b, x);
    }
    margin.cdf.front() = 0.0;
    margin.cdf.back() = 1.0;
    return margin;
  }

  double draw(double u) const {
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const int j = std::max<int>(1, static_cast<int>(it - cdf.begin()));
    const int i = std::min<int>(j, kGrid - 1);
    const double u0 = cdf[i - 1];
    const double u1 = cdf[i];
    const double t = u1 > u0 ? (u - u0) / (u1 - u0) : 0.5;
    const double x = (static_cast<double>(i - 1) + t) / (kGrid - 1);
    return lo + (hi - lo) * std::min(std::max(x, 0.0), 1.0);
  }
};

struct ResolvedLaws {
  CovariateLaws raw;
  BetaMargin prior;
  TruncNormParams age;
  TruncNormParams police;

  explicit ResolvedLaws(const CovariateLaws& laws) : raw(laws) {
    prior = BetaMargin::fit(laws.prior_mean, laws.prior_sd, laws.prior_min,
                            laws.prior_max);
    age = match_moments(laws.age_mean, laws.age_sd,
                        [&](double mu, double sig, double* m, double* s) {
                          rounded_truncnorm_moments(mu, sig, laws.age_min,
                                                    laws.age_max, m, s);
                        });
    police = match_moments(laws.police_mean, laws.police_sd,
                           [&](double mu, double sig, double* m, double* s) {
                             rounded_truncnorm_moments(mu, sig, laws.police_min,
                                                       laws.police_max, m, s);
                           });
  }
};

// ---- covariate draws ---------------------------------------------------------

struct Covariates {
  int gender = 0;
  int age = 0;
  int police = 0;
  int educ_int = 0;
  int matching_gender = 0;
  double prior = 0.0;
};

double truncnorm_from_uniform(double u, const TruncNormParams& p, double lo,
                              double hi) {
  const double a = std_normal_cdf((lo - p.mu) / p.sigma);
  const double b = std_normal_cdf((hi - p.mu) / p.sigma);
  double q = a + u * (b - a);
  q = std::min(std::max(q, 1e-16), 1.0 - 1e-16);
  const double x = p.mu + p.sigma * std_normal_quantile(q);
  return std::min(std::max(x, lo), hi);
}

int rounded_draw(double u, const TruncNormParams& p, int lo, int hi) {
  const double x = truncnorm_from_uniform(u, p, lo - 0.5, hi + 0.5);
  const int k = static_cast<int>(std::lround(x));
  return std::min(std::max(k, lo), hi);
}

// One shared Gaussian factor pushes exchangeable correlation through every
// margin; rho = 0 reduces to independent draws. The common uniform is always
// consumed so the stream layout does not depend on rho.
Covariates draw_covariates(rng::Rng& gen, const ResolvedLaws& laws) {
  const double rho = laws.raw.copula_rho;
  const double u_common = gen.uniform01();
  const double z_common = std_normal_quantile(u_common);
  const double w_own = std::sqrt(1.0 - rho);
  const double w_common = std::sqrt(rho);

  auto margin_uniform = [&]() {
    const double z_own = std_normal_quantile(gen.uniform01());
    const double z = w_common * z_common + w_own * z_own;
    return std_normal_cdf(z);
  };

  Covariates c;
  c.gender = margin_uniform() < laws.raw.gender_p ? 1 : 0;
  c.age = rounded_draw(margin_uniform(), laws.age, laws.raw.age_min,
                       laws.raw.age_max);
  c.police = rounded_draw(margin_uniform(), laws.police, laws.raw.police_min,
                          laws.raw.police_max);
  c.educ_int = margin_uniform() < laws.raw.educ_int_p ? 1 : 0;
  c.matching_gender = margin_uniform() < laws.raw.matching_p ? 1 : 0;
  c.prior = truncnorm_from_uniform(margin_uniform(), laws.prior,
                                   laws.raw.prior_min, laws.raw.prior_max);
  return c;
}

double index_value(const IndexCoeffs& b, const Covariates& c) {
  return b.intercept + b.prior * c.prior + b.age * c.age + b.gender * c.gender +
         b.police * c.police + b.educ_int * c.educ_int +
         b.matching_gender * c.matching_gender;
}

dataio::SurveyRecord base_record(const Covariates& c) {
  dataio::SurveyRecord r;
  r.prior = c.prior;
  r.gender = c.gender;
  r.age = c.age;
  r.police = c.police;
  r.educ_int = c.educ_int;
  r.matching_gender = c.matching_gender;
  r.valid = true;
  return r;
}

int env_thread_cap() {
  const char* raw = std::getenv("SKEPTIC_UPDATE_THREADS");
  if (!raw) return 1;
  const long v = std::strtol(raw, nullptr, 10);
  return static_cast<int>(std::min(std::max(v, 1L), 64L));
}

}  // namespace

std::string to_string(DgpModel model) {
  return model == DgpModel::tobit ? "tobit" : "hurdle";
}

void set_coeff(IndexCoeffs& coeffs, const std::string& name, double value) {
  if (name == "intercept" || name == "const") {
    coeffs.intercept = value;
  } else if (name == "prior") {
    coeffs.prior = value;
  } else if (name == "age") {
    coeffs.age = value;
  } else if (name == "gender") {
    coeffs.gender = value;
  } else if (name == "police") {
    coeffs.police = value;
  } else if (name == "educ_int") {
    coeffs.educ_int = value;
  } else if (name == "matching_gender") {
    coeffs.matching_gender = value;
  } else {
    throw InvalidConfigError("unknown coefficient name '" + name + "'");
  }
}

void validate(const DgpConfig& config) {
  const auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (config.n < 50) throw InvalidConfigError("n must be at least 50");
  if (!prob(config.laws.gender_p) || !prob(config.laws.educ_int_p) ||
      !prob(config.laws.matching_p)) {
    throw InvalidConfigError("Bernoulli probabilities must lie in [0,1]");
  }
  if (!(config.laws.copula_rho >= 0.0 && config.laws.copula_rho < 1.0)) {
    throw InvalidConfigError("copula_rho must lie in [0,1)");
  }
  if (!(config.laws.age_sd > 0.0) || !(config.laws.police_sd > 0.0) ||
      !(config.laws.prior_sd > 0.0)) {
    throw InvalidConfigError("covariate sds must be positive");
  }
  if (config.laws.prior_min >= config.laws.prior_max ||
      config.laws.age_min >= config.laws.age_max ||
      config.laws.police_min >= config.laws.police_max) {
    throw InvalidConfigError("covariate bounds are inverted");
  }
  if (!(config.laws.prior_min > 0.0)) {
    throw InvalidConfigError("prior_min must be positive");
  }
  if (config.model == DgpModel::tobit && !(config.sigma > 0.0)) {
    throw InvalidConfigError("tobit sigma must be positive");
  }
  if (config.model == DgpModel::hurdle && !(config.level_sigma >= 0.0)) {
    throw InvalidConfigError("level_sigma must be non-negative");
  }
}

DgpConfig default_tobit_config() {
  DgpConfig config;
  config.model = DgpModel::tobit;
  config.n = 2828;
  config.tobit.prior = 0.498;
  config.tobit.age = 0.728;
  config.tobit.gender = 18.036;
  config.tobit.matching_gender = -63.480;
  config.tobit.educ_int = -19.307;
  config.tobit.intercept = 232.149;
  config.sigma = calibrate_sigma(config);
  return config;
}

DgpConfig default_hurdle_config() {
  DgpConfig config;
  config.model = DgpModel::hurdle;
  config.n = 2885;
  config.change.prior = 0.003;
  config.change.age = -0.009;
  config.change.gender = -0.238;
  config.change.matching_gender = 0.804;
  config.change.educ_int = 0.261;
  config.change.intercept = -2.813;
  config.level.prior = 0.023;
  config.level.age = 0.026;
  config.level.gender = 0.988;
  config.level.matching_gender = 1.074;
  config.level.educ_int = -4.188;
  config.level.police = 0.494;
  config.level.intercept = 1.697;
  config.level_sigma = 2.375;
  config.transform = estimators::Transform::identity;
  return config;
}

dataio::Dataset simulate_survey(const DgpConfig& config) {
  validate(config);
  const ResolvedLaws laws(config.laws);
  rng::Rng gen(config.seed);

  dataio::Dataset data;
  data.rows.reserve(config.n);
  for (long i = 0; i < config.n; ++i) {
    const Covariates c = draw_covariates(gen, laws);
    dataio::SurveyRecord rec = base_record(c);

    if (config.model == DgpModel::tobit) {
      const double post_star = index_value(config.tobit, c) + config.sigma * gen.normal();
      if (post_star < c.prior) {
        rec.change = 1;
        rec.post = post_star;
        if (config.clamp_post) {
          const double floor = std::min(0.1, 0.5 * c.prior);
          rec.post = std::max(rec.post, floor);
        }
      } else {
        rec.change = 0;
        rec.post = rec.prior;
      }
    } else {
      const double p_change = std_normal_cdf(index_value(config.change, c));
      if (gen.bernoulli(p_change)) {
        rec.change = 1;
        const double idx = index_value(config.level, c);
        double post = 0.0;
        if (!config.clamp_post) {
          const double e = config.level_sigma * gen.normal();
          post = config.transform == estimators::Transform::log_scale
                     ? std::exp(idx + e)
                     : idx + e;
        } else {
          // truncate into [0.1, prior) by rejection; fall back to clamping
          // if the acceptance region has essentially no mass
          const double floor = std::min(0.1, 0.5 * c.prior);
          bool accepted = false;
          for (int attempt = 0; attempt < 1000 && !accepted; ++attempt) {
            const double e = config.level_sigma * gen.normal();
            post = config.transform == estimators::Transform::log_scale
                       ? std::exp(idx + e)
                       : idx + e;
            accepted = post >= floor && post < c.prior;
          }
          if (!accepted) {
            post = std::min(std::max(post, floor),
                            c.prior * (1.0 - 1e-9));
          }
        }
        rec.post = post;
      } else {
        rec.change = 0;
        rec.post = rec.prior;
      }
    }
    data.rows.push_back(rec);
  }
  return data;
}

double calibrate_sigma(const DgpConfig& config, double target, long draws) {
  if (!(target > 0.0 && target < 1.0)) {
    throw InvalidConfigError("calibration target must lie in (0,1)");
  }
  const ResolvedLaws laws(config.laws);
  rng::Rng gen(0x5ca1ab1e5eedull);  // fixed stream: calibration is a property
                                    // of the config values, not of config.seed
  std::vector<double> margin(draws);
  for (long i = 0; i < draws; ++i) {
    const Covariates c = draw_covariates(gen, laws);
    margin[i] = index_value(config.tobit, c) - c.prior;
  }
  const auto censor_share = [&](double sigma) {
    double acc = 0.0;
    for (const double m : margin) acc += std_normal_cdf(m / sigma);
    return acc / static_cast<double>(draws);
  };

  double lo = 1e-3, hi = 1e7;
  double share_lo = censor_share(lo), share_hi = censor_share(hi);
  if ((share_lo - target) * (share_hi - target) > 0.0) {
    throw InvalidConfigError("calibrate_sigma: target share is unreachable");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = std::sqrt(lo * hi);
    const double share = censor_share(mid);
    if ((share - target) * (share_lo - target) > 0.0) {
      lo = mid;
      share_lo = share;
    } else {
      hi = mid;
    }
    if (hi / lo < 1.0 + 1e-10) break;
  }
  return std::sqrt(lo * hi);
}

namespace {

struct RepDraw {
  std::vector<double> estimates;
  std::vector<double> ses;
};

struct McProblem {
  std::vector<std::string> names;
  std::vector<double> truths;
};

McProblem mc_problem(const DgpConfig& config) {
  McProblem p;
  const auto push = [&](const std::string& name, double truth) {
    p.names.push_back(name);
    p.truths.push_back(truth);
  };
  if (config.model == DgpModel::tobit) {
    push("gamma", config.tobit.prior);
    push("delta.const", config.tobit.intercept);
    for (const auto& name : config.tobit_covariates) {
      IndexCoeffs probe;
      set_coeff(probe, name, 1.0);
      push("delta." + name,
           probe.age * config.tobit.age + probe.gender * config.tobit.gender +
               probe.police * config.tobit.police +
               probe.educ_int * config.tobit.educ_int +
               probe.matching_gender * config.tobit.matching_gender);
    }
    push("sigma", config.sigma);
  } else {
    const auto stage = [&](const std::string& prefix, const IndexCoeffs& b,
                           const std::vector<std::string>& covs) {
      push(prefix + ".const", b.intercept);
      push(prefix + ".prior", b.prior);
      for (const auto& name : covs) {
        IndexCoeffs probe;
        set_coeff(probe, name, 1.0);
        push(prefix + "." + name,
             probe.age * b.age + probe.gender * b.gender + probe.police * b.police +
                 probe.educ_int * b.educ_int +
                 probe.matching_gender * b.matching_gender);
      }
    };
    stage("change", config.change, config.change_covariates);
    stage("level", config.level, config.level_covariates);
    push("level_sigma", config.level_sigma);
  }
  return p;
}

RepDraw fit_replication(const DgpConfig& config, const dataio::Dataset& data) {
  RepDraw draw;
  if (config.model == DgpModel::tobit) {
    const auto frame = estimators::make_frame(data, config.tobit_covariates);
    const auto fit =
        estimators::fit_tobit_generalized(frame.prior, frame.post, frame.x);
    draw.estimates.push_back(fit.gamma);
    draw.ses.push_back(std::sqrt(fit.covariance(0, 0)));
    for (long j = 0; j < fit.delta.size(); ++j) {
      draw.estimates.push_back(fit.delta[j]);
      draw.ses.push_back(std::sqrt(fit.covariance(1 + j, 1 + j)));
    }
    draw.estimates.push_back(fit.sigma);
    const long s = fit.covariance.rows() - 1;
    draw.ses.push_back(fit.sigma * std::sqrt(fit.covariance(s, s)));
  } else {
    const auto fit =
        estimators::fit_hurdle(data, config.change_covariates,
                               config.level_covariates, config.link,
                               config.transform);
    for (long j = 0; j < fit.change_stage.coefficients.size(); ++j) {
      draw.estimates.push_back(fit.change_stage.coefficients[j]);
      draw.ses.push_back(fit.change_stage.standard_errors[j]);
    }
    for (long j = 0; j < fit.level_stage.coefficients.size(); ++j) {
      draw.estimates.push_back(fit.level_stage.coefficients[j]);
      draw.ses.push_back(fit.level_stage.standard_errors[j]);
    }
    draw.estimates.push_back(fit.sigma);
    const double df =
        static_cast<double>(fit.level_stage.n - fit.level_stage.names.size());
    draw.ses.push_back(fit.sigma / std::sqrt(2.0 * std::max(df, 1.0)));
  }
  return draw;
}

}  // namespace

McReport mc_recover(const DgpConfig& config, long replications) {
  if (replications < 2) {
    throw InvalidConfigError("mc_recover: need at least 2 replications");
  }
  validate(config);
  const McProblem problem = mc_problem(config);
  const long p = static_cast<long>(problem.names.size());

  std::vector<std::optional<RepDraw>> draws(replications);
  std::vector<std::string> failures(replications);
  std::atomic<long> next{0};

  const auto worker = [&]() {
    for (;;) {
      const long r = next.fetch_add(1);
      if (r >= replications) return;
      DgpConfig rep_config = config;
      rep_config.seed = rng::derive_seed(config.seed, static_cast<std::uint64_t>(r));
      try {
        const auto data = simulate_survey(rep_config);
        draws[r] = fit_replication(config, data);
      } catch (const Error& e) {
        failures[r] = e.name() + std::string(": ") + e.what();
      }
    }
  };

  const int threads = env_thread_cap();
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  McReport report;
  report.replications = replications;
  std::vector<std::vector<double>> est(p), se(p);
  for (long r = 0; r < replications; ++r) {
    if (!draws[r]) {
      ++report.failures;
      if (report.failure_notes.size() < 8) report.failure_notes.push_back(failures[r]);
      continue;
    }
    if (static_cast<long>(draws[r]->estimates.size()) != p) {
      throw ConformabilityError("mc_recover: estimator returned unexpected shape");
    }
    for (long j = 0; j < p; ++j) {
      est[j].push_back(draws[r]->estimates[j]);
      se[j].push_back(draws[r]->ses[j]);
    }
  }
  const long m = replications - report.failures;
  if (m < 2) throw InvalidConfigError("mc_recover: fewer than 2 successful replications");

  for (long j = 0; j < p; ++j) {
    ParamSummary s;
    s.name = problem.names[j];
    s.truth = problem.truths[j];
    double acc = 0.0;
    for (double v : est[j]) acc += v;
    s.mean = acc / static_cast<double>(m);
    double ss = 0.0;
    long covered = 0;
    for (long r = 0; r < m; ++r) {
      ss += (est[j][r] - s.mean) * (est[j][r] - s.mean);
      if (std::fabs(est[j][r] - s.truth) <= 1.959963984540054 * se[j][r]) ++covered;
    }
    s.sd = std::sqrt(ss / static_cast<double>(m - 1));
    s.mc_se = s.sd / std::sqrt(static_cast<double>(m));
    s.bias = s.mean - s.truth;
    s.coverage = static_cast<double>(covered) / static_cast<double>(m);
    report.params.push_back(std::move(s));
  }
  return report;
}

}  // namespace skeptic::simulate
