#pragma once

#include <cstdint>

#include "skeptic/numerics.hpp"

namespace skeptic::rng {

// splitmix64 step; the whole generator for this project. Counter-based and
// identical on every platform, which is what the reproducibility contract
// of the simulator rests on.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Seed for replication r derived from (seed, r); replications can run in any
// order or thread without touching each other's streams.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t s = seed ^ (0xD1B54A32D192ED03ull * (index + 1));
  const std::uint64_t a = splitmix64(s);
  const std::uint64_t b = splitmix64(s);
  return a ^ (b << 1);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64(state_); }

  // uniform on the open interval (0,1); safe to feed the normal quantile
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
  }

  double normal() { return numerics::std_normal_quantile(uniform01()); }

  double normal(double mu, double sd) { return mu + sd * normal(); }

  // inverse-CDF draw from Normal(mu, sd^2) conditioned on [lo, hi];
  // consumes exactly one uniform regardless of the bounds
  double truncated_normal(double mu, double sd, double lo, double hi) {
    const double a = numerics::std_normal_cdf((lo - mu) / sd);
    const double b = numerics::std_normal_cdf((hi - mu) / sd);
    double u = a + uniform01() * (b - a);
    u = std::min(std::max(u, 1e-16), 1.0 - 1e-16);
    const double x = mu + sd * numerics::std_normal_quantile(u);
    return std::min(std::max(x, lo), hi);
  }

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::uint64_t state_;
};

}  // namespace skeptic::rng
