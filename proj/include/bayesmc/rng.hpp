// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <array>
#include <cstdint>

namespace bayesmc {

// Seeded xoshiro256++ stream. One stream per chain: the (seed, stream_id)
// pair fully determines the variate sequence, and distinct stream_ids give
// statistically independent sequences. Never shared across threads.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform01();

  // Uniform on (0, 1]; safe as a log() argument.
  double uniform01_open_left();

  // N(0, 1) via Box-Muller; the second variate of each pair is cached.
  double standard_normal();

 private:
  std::array<std::uint64_t, 4> state_;
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  double spare_normal_ = 0.0;
  bool has_spare_normal_ = false;
};

double sample_uniform(double lower, double upper, RandomStream& rng);

// Normal with variance (not sd) parameterization.
double sample_normal(double mean, double variance, RandomStream& rng);

// Gamma with rate parameterization (mean = shape/rate). Marsaglia-Tsang
// squeeze rejection; shapes below one use the power-of-uniform boost.
double sample_gamma(double shape, double rate, RandomStream& rng);

// X ~ InverseGamma(shape, scale) iff 1/X ~ Gamma(shape, scale).
double sample_inverse_gamma(double shape, double scale, RandomStream& rng);

long sample_poisson(double mean, RandomStream& rng);

}  // namespace bayesmc
