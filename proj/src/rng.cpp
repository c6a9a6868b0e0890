// Apache License, Version 2.0, refer to LICENSE.txt

#include "bayesmc/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace bayesmc {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += kGolden);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  std::uint64_t sm = seed ^ (kGolden * (stream_id + 1));
  for (auto& word : state_) word = splitmix64(sm);
  if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
}

std::uint64_t RandomStream::next_u64() {
  const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double RandomStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform01_open_left() {
  return 1.0 - uniform01();
}

double RandomStream::standard_normal() {
  if (has_spare_normal_) {
    has_spare_normal_ = false;
    return spare_normal_;
  }
  const double u1 = uniform01_open_left();
  const double u2 = uniform01();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * M_PI * u2;
  spare_normal_ = radius * std::sin(angle);
  has_spare_normal_ = true;
  return radius * std::cos(angle);
}

double sample_uniform(double lower, double upper, RandomStream& rng) {
  if (!(lower < upper)) throw std::domain_error("sample_uniform: requires lower < upper");
  return lower + (upper - lower) * rng.uniform01();
}

double sample_normal(double mean, double variance, RandomStream& rng) {
  if (!(variance > 0.0)) throw std::domain_error("sample_normal: variance must be positive");
  return mean + std::sqrt(variance) * rng.standard_normal();
}

double sample_gamma(double shape, double rate, RandomStream& rng) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw std::domain_error("sample_gamma: shape and rate must be positive");
  if (shape < 1.0) {
    // boost: G(a) = G(a+1) * U^(1/a)
    const double g = sample_gamma(shape + 1.0, 1.0, rng);
    const double u = rng.uniform01_open_left();
    return g * std::pow(u, 1.0 / shape) / rate;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = rng.standard_normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform01_open_left();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
  }
}

double sample_inverse_gamma(double shape, double scale, RandomStream& rng) {
  if (!(shape > 0.0) || !(scale > 0.0))
    throw std::domain_error("sample_inverse_gamma: shape and scale must be positive");
  return 1.0 / sample_gamma(shape, scale, rng);
}

namespace {

// Sequential CDF inversion; O(mean) but exact.
long poisson_inversion(double mean, RandomStream& rng) {
  const double u = rng.uniform01();
  double p = std::exp(-mean);
  double cdf = p;
  long k = 0;
  while (u > cdf) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
    if (p < 1e-300 && cdf < u) return k;  // tail underflow guard
  }
  return k;
}

// Hormann's PTRS transformed rejection, valid for mean >= 10.
long poisson_ptrs(double mean, RandomStream& rng) {
  const double log_mean = std::log(mean);
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = rng.uniform01() - 0.5;
    const double v = rng.uniform01_open_left();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<long>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        k * log_mean - mean - std::lgamma(k + 1.0)) {
      return static_cast<long>(k);
    }
  }
}

}  // namespace

long sample_poisson(double mean, RandomStream& rng) {
  if (!(mean > 0.0)) throw std::domain_error("sample_poisson: mean must be positive");
  return mean < 10.0 ? poisson_inversion(mean, rng) : poisson_ptrs(mean, rng);
}

}  // namespace bayesmc
