#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace mvsys {

// SplitMix64 stream. Chosen over <random> engines because the draw sequence
// (including normal/exponential transforms) must be identical across standard
// library implementations for the reproducibility guarantees the CLI makes.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  // Independent substream for (seed, index); stateless derivation so path
  // results do not depend on scheduling order.
  static SplitMix64 substream(uint64_t seed, uint64_t index) {
    return SplitMix64(finalize(finalize(seed) ^ (index + 0x9E3779B97F4A7C15ULL)));
  }

  uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return finalize(state_);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Box-Muller; the cosine/sine pair is consumed alternately.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  // Inversion; exact for exponential inter-arrival sampling.
  double exponential(double rate) {
    if (!(rate > 0)) throw std::invalid_argument("exponential: rate must be > 0");
    double u = uniform();
    while (u <= 0.0) u = uniform();
    return -std::log(u) / rate;
  }

  // Index drawn proportionally to non-negative weights.
  int categorical(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) {
      if (w < 0) throw std::invalid_argument("categorical: negative weight");
      total += w;
    }
    if (!(total > 0)) throw std::invalid_argument("categorical: weights sum to zero");
    const double u = uniform() * total;
    double acc = 0.0;
    for (size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(weights.size()) - 1;
  }

  // +1 or -1 with equal probability.
  double rademacher() { return (next_u64() & 1u) ? 1.0 : -1.0; }

  // 1 with probability p, else 0.
  double bernoulli(double p) {
    if (p < 0 || p > 1) throw std::invalid_argument("bernoulli: p outside [0,1]");
    return uniform() < p ? 1.0 : 0.0;
  }

 private:
  static uint64_t finalize(uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace mvsys
