#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace sbtm {

/// Splitmix-style finalizer used to derive independent seeds for restarts,
/// sweeps and simulator stages from the single root seed.
inline uint64_t mix_seed(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t derive_seed(uint64_t root, uint64_t a, uint64_t b = 0, uint64_t c = 0) {
  uint64_t s = mix_seed(root ^ 0x5851f42d4c957f2dULL);
  s = mix_seed(s ^ mix_seed(a));
  s = mix_seed(s ^ mix_seed(b));
  s = mix_seed(s ^ mix_seed(c));
  return s;
}

/// Thin wrapper around std::mt19937_64 with the sampling helpers the
/// optimiser and the simulator need. Distribution code is written out here
/// (Lemire bounded ints, Fisher-Yates, Marsaglia-Tsang gamma) so that a
/// given (binary, seed) pair always replays the same stream.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n), n > 0.
  uint64_t next_below(uint64_t n) {
    // Lemire's multiply-shift with rejection of the biased region.
    uint64_t x = engine_();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    uint64_t lo = static_cast<uint64_t>(m);
    if (lo < n) {
      uint64_t threshold = (0ULL - n) % n;
      while (lo < threshold) {
        x = engine_();
        m = static_cast<__uint128_t>(x) * n;
        lo = static_cast<uint64_t>(m);
      }
    }
    return static_cast<uint64_t>(m >> 64);
  }

  /// Uniform integer in [lo, hi] inclusive.
  int64_t next_int(int64_t lo, int64_t hi) {
    return lo + static_cast<int64_t>(next_below(static_cast<uint64_t>(hi - lo + 1)));
  }

  bool next_bernoulli(double p) { return next_double() < p; }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = next_below(i);
      std::swap(v[i - 1], v[j]);
    }
  }

  double next_normal() {
    // Box-Muller, one value per call (the spare is kept).
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * next_double() - 1.0;
      v = 2.0 * next_double() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

  /// Gamma(shape, 1). Marsaglia-Tsang for shape >= 1, boosted for shape < 1.
  double next_gamma(double shape) {
    if (shape < 1.0) {
      double u = next_double();
      while (u <= 0.0) u = next_double();
      return next_gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = next_normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      double u = next_double();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double next_beta(double a, double b) {
    double x = next_gamma(a);
    double y = next_gamma(b);
    return x / (x + y);
  }

  /// Dirichlet draw with the given concentration vector.
  std::vector<double> next_dirichlet(const std::vector<double>& conc) {
    std::vector<double> out(conc.size());
    double total = 0.0;
    for (size_t i = 0; i < conc.size(); ++i) {
      out[i] = next_gamma(conc[i]);
      total += out[i];
    }
    for (double& v : out) v /= total;
    return out;
  }

  /// Sample an index with the given (normalised) probabilities.
  int next_categorical(const std::vector<double>& probs) {
    double u = next_double();
    double acc = 0.0;
    for (size_t i = 0; i + 1 < probs.size(); ++i) {
      acc += probs[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace sbtm
