// Deterministic random-number helpers. std::mt19937_64 is specified exactly
// by the standard, but the std distributions are not; the transforms below
// are hand-rolled so that identical seeds give identical streams on every
// platform/toolchain, which the benchmark reproducibility tests rely on.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace trigger_descent {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Uniform on (0, 1]: 53 mantissa bits, never exactly 0 (log-safe).
  double uniform01() {
    return static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // Log-uniform over [lo, hi], lo > 0.
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }

  // Box-Muller; one fresh pair of uniforms per call (second value discarded)
  // so the draw sequence is independent of call history.
  double normal(double mu, double sd) {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return mu + sd * std::sqrt(-2.0 * std::log(u1)) *
                     std::cos(2.0 * kPi * u2);
  }

 private:
  static constexpr double kPi = 3.141592653589793238462643383279502884;
  std::mt19937_64 eng_;
};

}  // namespace trigger_descent
