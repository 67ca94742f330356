#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace mmra {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

/// Seedable random stream used by every stochastic operation.
///
/// Each simulation worker owns its own instance; nothing in the library keeps
/// hidden global RNG state.
class Rng {
public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  /// Uniform on [0, 1).
  double uniform() { return unit_(engine_); }
  double normal() { return normal_(engine_); }
  /// Uniform integer on [0, n).
  std::size_t index(std::size_t n);
  /// Uniform integer on [lo, hi].
  int uniform_int(int lo, int hi);
  std::int64_t binomial(std::int64_t trials, double p);

  /// CN(0, variance): real and imaginary parts each N(0, variance / 2).
  cplx complex_normal(double variance);
  void fill_complex_normal(std::span<cplx> out, double variance);

  std::mt19937_64& engine() { return engine_; }

private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t x);

} // namespace mmra
