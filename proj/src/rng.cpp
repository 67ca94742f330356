#include "mmra/rng.hpp"

#include <cmath>

namespace mmra {

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  const std::uint64_t a = mix_seed(seed);
  const std::uint64_t b = mix_seed(a ^ mix_seed(stream + 1));
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  engine_.seed(seq);
}

std::size_t Rng::index(std::size_t n) {
  std::uniform_int_distribution<std::size_t> d(0, n - 1);
  return d(engine_);
}

int Rng::uniform_int(int lo, int hi) {
  std::uniform_int_distribution<int> d(lo, hi);
  return d(engine_);
}

std::int64_t Rng::binomial(std::int64_t trials, double p) {
  if (trials <= 0 || p <= 0.0) return 0;
  std::binomial_distribution<std::int64_t> d(trials, p);
  return d(engine_);
}

cplx Rng::complex_normal(double variance) {
  const double s = std::sqrt(0.5 * variance);
  const double re = normal_(engine_);
  const double im = normal_(engine_);
  return {s * re, s * im};
}

void Rng::fill_complex_normal(std::span<cplx> out, double variance) {
  const double s = std::sqrt(0.5 * variance);
  for (auto& v : out) {
    const double re = normal_(engine_);
    const double im = normal_(engine_);
    v = {s * re, s * im};
  }
}

} // namespace mmra
