#include "doctest.h"

#include "mmra/power_policy.hpp"
#include "mmra/protocols.hpp"
#include "mmra/signal_model.hpp"
#include "mmra/simulator.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

using namespace mmra;

namespace {

const PathLoss kPl;
const double kRhoSucre = sucre_power(1.0, kPl, 250.0);

PowerPolicy acbpc() { return policy_for(Protocol::Acbpc, kRhoSucre, 1.0, kRhoSucre); }
PowerPolicy sucre() { return policy_for(Protocol::Sucre, kRhoSucre, 1.0, kRhoSucre); }

DecisionInput unit_input() {
  DecisionInput in;
  in.rho = 1.0;
  in.beta = 1.0;
  in.tau_p = 10;
  in.q = 1.0;
  in.sigma2 = 1.0;
  in.rho_bar = 1.0;
  return in;
}

AlphaEstimate alpha_of(double v) {
  AlphaEstimate a;
  a.value = v;
  return a;
}

// Product form of the bound, accumulated in long double.
long double product_bound(int n) {
  long double p = 1.0L;
  const long double base = 1.0L - 1.0L / n;
  for (int i = 1; i < n; ++i) p *= base;
  return p;
}

} // namespace

TEST_CASE("SUCRe power puts an unshadowed cell-edge UE at the noise level") {
  // 1 / (10^-3.53 * 250^-3.8) to 30 digits: 4.38704443190530e12.
  CHECK(kRhoSucre == doctest::Approx(4.387044431905303e12).epsilon(1e-12));
  CHECK(kRhoSucre * kPl.gain(250.0) == doctest::Approx(1.0));
}

TEST_CASE("tx_power examples") {
  const auto p = acbpc();
  CHECK(tx_power(p, 2.0 * p.rho_bar / p.rho_max) == doctest::Approx(p.rho_max / 2.0));
  CHECK(tx_power(p, std::numeric_limits<double>::min()) == p.rho_max);
  CHECK(tx_power(sucre(), 1e-20) == kRhoSucre);
  CHECK(tx_power(sucre(), 1.0) == kRhoSucre);
  CHECK(tx_power(policy_for(Protocol::Baseline, kRhoSucre, 1.0, kRhoSucre), 3.0) == kRhoSucre);
  CHECK_THROWS_AS(tx_power(p, 0.0), std::domain_error);
  CHECK_THROWS_AS(tx_power(sucre(), -1.0), std::domain_error);
}

TEST_CASE("ACBPC power never exceeds the SUCRe power") {
  const auto p = acbpc();
  for (double e = -20.0; e <= 2.0; e += 0.01) CHECK(tx_power(p, std::pow(10.0, e)) <= kRhoSucre);
}

TEST_CASE("power policy validation") {
  PowerPolicy p = acbpc();
  p.rho_max = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = acbpc();
  p.rho_bar = -1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("SUCRe bias") {
  CHECK(sucre_bias(0.0) == 0.0);
  CHECK(sucre_bias(2.0 * 3.5) == -3.5);
  CHECK(sucre_bias(10.0, 1.25) == 1.25);
}

TEST_CASE("SUCRe decision examples") {
  auto in = unit_input();
  const double g = in.own_gain();
  CHECK(sucre_decide(in, alpha_of(g)).repeats());
  CHECK_FALSE(sucre_decide(in, alpha_of(4.0 * g)).repeats());
  // Two equal contenders with perfect alpha: strict inequality fails for both.
  CHECK_FALSE(sucre_decide(in, alpha_of(2.0 * g)).repeats());
  in.epsilon = -1.0;
  CHECK(sucre_decide(in, alpha_of(2.0 * g)).repeats());
  const auto d = sucre_decide(in, alpha_of(3.0 * g));
  CHECK(d.margin == doctest::Approx(g - (1.5 * g - 1.0)));
  CHECK(d.alpha_hat == 3.0 * g);
}

TEST_CASE("SUCRe: exactly one strong UE gives exactly one repeat") {
  const std::vector<double> gains{1.0, 2.0, 9.0, 0.5};
  double alpha = 0.0;
  for (double x : gains) alpha += x;
  int repeats = 0;
  for (double x : gains) {
    DecisionInput in = unit_input();
    in.rho = x / (in.beta * in.tau_p);
    repeats += sucre_decide(in, alpha_of(alpha)).repeats();
  }
  CHECK(repeats == 1);
}

TEST_CASE("ACBPC decision examples") {
  Rng rng(1);
  auto in = unit_input();
  in.omega_bar = 5.0;

  // S_hat = 1: always repeat.
  for (int i = 0; i < 1000; ++i) REQUIRE(acbpc_decide(in, alpha_of(15.0), rng).repeats());
  // Noisy alpha below omega_bar clamps to S_hat = 1.
  for (int i = 0; i < 1000; ++i) REQUIRE(acbpc_decide(in, alpha_of(1.0), rng).repeats());

  // S_hat = 4: Bernoulli(0.25).
  const int n = 1000000;
  int hits = 0;
  for (int i = 0; i < n; ++i) {
    const auto d = acbpc_decide(in, alpha_of(45.0), rng);
    hits += d.repeats();
    if (i == 0) CHECK(d.contenders_estimate == doctest::Approx(4.0));
  }
  CHECK(std::abs(static_cast<double>(hits) / n - 0.25) < 0.002);
}

TEST_CASE("baseline always repeats") {
  CHECK(baseline_decide().repeats());
}

TEST_CASE("bound examples") {
  CHECK(p_res_bound(1) == 1.0);
  CHECK(p_res_bound(2) == 0.5);
  CHECK(p_res_bound(10) == doctest::Approx(0.387420489).epsilon(1e-14));
  CHECK(std::abs(p_res_bound(1000000) - std::exp(-1.0)) < 1e-6);
  CHECK_THROWS_AS(p_res_bound(0), std::domain_error);
  CHECK_THROWS_AS(p_res_bound(-3), std::domain_error);
}

TEST_CASE("bound matches the long-double product to 12 digits") {
  for (int n = 1; n <= 50; ++n) {
    CAPTURE(n);
    const double oracle = static_cast<double>(product_bound(n));
    CHECK(std::abs(p_res_bound(n) / oracle - 1.0) < 1e-12);
  }
}

TEST_CASE("bound is decreasing and stays above 1/e") {
  double prev = 2.0;
  for (long long n = 1; n <= 100000; ++n) {
    const double b = p_res_bound(n);
    REQUIRE(b < prev);
    REQUIRE(b > std::exp(-1.0));
    prev = b;
  }
}

TEST_CASE("idealized retransmission frequency follows the bound") {
  // Written independently of the library helper: draw n Bernoulli(1/n)
  // variables and count single-repeater trials.
  Rng rng(42);
  const std::int64_t trials = 200000;
  for (int n = 2; n <= 20; ++n) {
    CAPTURE(n);
    std::int64_t singles = 0;
    for (std::int64_t t = 0; t < trials; ++t) {
      int r = 0;
      for (int k = 0; k < n; ++k) r += rng.uniform() < 1.0 / n;
      singles += r == 1;
    }
    const double p = p_res_bound(n);
    const double sigma = std::sqrt(p * (1.0 - p) / trials);
    CHECK(std::abs(static_cast<double>(singles) / trials - p) < 3.0 * sigma);

    Rng lib(1000 + n);
    CHECK(std::abs(idealized_resolution_frequency(n, trials, lib) - p) < 3.0 * sigma);
  }
}
