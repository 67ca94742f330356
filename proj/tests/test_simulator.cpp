#include "doctest.h"

#include "mmra/simulator.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

using namespace mmra;

namespace {

SimParams small(Protocol protocol, bool interference = true) {
  SimParams p;
  p.protocol = protocol;
  p.interference = interference;
  p.k0 = 2000;
  p.n_blocks = 3000;
  p.warmup_blocks = 500;
  p.omega_bar_samples = 2000;
  return p;
}

Contender unit_contender(double beta = 1.0) {
  Contender c;
  c.beta = beta;
  c.beta_known = beta;
  c.power = 1.0 / beta;
  return c;
}

PilotContext unit_context(Protocol protocol) {
  PilotContext ctx;
  ctx.protocol = protocol;
  ctx.antennas = 100;
  ctx.tau_p = 10;
  ctx.q = 1.0;
  ctx.sigma2 = 1.0;
  ctx.rho_bar = 1.0;
  return ctx;
}

} // namespace

TEST_CASE("energy accounting") {
  UeEpisode e;
  energy_account(e, 0.1, 10);
  CHECK(e.energy == doctest::Approx(1.0));
  CHECK(e.attempts == 1);

  UeEpisode f;
  for (int i = 0; i < 3; ++i) energy_account(f, 0.02, 10);
  CHECK(f.energy == doctest::Approx(0.6));
  CHECK(f.attempts == 3);

  CHECK(UeEpisode{}.energy == 0.0);
}

TEST_CASE("parameter validation names the offending key") {
  SimParams p;
  p.p_active = 0.0;
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("P_a"), std::invalid_argument);
  p = SimParams{};
  p.p_active = 1.5;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = SimParams{};
  p.tau_p = 0;
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("tau_p"), std::invalid_argument);
  p = SimParams{};
  p.max_attempts = 0;
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("max_attempts"), std::invalid_argument);
  p = SimParams{};
  p.n_blocks = 100;
  p.warmup_blocks = 100;
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("n_blocks"), std::invalid_argument);
  CHECK_NOTHROW(SimParams{}.validate());
}

TEST_CASE("episode budget keeps a 20% warmup") {
  SimParams p;
  p.target_episodes = 150000;
  const auto [total, warmup] = p.block_budget();
  CHECK(total - warmup == 10000);
  CHECK(warmup == 2500);
}

TEST_CASE("resolve_pilot: idle pilot") {
  Rng rng(1);
  const auto out = resolve_pilot({}, {}, unit_context(Protocol::Sucre), rng);
  CHECK_FALSE(out.resolved);
  CHECK(out.decisions.empty());
  CHECK_FALSE(out.winner);
}

TEST_CASE("resolve_pilot: baseline resolves only singletons") {
  Rng rng(2);
  const auto ctx = unit_context(Protocol::Baseline);
  const std::vector<Contender> one{unit_contender()};
  const std::vector<Contender> two{unit_contender(), unit_contender(2.0)};
  for (int i = 0; i < 100; ++i) {
    REQUIRE(resolve_pilot(one, {}, ctx, rng).resolved);
    const auto out = resolve_pilot(two, {}, ctx, rng);
    REQUIRE_FALSE(out.resolved);
    REQUIRE(out.decisions.size() == 2);
  }
}

TEST_CASE("resolve_pilot: a lone SUCRe contender almost always wins") {
  Rng rng(3);
  const auto ctx = unit_context(Protocol::Sucre);
  const std::vector<Contender> one{unit_contender()};
  int wins = 0;
  const int trials = 10000;
  for (int i = 0; i < trials; ++i) wins += resolve_pilot(one, {}, ctx, rng).resolved;
  CHECK(static_cast<double>(wins) / trials >= 0.99);

  // At very high SNR the decision is deterministic.
  std::vector<Contender> loud{unit_contender()};
  loud[0].power = 1e6;
  for (int i = 0; i < 1000; ++i) REQUIRE(resolve_pilot(loud, {}, ctx, rng).resolved);
}

TEST_CASE("resolve_pilot: two ACBPC contenders resolve about half the time") {
  // Large M and high received power make the contender estimate nearly exact.
  Rng rng(4);
  auto ctx = unit_context(Protocol::Acbpc);
  ctx.antennas = 2000;
  ctx.rho_bar = 100.0;
  std::vector<Contender> two{unit_contender(), unit_contender(0.5)};
  for (auto& c : two) c.power = ctx.rho_bar / c.beta;
  int resolved = 0;
  const int trials = 20000;
  for (int i = 0; i < trials; ++i) resolved += resolve_pilot(two, {}, ctx, rng).resolved;
  const double sigma = std::sqrt(0.25 / trials);
  CHECK(std::abs(static_cast<double>(resolved) / trials - 0.5) < 3.0 * sigma + 0.01);
}

TEST_CASE("resolve_pilot records the interference it was given") {
  Rng rng(5);
  const auto ctx = unit_context(Protocol::Acbpc);
  const std::vector<Contender> one{unit_contender()};
  const std::vector<PilotInterferer> ring{{0.5, 2.0}, {0.25, 4.0}};
  const auto out = resolve_pilot(one, ring, ctx, rng);
  CHECK(out.omega == doctest::Approx((1.0 + 1.0) * 10));
  CHECK(out.alpha == doctest::Approx(10.0 + 20.0));
}

TEST_CASE("K0 = 1 with certain activation never collides") {
  SimParams p;
  p.interference = false;
  p.k0 = 1;
  p.p_active = 1.0;
  p.n_blocks = 400;
  p.warmup_blocks = 100;

  SUBCASE("baseline resolves every block") {
    p.protocol = Protocol::Baseline;
    const auto t = run(p);
    CHECK(t.episodes == 300);
    CHECK(t.failures == 0);
    CHECK(t.avg_attempts_all() == 1.0);
  }
  SUBCASE("SUCRe and ACBPC lose only to estimation noise") {
    // Without contention only the alpha estimate can make the lone UE stay
    // silent; a large array and no shadowing keep that rare.
    p.antennas = 1000;
    p.pathloss.shadow_db = 0.0;
    for (auto protocol : {Protocol::Sucre, Protocol::Acbpc}) {
      CAPTURE(to_string(protocol));
      p.protocol = protocol;
      const auto t = run(p);
      CHECK(t.failures == 0);
      CHECK(t.avg_attempts_all() < 1.02);
      CHECK(t.by_contenders.size() == 2);
    }
  }
}

TEST_CASE("new arrivals per pilot follow the binomial law") {
  SimParams p = small(Protocol::Acbpc, false);
  p.k0 = 15000;
  p.n_blocks = 4000;
  p.warmup_blocks = 0;
  // Arrivals in block b = change in backlog + UEs that left in block b. Each
  // is Binomial(idle pool at the start of b, P_a).
  double residual = 0.0;
  double variance = 0.0;
  double per_pilot = 0.0;
  std::int64_t blocks = 0;
  std::int64_t prev_active = 0;
  run(p, [&](const BlockSnapshot& s) {
    const std::int64_t active = s.contending + s.backing_off;
    const auto arrivals = static_cast<double>(active - prev_active + s.succeeded + s.failed);
    const auto idle = static_cast<double>(p.k0 - prev_active);
    prev_active = active;
    residual += arrivals - idle * p.p_active;
    variance += idle * p.p_active * (1.0 - p.p_active);
    per_pilot += idle * p.p_active / p.tau_p;
    ++blocks;
  });
  CHECK(std::abs(residual) < 4.0 * std::sqrt(variance));
  // With no backlog the per-pilot mean is K0 P_a / tau_p = 1.5; the backlog
  // of retrying UEs pulls it slightly below.
  CHECK(per_pilot / blocks <= 1.5);
  CHECK(per_pilot / blocks > 1.4);
}

TEST_CASE("binomial arrival draws have the oracle moments") {
  Rng rng(6);
  const std::int64_t trials = 15000;
  const double p = 1e-4;
  double s = 0.0;
  double s2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = static_cast<double>(rng.binomial(trials, p));
    s += x;
    s2 += x * x;
  }
  const double mean = s / n;
  const double var = s2 / n - mean * mean;
  CHECK(mean == doctest::Approx(1.5).epsilon(0.01));
  CHECK(var == doctest::Approx(1.5 * (1.0 - p)).epsilon(0.02));
}

TEST_CASE("population is conserved and stationary") {
  SimParams p = small(Protocol::Sucre);
  p.k0 = 12000;
  p.n_blocks = 3000;
  std::vector<double> active;
  bool conserved = true;
  int max_seen = 0;
  run(p, [&](const BlockSnapshot& s) {
    conserved = conserved && (s.idle + s.contending + s.backing_off == p.k0);
    max_seen = std::max(max_seen, s.max_attempts_seen);
    active.push_back(static_cast<double>(s.contending + s.backing_off));
  });
  CHECK(conserved);
  CHECK(max_seen <= p.max_attempts);
  // Mean backlog over the second and last thirds agree within 5%.
  const std::size_t third = active.size() / 3;
  const double a = std::accumulate(active.begin() + third, active.begin() + 2 * third, 0.0) / third;
  const double b = std::accumulate(active.begin() + 2 * third, active.begin() + 3 * third, 0.0) / third;
  CHECK(std::abs(a / b - 1.0) < 0.05);
}

TEST_CASE("metric tables are internally consistent") {
  for (auto protocol : {Protocol::Sucre, Protocol::Acbpc, Protocol::Baseline}) {
    CAPTURE(to_string(protocol));
    const auto t = run(small(protocol));
    CHECK(t.episodes == t.successes + t.failures);
    CHECK(t.episodes > 0);
    CHECK(t.fail_prob() >= 0.0);
    CHECK(t.fail_prob() <= 1.0);
    CHECK(t.avg_attempts_all() >= 1.0);
    CHECK(t.avg_attempts_all() <= t.max_attempts);
    CHECK(t.attempts_all == t.attempts_success + t.failures * t.max_attempts);

    std::int64_t hist = 0;
    for (auto h : t.attempts_hist) hist += h;
    CHECK(hist == t.successes);

    std::int64_t ep = 0, fails = 0, att = 0, tx = 0, wins = 0;
    for (const auto& b : t.by_distance) {
      ep += b.episodes;
      fails += b.failures;
      att += b.attempts;
      tx += b.transmissions;
      wins += b.wins;
      CHECK(b.p_res() >= 0.0);
      CHECK(b.p_res() <= 1.0);
      CHECK(b.fail_prob() <= 1.0);
    }
    CHECK(ep == t.episodes);
    CHECK(fails == t.failures);
    CHECK(att == t.attempts_all);
    CHECK(tx == t.transmissions);

    std::int64_t busy = 0, resolved = 0;
    for (std::size_t n = 0; n < t.by_contenders.size(); ++n) {
      busy += t.by_contenders[n].total;
      resolved += t.by_contenders[n].resolved;
      CHECK(t.by_contenders[n].resolved <= t.by_contenders[n].total);
    }
    CHECK(busy == t.busy_pilots);
    CHECK(resolved == t.resolved_pilots);
    CHECK(wins == t.resolved_pilots);
    CHECK(t.pilot_slots == t.measured_blocks * 10);
  }
}

TEST_CASE("baseline never resolves a collision") {
  const auto t = run(small(Protocol::Baseline));
  CHECK(t.by_contenders.at(1).resolved == t.by_contenders.at(1).total);
  for (std::size_t n = 2; n < t.by_contenders.size(); ++n) CHECK(t.by_contenders[n].resolved == 0);
}

TEST_CASE("SUCRe power is normalised to one and ACBPC stays below it") {
  const auto s = run(small(Protocol::Sucre));
  const auto a = run(small(Protocol::Acbpc));
  for (const auto& b : s.by_distance) CHECK(b.avg_power_norm() == doctest::Approx(1.0));
  for (const auto& b : a.by_distance) CHECK(b.avg_power_norm() <= 1.0 + 1e-12);
  // Energy per episode is attempts * 0.1 W * tau_p for SUCRe.
  for (const auto& b : s.by_distance)
    CHECK(b.avg_energy() == doctest::Approx(b.avg_attempts() * 0.1 * 10));
}

TEST_CASE("runs are deterministic given the seed") {
  const auto p = small(Protocol::Acbpc);
  const auto a = run(p);
  const auto b = run(p);
  CHECK(a.episodes == b.episodes);
  CHECK(a.attempts_all == b.attempts_all);
  CHECK(a.failures == b.failures);
  CHECK(a.omega_bar == b.omega_bar);
  for (std::size_t i = 0; i < a.by_distance.size(); ++i)
    CHECK(a.by_distance[i].energy_sum == b.by_distance[i].energy_sum);

  auto q = p;
  q.seed = 2;
  CHECK(run(q).attempts_all != a.attempts_all);
}

TEST_CASE("merge adds counts") {
  const auto p = small(Protocol::Sucre);
  auto a = run(p);
  auto q = p;
  q.seed = 9;
  const auto b = run(q);
  const auto episodes = a.episodes + b.episodes;
  const auto slots = a.pilot_slots + b.pilot_slots;
  const auto bin0 = a.by_distance[0].transmissions + b.by_distance[0].transmissions;
  a.merge(b);
  CHECK(a.episodes == episodes);
  CHECK(a.pilot_slots == slots);
  CHECK(a.by_distance[0].transmissions == bin0);

  MetricsTable odd = b;
  odd.by_distance.pop_back();
  CHECK_THROWS_AS(a.merge(odd), std::invalid_argument);
}

TEST_CASE("sweep keeps axis order and derives seeds") {
  const auto base = small(Protocol::Acbpc);
  SweepAxis axis;
  axis.k0_values = {1500, 2500};
  const auto tables = sweep(base, axis, 2);
  REQUIRE(tables.size() == 2);
  CHECK(tables[0].k0 == 1500);
  CHECK(tables[1].k0 == 2500);

  auto p0 = base;
  p0.k0 = 1500;
  CHECK(run(p0).attempts_all == tables[0].attempts_all);
  auto p1 = base;
  p1.k0 = 2500;
  p1.seed = base.seed + 1;
  CHECK(run(p1).attempts_all == tables[1].attempts_all);
}

TEST_CASE("single-point sweep equals a plain run") {
  const auto base = small(Protocol::Sucre);
  SweepAxis axis;
  axis.kind = SweepAxis::Kind::DistanceBins;
  const auto tables = sweep(base, axis);
  REQUIRE(tables.size() == 1);
  CHECK(tables[0].attempts_all == run(base).attempts_all);
}

TEST_CASE("sweep errors carry the axis label") {
  auto base = small(Protocol::Sucre);
  SweepAxis axis;
  axis.k0_values = {1000, -5};
  CHECK_THROWS_WITH(sweep(base, axis), doctest::Contains("K0=-5"));
  axis.k0_values.clear();
  CHECK_THROWS(sweep(base, axis));
}

TEST_CASE("idealized resolution frequency") {
  Rng rng(7);
  CHECK(idealized_resolution_frequency(1, 100, rng) == 1.0);
  const double f = idealized_resolution_frequency(2, 100000, rng);
  CHECK(std::abs(f - 0.5) < 3.0 * std::sqrt(0.25 / 100000));
}

TEST_CASE("per block, successes equal resolved pilots") {
  for (auto protocol : {Protocol::Sucre, Protocol::Acbpc, Protocol::Baseline}) {
    CAPTURE(to_string(protocol));
    auto p = small(protocol);
    p.n_blocks = 800;
    bool ok = true;
    run(p, [&](const BlockSnapshot& s) {
      ok = ok && s.succeeded == s.resolved_pilots && s.resolved_pilots <= p.tau_p &&
           s.resolved_pilots <= s.busy_pilots;
    });
    CHECK(ok);
  }
}

TEST_CASE("ACBPC without interference stays under the bound") {
  auto p = small(Protocol::Acbpc, false);
  p.k0 = 12000;
  p.n_blocks = 2500;
  const auto t = run(p);
  for (std::size_t n = 1; n < t.by_contenders.size(); ++n) {
    const auto& c = t.by_contenders[n];
    if (c.total == 0) continue;
    CAPTURE(n);
    const double b = p_res_bound(static_cast<long long>(n));
    const double sigma = std::sqrt(b * (1.0 - b) / c.total);
    CHECK(c.ratio() <= b + 3.0 * sigma + 1e-12);
  }
}
