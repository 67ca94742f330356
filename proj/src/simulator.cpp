#include "mmra/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

namespace mmra {

namespace {

constexpr int kDistanceBins = 9;

std::string k0_label(std::int64_t k0) { return "K0=" + std::to_string(k0); }

} // namespace

void SimParams::validate() const {
  auto fail = [](const std::string& key, const std::string& why) {
    throw std::invalid_argument(key + ": " + why);
  };
  if (antennas < 1) fail("M", "must be >= 1");
  if (tau_p < 1) fail("tau_p", "must be >= 1");
  if (k0 < 1) fail("K0", "must be >= 1");
  if (!(p_active > 0.0 && p_active <= 1.0)) fail("P_a", "must satisfy 0 < P_a <= 1");
  if (max_attempts < 1) fail("max_attempts", "must be >= 1");
  if (backoff_window < 1) fail("backoff_window", "must be >= 1");
  if (target_episodes < 0) fail("episodes", "must be >= 0");
  if (target_episodes == 0) {
    if (warmup_blocks < 0) fail("warmup_blocks", "must be >= 0");
    if (!(n_blocks > warmup_blocks)) fail("n_blocks", "must exceed warmup_blocks");
  }
  if (!(sigma_beta >= 0.0)) fail("sigma_beta", "must be >= 0");
  if (!(sigma2 > 0.0)) fail("sigma2", "must be > 0");
  if (q && !(*q >= 0.0)) fail("q", "must be >= 0");
  if (rho_bar && !(*rho_bar > 0.0)) fail("rho_bar", "must be > 0");
  if (rho_max && !(*rho_max > 0.0)) fail("rho_max", "must be > 0");
  if (!(pathloss.d_ref > 0.0)) fail("d_ref", "must be > 0");
  if (!(pathloss.kappa > 0.0)) fail("kappa", "must be > 0");
  if (!(pathloss.shadow_db >= 0.0)) fail("shadow_db", "must be >= 0");
  if (omega_bar_samples < 1) fail("omega_bar_samples", "must be >= 1");
  if (!(rho_sucre_watts > 0.0)) fail("rho_sucre_watts", "must be > 0");
  try {
    layout().validate();
  } catch (const std::invalid_argument& e) {
    fail("d_min/d_max", e.what());
  }
}

CellLayout SimParams::layout() const {
  CellLayout l;
  l.d_max = d_max;
  l.d_min = d_min;
  l.n_adjacent = interference ? 6 : 0;
  return l;
}

double SimParams::rho_sucre() const { return sucre_power(sigma2, pathloss, d_max); }

PowerPolicy SimParams::policy() const {
  return policy_for(protocol, rho_sucre(), target_rx_power(), max_power());
}

std::pair<std::int64_t, std::int64_t> SimParams::block_budget() const {
  if (target_episodes <= 0) return {n_blocks, warmup_blocks};
  const double per_block = static_cast<double>(k0) * p_active;
  const auto measured = static_cast<std::int64_t>(std::ceil(target_episodes / per_block));
  const std::int64_t total = static_cast<std::int64_t>(std::ceil(measured / 0.8));
  return {total, total - measured};
}

void energy_account(UeEpisode& episode, double power, int tau_p) {
  episode.energy += power * tau_p;
  episode.attempts += 1;
}

double MetricsTable::avg_attempts_all() const {
  return episodes ? static_cast<double>(attempts_all) / episodes : 0.0;
}

double MetricsTable::avg_attempts_success() const {
  return successes ? static_cast<double>(attempts_success) / successes : 0.0;
}

double MetricsTable::fail_prob() const {
  return episodes ? static_cast<double>(failures) / episodes : 0.0;
}

double MetricsTable::avg_contenders() const {
  return pilot_slots ? static_cast<double>(transmissions) / pilot_slots : 0.0;
}

void MetricsTable::merge(const MetricsTable& o) {
  episodes += o.episodes;
  successes += o.successes;
  failures += o.failures;
  attempts_all += o.attempts_all;
  attempts_success += o.attempts_success;
  if (attempts_hist.size() < o.attempts_hist.size()) attempts_hist.resize(o.attempts_hist.size());
  for (std::size_t i = 0; i < o.attempts_hist.size(); ++i) attempts_hist[i] += o.attempts_hist[i];
  if (by_contenders.size() < o.by_contenders.size()) by_contenders.resize(o.by_contenders.size());
  for (std::size_t i = 0; i < o.by_contenders.size(); ++i) {
    by_contenders[i].resolved += o.by_contenders[i].resolved;
    by_contenders[i].total += o.by_contenders[i].total;
  }
  if (by_distance.size() != o.by_distance.size())
    throw std::invalid_argument("MetricsTable::merge: distance binning differs");
  for (std::size_t i = 0; i < by_distance.size(); ++i) {
    auto& a = by_distance[i];
    const auto& b = o.by_distance[i];
    a.episodes += b.episodes;
    a.failures += b.failures;
    a.attempts += b.attempts;
    a.transmissions += b.transmissions;
    a.wins += b.wins;
    a.power_sum += b.power_sum;
    a.energy_sum += b.energy_sum;
  }
  measured_blocks += o.measured_blocks;
  pilot_slots += o.pilot_slots;
  busy_pilots += o.busy_pilots;
  resolved_pilots += o.resolved_pilots;
  transmissions += o.transmissions;
}

MetricsTable make_metrics_table(const SimParams& p) {
  MetricsTable t;
  t.protocol = p.protocol;
  t.interference = p.interference;
  t.k0 = p.k0;
  t.sigma_beta = p.sigma_beta;
  t.max_attempts = p.max_attempts;
  t.attempts_hist.assign(static_cast<std::size_t>(p.max_attempts) + 1, 0);
  const double width = (p.d_max - p.d_min) / kDistanceBins;
  for (int i = 0; i < kDistanceBins; ++i) {
    DistanceBin b;
    b.lo = p.d_min + i * width;
    b.hi = p.d_min + (i + 1) * width;
    t.by_distance.push_back(b);
  }
  return t;
}

PilotContext make_pilot_context(const SimParams& p, double omega_bar) {
  PilotContext c;
  c.protocol = p.protocol;
  c.antennas = p.antennas;
  c.tau_p = p.tau_p;
  c.q = p.downlink_power();
  c.sigma2 = p.sigma2;
  c.rho_bar = p.target_rx_power();
  c.omega_bar = omega_bar;
  c.epsilon = sucre_bias(omega_bar, p.epsilon);
  return c;
}

PilotOutcome resolve_pilot(std::span<const Contender> contenders,
                           std::span<const PilotInterferer> interferers, const PilotContext& ctx,
                           Rng& rng) {
  PilotOutcome out;
  if (contenders.empty()) return out;

  if (ctx.protocol == Protocol::Baseline) {
    out.decisions.assign(contenders.size(), baseline_decide());
  } else {
    const auto m = static_cast<std::size_t>(ctx.antennas);
    std::vector<cplx> channels(contenders.size() * m);
    std::vector<PilotTransmission> tx(contenders.size());
    for (std::size_t k = 0; k < contenders.size(); ++k) {
      std::span<cplx> h(channels.data() + k * m, m);
      draw_channel(contenders[k].beta, h, rng);
      tx[k] = {h, contenders[k].power, contenders[k].beta};
    }
    // The neighbours' channels are independent CN vectors, so their weighted
    // sum is one CN vector with the summed variance.
    double omega = 0.0;
    for (const auto& it : interferers) omega += it.power * it.beta_home * ctx.tau_p;
    CVector aggregate;
    std::vector<PilotTransmission> itx;
    if (omega > 0.0) {
      aggregate = draw_channel(1.0, m, rng);
      itx.push_back({aggregate, omega / ctx.tau_p, 1.0});
    }
    const PilotObservation obs =
        uplink_observation(tx, itx, ctx.tau_p, ctx.sigma2, m, rng);
    out.alpha = obs.alpha;
    out.omega = obs.omega;

    out.decisions.reserve(contenders.size());
    for (std::size_t k = 0; k < contenders.size(); ++k) {
      DecisionInput in;
      in.z = downlink_observation(obs, tx[k].channel, ctx.q, ctx.sigma2,
                                  contenders[k].dl_interference_var, rng);
      in.rho = contenders[k].power;
      in.beta = contenders[k].beta_known;
      in.tau_p = ctx.tau_p;
      in.q = ctx.q;
      in.sigma2 = ctx.sigma2;
      in.omega_bar = ctx.omega_bar;
      in.rho_bar = ctx.rho_bar;
      in.epsilon = ctx.epsilon;
      const AlphaEstimate est = estimate_alpha(in, ctx.antennas);
      out.decisions.push_back(ctx.protocol == Protocol::Sucre ? sucre_decide(in, est)
                                                              : acbpc_decide(in, est, rng));
    }
  }

  std::size_t repeaters = 0;
  for (std::size_t k = 0; k < out.decisions.size(); ++k) {
    if (out.decisions[k].repeats()) {
      ++repeaters;
      out.winner = k;
    }
  }
  out.resolved = repeaters == 1;
  if (!out.resolved) out.winner.reset();
  return out;
}

namespace {

class Simulation {
public:
  explicit Simulation(const SimParams& p)
      : p_(p), layout_(p.layout()), policy_(p.policy()), rng_(p.seed), table_(make_metrics_table(p)) {
    double omega_bar = 0.0;
    if (p_.interference) {
      Rng omega_rng(p_.seed, 1);
      omega_bar = estimate_omega_bar(layout_, p_.tau_p, policy_, p_.pathloss,
                                     p_.omega_bar_samples, omega_rng, p_.link_shadowing);
    }
    ctx_ = make_pilot_context(p_, omega_bar);
    table_.omega_bar = omega_bar;
    rho_sucre_ = p_.rho_sucre();
    members_.resize(static_cast<std::size_t>(p_.tau_p));
  }

  MetricsTable run(const BlockObserver& observer) {
    const auto [n_blocks, warmup] = p_.block_budget();
    for (std::int64_t b = 0; b < n_blocks; ++b) step(b, b >= warmup, observer);
    return std::move(table_);
  }

private:
  std::size_t bin_of(double d) const {
    const auto& bins = table_.by_distance;
    const double width = bins.front().hi - bins.front().lo;
    const auto i = static_cast<long>(std::floor((d - bins.front().lo) / width));
    return static_cast<std::size_t>(std::clamp<long>(i, 0, static_cast<long>(bins.size()) - 1));
  }

  UeEpisode spawn() {
    UeEpisode e;
    e.position = place_ue(layout_, rng_);
    e.gain = large_scale_gain(e.position.d_home, rng_, p_.pathloss.shadow_db, p_.pathloss);
    e.gain = perturb_beta(e.gain, p_.sigma_beta, rng_);
    e.power = tx_power(policy_, e.gain.beta_known);
    if (p_.interference && p_.dl_interference) {
      std::vector<double> beta_adj;
      for (double d : e.position.d_adjacent) {
        const double chi = p_.link_shadowing == ShadowingModel::PerUe
                               ? e.gain.chi
                               : draw_shadowing(rng_, p_.pathloss.shadow_db);
        beta_adj.push_back(p_.pathloss.gain(d, chi));
      }
      e.dl_interference_var = dl_interference_variance(ctx_.q, p_.tau_p, beta_adj);
    }
    e.state = UeState::Contending;
    return e;
  }

  void finish(const UeEpisode& e, bool measuring) {
    if (!measuring) return;
    const bool failed = e.state == UeState::Failed;
    table_.episodes += 1;
    table_.attempts_all += e.attempts;
    if (failed) {
      table_.failures += 1;
    } else {
      table_.successes += 1;
      table_.attempts_success += e.attempts;
      table_.attempts_hist[static_cast<std::size_t>(e.attempts)] += 1;
    }
    auto& bin = table_.by_distance[bin_of(e.position.d_home)];
    bin.episodes += 1;
    bin.failures += failed ? 1 : 0;
    bin.attempts += e.attempts;
    bin.energy_sum += e.energy;
  }

  void step(std::int64_t block, bool measuring, const BlockObserver& observer) {
    for (auto& e : active_) {
      if (e.state == UeState::BackingOff && --e.backoff == 0) e.state = UeState::Contending;
    }
    const std::int64_t idle = p_.k0 - static_cast<std::int64_t>(active_.size());
    const std::int64_t arrivals = rng_.binomial(idle, p_.p_active);
    for (std::int64_t i = 0; i < arrivals; ++i) active_.push_back(spawn());

    for (auto& m : members_) m.clear();
    for (std::size_t i = 0; i < active_.size(); ++i) {
      if (active_[i].state == UeState::Contending) members_[rng_.index(members_.size())].push_back(i);
    }

    std::vector<Interferer> ring;
    const bool any = std::any_of(members_.begin(), members_.end(), [](auto& m) { return !m.empty(); });
    if (p_.interference && any)
      ring = spawn_interferers(layout_, p_.tau_p, policy_, p_.pathloss, rng_,
                               p_.link_shadowing);

    BlockSnapshot snap;
    snap.block = block;
    std::vector<Contender> contenders;
    std::vector<PilotInterferer> interferers;
    for (int t = 0; t < p_.tau_p; ++t) {
      const auto& group = members_[static_cast<std::size_t>(t)];
      if (measuring) table_.pilot_slots += 1;
      if (group.empty()) continue;

      contenders.clear();
      for (std::size_t idx : group) {
        const auto& e = active_[idx];
        contenders.push_back({e.gain.beta, e.gain.beta_known, e.power, e.dl_interference_var});
      }
      interferers.clear();
      for (const auto& it : ring)
        if (it.pilot == t) interferers.push_back({it.beta_home, it.power});

      const PilotOutcome outcome = resolve_pilot(contenders, interferers, ctx_, rng_);
      snap.busy_pilots += 1;
      snap.resolved_pilots += outcome.resolved ? 1 : 0;

      for (std::size_t k = 0; k < group.size(); ++k) {
        auto& e = active_[group[k]];
        const double norm_power = e.power / rho_sucre_;
        energy_account(e, norm_power * p_.rho_sucre_watts, p_.tau_p);
        const bool won = outcome.winner && *outcome.winner == k;
        if (won) {
          e.state = UeState::Succeeded;
        } else if (e.attempts >= p_.max_attempts) {
          e.state = UeState::Failed;
        } else {
          e.state = UeState::BackingOff;
          e.backoff = rng_.uniform_int(1, p_.backoff_window);
        }
        if (measuring) {
          auto& bin = table_.by_distance[bin_of(e.position.d_home)];
          bin.transmissions += 1;
          bin.wins += won ? 1 : 0;
          bin.power_sum += norm_power;
        }
      }
      if (measuring) {
        const std::size_t n = group.size();
        if (table_.by_contenders.size() <= n) table_.by_contenders.resize(n + 1);
        table_.by_contenders[n].total += 1;
        table_.by_contenders[n].resolved += outcome.resolved ? 1 : 0;
        table_.busy_pilots += 1;
        table_.resolved_pilots += outcome.resolved ? 1 : 0;
        table_.transmissions += static_cast<std::int64_t>(n);
      }
    }
    if (measuring) table_.measured_blocks += 1;

    std::size_t keep = 0;
    for (std::size_t i = 0; i < active_.size(); ++i) {
      auto& e = active_[i];
      if (e.state == UeState::Succeeded || e.state == UeState::Failed) {
        snap.succeeded += e.state == UeState::Succeeded ? 1 : 0;
        snap.failed += e.state == UeState::Failed ? 1 : 0;
        snap.max_attempts_seen = std::max(snap.max_attempts_seen, e.attempts);
        finish(e, measuring);
        continue;
      }
      snap.max_attempts_seen = std::max(snap.max_attempts_seen, e.attempts);
      if (keep != i) active_[keep] = std::move(e);
      ++keep;
    }
    active_.resize(keep);

    if (observer) {
      for (const auto& e : active_) {
        snap.contending += e.state == UeState::Contending ? 1 : 0;
        snap.backing_off += e.state == UeState::BackingOff ? 1 : 0;
      }
      snap.idle = p_.k0 - static_cast<std::int64_t>(active_.size());
      observer(snap);
    }
  }

  SimParams p_;
  CellLayout layout_;
  PowerPolicy policy_;
  Rng rng_;
  MetricsTable table_;
  PilotContext ctx_;
  double rho_sucre_ = 1.0;
  std::vector<UeEpisode> active_;
  std::vector<std::vector<std::size_t>> members_;
};

} // namespace

MetricsTable run(const SimParams& params, const BlockObserver& observer) {
  params.validate();
  Simulation sim(params);
  return sim.run(observer);
}

std::vector<MetricsTable> run_all(std::span<const SimParams> points, unsigned workers) {
  std::vector<MetricsTable> results(points.size());
  std::vector<std::exception_ptr> errors(points.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        results[i] = run(points[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(points.size())));
  if (n == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(work);
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw std::runtime_error(k0_label(points[i].k0) + " (point " + std::to_string(i) +
                               "): " + e.what());
    }
  }
  return results;
}

std::vector<MetricsTable> sweep(const SimParams& base, const SweepAxis& axis, unsigned workers) {
  std::vector<SimParams> points;
  if (axis.kind == SweepAxis::Kind::K0) {
    if (axis.k0_values.empty()) throw std::invalid_argument("sweep: empty K0 axis");
    for (std::size_t i = 0; i < axis.k0_values.size(); ++i) {
      SimParams p = base;
      p.k0 = axis.k0_values[i];
      p.seed = base.seed + i;
      points.push_back(p);
    }
  } else {
    points.push_back(base);
  }
  return run_all(points, workers);
}

double idealized_resolution_frequency(int n, std::int64_t trials, Rng& rng) {
  if (n < 1) throw std::domain_error("idealized_resolution_frequency: n must be >= 1");
  if (trials < 1) throw std::invalid_argument("idealized_resolution_frequency: trials must be >= 1");
  const double zeta = 1.0 / n;
  std::int64_t single = 0;
  for (std::int64_t t = 0; t < trials; ++t) {
    int repeaters = 0;
    for (int k = 0; k < n; ++k) repeaters += rng.uniform() < zeta ? 1 : 0;
    single += repeaters == 1 ? 1 : 0;
  }
  return static_cast<double>(single) / trials;
}

} // namespace mmra
