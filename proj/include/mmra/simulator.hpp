#pragma once

// Multi-block random-access dynamics and metric accumulation.

#include "mmra/geometry.hpp"
#include "mmra/power_policy.hpp"
#include "mmra/protocols.hpp"
#include "mmra/rng.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace mmra {

struct SimParams {
  int antennas = 100;
  int tau_p = 10;
  std::int64_t k0 = 15000;
  double p_active = 0.001;
  int max_attempts = 10;
  int backoff_window = 10;
  std::int64_t n_blocks = 10000;
  std::int64_t warmup_blocks = 2000;
  /// When > 0, n_blocks / warmup_blocks are derived so that about this many
  /// episodes start after warmup (warmup = 20% of the run).
  std::int64_t target_episodes = 0;
  Protocol protocol = Protocol::Acbpc;
  bool interference = true;
  /// Whether a UE's shadowing is shared by all its links (own and neighbouring
  /// BSs) or drawn independently per link.
  ShadowingModel link_shadowing = ShadowingModel::PerUe;
  /// Gaussian surrogate for the neighbours' precoded downlink in step 2.
  bool dl_interference = true;
  double sigma_beta = 0.0;
  double sigma2 = 1.0;
  std::optional<double> q;        // downlink power; default rho_sucre
  std::optional<double> rho_bar;  // default sigma2
  std::optional<double> rho_max;  // default rho_sucre
  std::optional<double> epsilon;  // SUCRe bias; default -omega_bar / 2
  double d_max = 250.0;
  double d_min = 25.0;
  PathLoss pathloss;
  int omega_bar_samples = 20000;
  double rho_sucre_watts = 0.1; // physical value of rho_sucre, for energy output
  std::uint64_t seed = 1;

  void validate() const;
  CellLayout layout() const;
  double rho_sucre() const;
  double downlink_power() const { return q.value_or(rho_sucre()); }
  double target_rx_power() const { return rho_bar.value_or(sigma2); }
  double max_power() const { return rho_max.value_or(rho_sucre()); }
  PowerPolicy policy() const;
  /// (n_blocks, warmup_blocks) actually simulated.
  std::pair<std::int64_t, std::int64_t> block_budget() const;
};

enum class UeState { Idle, Contending, BackingOff, Succeeded, Failed };

struct UeEpisode {
  UePosition position;
  LargeScaleGain gain;
  double power = 0.0;               // pilot power (normalised units)
  double dl_interference_var = 0.0; // variance of the neighbours' downlink term
  int attempts = 0;
  int backoff = 0;                  // blocks left before re-contending
  double energy = 0.0;              // sum of power * tau_p over attempts
  UeState state = UeState::Idle;
};

/// Charges one pilot transmission: energy += power * tau_p, attempts += 1.
void energy_account(UeEpisode& episode, double power, int tau_p);

struct ResolutionCount {
  std::int64_t resolved = 0;
  std::int64_t total = 0;
  double ratio() const { return total ? static_cast<double>(resolved) / total : 0.0; }
};

struct DistanceBin {
  double lo = 0.0;
  double hi = 0.0;
  std::int64_t episodes = 0;
  std::int64_t failures = 0;
  std::int64_t attempts = 0;      // sum of per-episode attempts (failures count max_attempts)
  std::int64_t transmissions = 0; // pilot transmissions by UEs in this bin
  std::int64_t wins = 0;          // transmissions that resolved in the UE's favour
  double power_sum = 0.0;         // per transmission, normalised by rho_sucre
  double energy_sum = 0.0;        // per episode, watts * channel uses

  double avg_attempts() const { return episodes ? static_cast<double>(attempts) / episodes : 0.0; }
  double fail_prob() const { return episodes ? static_cast<double>(failures) / episodes : 0.0; }
  double p_res() const { return transmissions ? static_cast<double>(wins) / transmissions : 0.0; }
  double avg_power_norm() const { return transmissions ? power_sum / transmissions : 0.0; }
  double avg_energy() const { return episodes ? energy_sum / episodes : 0.0; }
};

/// Counts and sums only, so tables from disjoint RNG streams can be merged.
struct MetricsTable {
  Protocol protocol = Protocol::Acbpc;
  bool interference = true;
  std::int64_t k0 = 0;
  double sigma_beta = 0.0;
  int max_attempts = 10;
  double omega_bar = 0.0;

  std::int64_t episodes = 0;
  std::int64_t successes = 0;
  std::int64_t failures = 0;
  std::int64_t attempts_all = 0;
  std::int64_t attempts_success = 0;
  std::vector<std::int64_t> attempts_hist; // [a] = successes needing a attempts
  std::vector<ResolutionCount> by_contenders; // [n] = pilots with |S_t| = n
  std::vector<DistanceBin> by_distance;

  std::int64_t measured_blocks = 0;
  std::int64_t pilot_slots = 0;
  std::int64_t busy_pilots = 0;
  std::int64_t resolved_pilots = 0;
  std::int64_t transmissions = 0;

  double avg_attempts_all() const;
  double avg_attempts_success() const;
  double fail_prob() const;
  /// Mean |S_t| over all pilot slots (idle pilots included).
  double avg_contenders() const;

  void merge(const MetricsTable& other);
};

MetricsTable make_metrics_table(const SimParams& p);

/// Shared, per-run inputs of the step 1-3 pipeline.
struct PilotContext {
  Protocol protocol = Protocol::Acbpc;
  int antennas = 100;
  int tau_p = 10;
  double q = 1.0;
  double sigma2 = 1.0;
  double rho_bar = 1.0;
  double omega_bar = 0.0;
  double epsilon = 0.0;
};

PilotContext make_pilot_context(const SimParams& p, double omega_bar);

struct Contender {
  double beta = 0.0;        // true gain
  double beta_known = 0.0;  // gain the UE uses in its decision
  double power = 0.0;
  double dl_interference_var = 0.0;
};

struct PilotInterferer {
  double beta_home = 0.0;
  double power = 0.0;
};

struct PilotOutcome {
  std::vector<Decision> decisions; // one per contender
  bool resolved = false;
  std::optional<std::size_t> winner;
  double alpha = 0.0;
  double omega = 0.0;
};

/// Runs steps 1-3 on one pilot; resolved iff exactly one contender repeats.
PilotOutcome resolve_pilot(std::span<const Contender> contenders,
                           std::span<const PilotInterferer> interferers, const PilotContext& ctx,
                           Rng& rng);

struct BlockSnapshot {
  std::int64_t block = 0;
  std::int64_t idle = 0;
  std::int64_t contending = 0;
  std::int64_t backing_off = 0;
  std::int64_t busy_pilots = 0;
  std::int64_t resolved_pilots = 0;
  std::int64_t succeeded = 0;
  std::int64_t failed = 0;
  int max_attempts_seen = 0;
};

using BlockObserver = std::function<void(const BlockSnapshot&)>;

MetricsTable run(const SimParams& params, const BlockObserver& observer = {});

struct SweepAxis {
  enum class Kind { K0, ContenderConditioning, DistanceBins };
  Kind kind = Kind::K0;
  std::vector<std::int64_t> k0_values;
};

/// Independent runs, one per axis point, with seed base.seed + index.
/// Conditioning axes need a single run: the table carries the bins.
std::vector<MetricsTable> sweep(const SimParams& base, const SweepAxis& axis, unsigned workers = 1);

/// Runs every point, up to `workers` at a time; results keep input order.
std::vector<MetricsTable> run_all(std::span<const SimParams> points, unsigned workers = 1);

/// Empirical check of the analytic bound: n UEs each repeat with probability
/// exactly 1/n; returns the fraction of trials with a single repeater.
double idealized_resolution_frequency(int n, std::int64_t trials, Rng& rng);

} // namespace mmra
