#include "mmra/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mmra {

double PilotObservation::norm() const {
  double s = 0.0;
  for (const cplx& v : y) s += std::norm(v);
  return std::sqrt(s);
}

namespace {

void accumulate(CVector& y, const PilotTransmission& tx, int tau_p) {
  if (tx.channel.size() != y.size())
    throw std::invalid_argument("uplink_observation: channel length does not match M");
  const double a = std::sqrt(tx.power * tau_p);
  for (std::size_t m = 0; m < y.size(); ++m) y[m] += a * tx.channel[m];
}

} // namespace

PilotObservation uplink_observation(std::span<const PilotTransmission> contenders,
                                    std::span<const PilotTransmission> interferers, int tau_p,
                                    double sigma2, std::size_t antennas, Rng& rng, int pilot) {
  PilotObservation obs;
  obs.pilot = pilot;
  obs.tau_p = tau_p;
  obs.n_contenders = contenders.size();
  obs.noise.resize(antennas);
  rng.fill_complex_normal(obs.noise, sigma2);
  obs.y = obs.noise;
  double gains = 0.0;
  for (const auto& tx : contenders) {
    accumulate(obs.y, tx, tau_p);
    gains += tx.power * tx.beta * tau_p;
  }
  for (const auto& tx : interferers) {
    accumulate(obs.y, tx, tau_p);
    obs.omega += tx.power * tx.beta * tau_p;
  }
  obs.alpha = gains + obs.omega;
  return obs;
}

cplx downlink_observation(const PilotObservation& obs, std::span<const cplx> ue_channel, double q,
                          double sigma2, double dl_interference_var, Rng& rng) {
  if (ue_channel.size() != obs.y.size())
    throw std::invalid_argument("downlink_observation: channel length does not match M");
  const double ny = obs.norm();
  if (!(ny > 0.0)) throw std::domain_error("downlink_observation: ||y|| is zero");
  cplx inner{0.0, 0.0};
  for (std::size_t m = 0; m < ue_channel.size(); ++m) inner += ue_channel[m] * std::conj(obs.y[m]);
  cplx z = std::sqrt(q * obs.tau_p) * inner / ny;
  if (dl_interference_var > 0.0) z += rng.complex_normal(dl_interference_var);
  if (sigma2 > 0.0) z += rng.complex_normal(sigma2);
  return z;
}

double dl_interference_variance(double q, int tau_p, std::span<const double> beta_adjacent) {
  double s = 0.0;
  for (double b : beta_adjacent) s += b;
  return q * tau_p * s;
}

double gamma_ratio_sq(int antennas) {
  if (antennas < 1) throw std::domain_error("gamma_ratio_sq: M must be >= 1");
  const double m = antennas;
  return std::exp(2.0 * (std::lgamma(m + 0.5) - std::lgamma(m)));
}

AlphaEstimate estimate_alpha(const DecisionInput& in, int antennas) {
  AlphaEstimate est;
  est.gamma_ratio = gamma_ratio_sq(antennas);
  est.floor = in.own_gain();
  const double re2 = in.z.real() * in.z.real();
  if (re2 < kRealPartFloor) {
    est.value = est.floor;
    est.degenerate = true;
    return est;
  }
  const double raw = est.gamma_ratio * in.q * in.rho * in.beta * in.beta * in.tau_p * in.tau_p / re2 -
                     in.sigma2;
  est.value = std::max(raw, est.floor);
  return est;
}

double estimate_contenders(const AlphaEstimate& alpha_hat, double omega_bar, double rho_bar,
                           int tau_p) {
  return std::max((alpha_hat.value - omega_bar) / (rho_bar * tau_p), 1.0);
}

double sample_pilot_interference(const CellLayout& layout, int tau_p, const PowerPolicy& policy,
                                 const PathLoss& pl, Rng& rng, ShadowingModel shadowing) {
  // One UE per neighbour cell shares any given pilot.
  const auto ring = spawn_interferers(layout, 1, policy, pl, rng, shadowing);
  double omega = 0.0;
  for (const auto& it : ring) omega += it.power * it.beta_home * tau_p;
  return omega;
}

double estimate_omega_bar(const CellLayout& layout, int tau_p, const PowerPolicy& policy,
                          const PathLoss& pl, int n_samples, Rng& rng, ShadowingModel shadowing) {
  if (n_samples < 1) throw std::invalid_argument("estimate_omega_bar: n_samples must be >= 1");
  double sum = 0.0;
  for (int i = 0; i < n_samples; ++i)
    sum += sample_pilot_interference(layout, tau_p, policy, pl, rng, shadowing);
  return sum / n_samples;
}

} // namespace mmra
