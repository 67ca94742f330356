#pragma once

// Physical layer of RA steps 1-2, simulated directly in the pilot-correlated
// domain (orthonormal pilots make the correlated forms statistically exact).

#include "mmra/geometry.hpp"
#include "mmra/power_policy.hpp"
#include "mmra/rng.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace mmra {

/// One UE transmitting on the pilot under observation.
struct PilotTransmission {
  std::span<const cplx> channel; // h towards the home BS, length M
  double power = 0.0;            // rho
  double beta = 0.0;             // true large-scale gain of `channel`
};

struct PilotObservation {
  int pilot = 0;
  int tau_p = 1;
  CVector y;       // correlated uplink vector
  CVector noise;   // the noise term inside y
  double alpha = 0.0; // exact sum of rho*beta*tau_p over contenders + omega
  double omega = 0.0; // exact interference part of alpha
  std::size_t n_contenders = 0;

  double norm() const;
};

/// y = sum sqrt(rho tau_p) h (contenders and interferers) + CN(0, sigma2 I).
/// Throws std::invalid_argument when channel lengths disagree.
PilotObservation uplink_observation(std::span<const PilotTransmission> contenders,
                                    std::span<const PilotTransmission> interferers, int tau_p,
                                    double sigma2, std::size_t antennas, Rng& rng,
                                    int pilot = 0);

/// Scalar a contender sees after correlating the precoded downlink with its
/// pilot: sqrt(q tau_p) h^T y* / ||y|| + nu + eta.
/// nu ~ CN(0, dl_interference_var) stands in for the neighbours' precoded
/// downlink, eta ~ CN(0, sigma2). Throws std::domain_error if ||y|| == 0.
cplx downlink_observation(const PilotObservation& obs, std::span<const cplx> ue_channel, double q,
                          double sigma2, double dl_interference_var, Rng& rng);

/// Variance of nu for a UE with the given gains towards the adjacent BSs.
double dl_interference_variance(double q, int tau_p, std::span<const double> beta_adjacent);

/// What one UE knows when it takes its step-3 decision.
struct DecisionInput {
  cplx z;
  double rho = 0.0;
  double beta = 0.0; // the UE's belief about its gain
  int tau_p = 1;
  double q = 0.0;
  double sigma2 = 1.0;
  double omega_bar = 0.0;
  double rho_bar = 1.0;
  double epsilon = 0.0;

  double own_gain() const { return rho * beta * tau_p; }
};

struct AlphaEstimate {
  double value = 0.0;
  double gamma_ratio = 0.0;
  double floor = 0.0;
  bool degenerate = false; // Re(z) numerically zero; value is the floor
};

/// [Gamma(M + 1/2) / Gamma(M)]^2, evaluated in log space.
double gamma_ratio_sq(int antennas);

/// Re(z)^2 below this is treated as zero.
inline constexpr double kRealPartFloor = 1e-30;

AlphaEstimate estimate_alpha(const DecisionInput& in, int antennas);

/// (alpha_hat - omega_bar) / (rho_bar tau_p), clamped below at 1.
double estimate_contenders(const AlphaEstimate& alpha_hat, double omega_bar, double rho_bar,
                           int tau_p);

/// Interference power on one pilot for one draw of the neighbour population:
/// one UE per adjacent cell, sum of rho * beta_home * tau_p.
double sample_pilot_interference(const CellLayout& layout, int tau_p, const PowerPolicy& policy,
                                 const PathLoss& pl, Rng& rng,
                                 ShadowingModel shadowing = ShadowingModel::PerUe);

/// Monte Carlo mean of sample_pilot_interference.
double estimate_omega_bar(const CellLayout& layout, int tau_p, const PowerPolicy& policy,
                          const PathLoss& pl, int n_samples, Rng& rng,
                          ShadowingModel shadowing = ShadowingModel::PerUe);

} // namespace mmra
