#pragma once

#include <string>
#include <string_view>

namespace mmra {

enum class Protocol { Sucre, Acbpc, Baseline };

std::string_view to_string(Protocol p);
Protocol parse_protocol(std::string_view name);

/// Distance-dependent path loss: beta = d_ref * d^-kappa * chi.
struct PathLoss {
  double d_ref = 2.951209226666387e-4; // 10^-3.53
  double kappa = 3.8;
  double shadow_db = 8.0;

  double gain(double distance_m, double chi = 1.0) const;
};

/// Fixed SUCRe pilot power: an unshadowed cell-edge UE is received at the
/// noise level, sigma2 / (d_ref * d_max^-kappa).
double sucre_power(double sigma2, const PathLoss& pl, double d_max);

struct PowerPolicy {
  enum class Kind { SucreFixed, AcbpcControlled, BaselineFixed };

  Kind kind = Kind::SucreFixed;
  double rho_sucre = 1.0;
  double rho_bar = 1.0; // target received power (ACBPC)
  double rho_max = 1.0; // transmit cap (ACBPC)

  void validate() const;
};

PowerPolicy policy_for(Protocol p, double rho_sucre, double rho_bar, double rho_max);

/// Pilot transmit power given the gain the UE believes it has.
/// Throws std::domain_error for non-positive beta.
double tx_power(const PowerPolicy& policy, double beta_known);

} // namespace mmra
