#include "mmra/power_policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mmra {

std::string_view to_string(Protocol p) {
  switch (p) {
  case Protocol::Sucre:
    return "sucre";
  case Protocol::Acbpc:
    return "acbpc";
  case Protocol::Baseline:
    return "baseline";
  }
  return "?";
}

Protocol parse_protocol(std::string_view name) {
  if (name == "sucre") return Protocol::Sucre;
  if (name == "acbpc") return Protocol::Acbpc;
  if (name == "baseline") return Protocol::Baseline;
  throw std::invalid_argument("unknown protocol '" + std::string(name) +
                              "' (expected sucre, acbpc or baseline)");
}

double PathLoss::gain(double distance_m, double chi) const {
  if (!(distance_m > 0.0)) throw std::domain_error("path loss: distance must be positive");
  return d_ref * std::pow(distance_m, -kappa) * chi;
}

double sucre_power(double sigma2, const PathLoss& pl, double d_max) {
  return sigma2 / pl.gain(d_max);
}

void PowerPolicy::validate() const {
  if (!(rho_sucre > 0.0)) throw std::invalid_argument("power policy: rho_sucre must be > 0");
  if (!(rho_bar > 0.0)) throw std::invalid_argument("power policy: rho_bar must be > 0");
  if (!(rho_max > 0.0)) throw std::invalid_argument("power policy: rho_max must be > 0");
}

PowerPolicy policy_for(Protocol p, double rho_sucre, double rho_bar, double rho_max) {
  PowerPolicy pol;
  switch (p) {
  case Protocol::Sucre:
    pol.kind = PowerPolicy::Kind::SucreFixed;
    break;
  case Protocol::Acbpc:
    pol.kind = PowerPolicy::Kind::AcbpcControlled;
    break;
  case Protocol::Baseline:
    pol.kind = PowerPolicy::Kind::BaselineFixed;
    break;
  }
  pol.rho_sucre = rho_sucre;
  pol.rho_bar = rho_bar;
  pol.rho_max = rho_max;
  pol.validate();
  return pol;
}

double tx_power(const PowerPolicy& policy, double beta_known) {
  if (!(beta_known > 0.0)) throw std::domain_error("tx_power: beta must be positive");
  switch (policy.kind) {
  case PowerPolicy::Kind::SucreFixed:
  case PowerPolicy::Kind::BaselineFixed:
    return policy.rho_sucre;
  case PowerPolicy::Kind::AcbpcControlled:
    return std::min(policy.rho_bar / beta_known, policy.rho_max);
  }
  return policy.rho_sucre;
}

} // namespace mmra
