#include "mmra/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mmra {

double sucre_bias(double omega_bar, std::optional<double> override_value) {
  if (override_value) return *override_value;
  return -0.5 * omega_bar;
}

Decision sucre_decide(const DecisionInput& in, const AlphaEstimate& alpha_hat) {
  Decision d;
  d.alpha_hat = alpha_hat.value;
  d.margin = in.own_gain() - (0.5 * alpha_hat.value + in.epsilon);
  d.action = d.margin > 0.0 ? Decision::Action::Repeat : Decision::Action::Inactive;
  return d;
}

Decision acbpc_decide(const DecisionInput& in, const AlphaEstimate& alpha_hat, Rng& rng) {
  Decision d;
  d.alpha_hat = alpha_hat.value;
  d.contenders_estimate = estimate_contenders(alpha_hat, in.omega_bar, in.rho_bar, in.tau_p);
  const double zeta = std::min(1.0 / d.contenders_estimate, 1.0);
  d.action = rng.uniform() < zeta ? Decision::Action::Repeat : Decision::Action::Inactive;
  return d;
}

Decision baseline_decide() {
  Decision d;
  d.action = Decision::Action::Repeat;
  return d;
}

double p_res_bound(long long n_contenders) {
  if (n_contenders < 1) throw std::domain_error("p_res_bound: need at least one contender");
  if (n_contenders == 1) return 1.0;
  const double n = static_cast<double>(n_contenders);
  // log1p keeps precision for large n, where 1 - 1/n rounds badly.
  return std::exp((n - 1.0) * std::log1p(-1.0 / n));
}

} // namespace mmra
