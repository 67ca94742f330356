#pragma once

// Step-3 decision rules and the analytical resolution bound.

#include "mmra/power_policy.hpp"
#include "mmra/rng.hpp"
#include "mmra/signal_model.hpp"

#include <optional>

namespace mmra {

struct Decision {
  enum class Action { Repeat, Inactive };

  Action action = Action::Inactive;
  double alpha_hat = 0.0;
  double contenders_estimate = 0.0; // ACBPC only
  double margin = 0.0;              // SUCRe: own gain - (alpha_hat / 2 + epsilon)

  bool repeats() const { return action == Action::Repeat; }
};

/// SUCRe bias. Defaults to -omega_bar / 2, which re-centres the comparison
/// against half the estimated total; `override_value` is returned verbatim.
double sucre_bias(double omega_bar, std::optional<double> override_value = std::nullopt);

/// Repeat iff rho * beta * tau_p > alpha_hat / 2 + epsilon.
Decision sucre_decide(const DecisionInput& in, const AlphaEstimate& alpha_hat);

/// Repeat with probability min(1 / S_hat, 1), S_hat from estimate_contenders.
Decision acbpc_decide(const DecisionInput& in, const AlphaEstimate& alpha_hat, Rng& rng);

/// Always repeat: collisions are only resolved by later retransmission.
Decision baseline_decide();

/// (1 - 1/n)^(n - 1); 1 for n == 1. Throws std::domain_error for n == 0.
double p_res_bound(long long n_contenders);

} // namespace mmra
