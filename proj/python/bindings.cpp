#include "mmra/config.hpp"
#include "mmra/power_policy.hpp"
#include "mmra/protocols.hpp"
#include "mmra/results_io.hpp"
#include "mmra/signal_model.hpp"
#include "mmra/simulator.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

namespace py = pybind11;
using namespace mmra;

namespace {

SimParams params_from(const py::dict& settings) {
  std::vector<std::string> overrides;
  for (const auto& [k, v] : settings) {
    std::string value;
    if (py::isinstance<py::bool_>(v)) {
      value = v.cast<bool>() ? "on" : "off";
    } else if (v.is_none()) {
      value = "auto";
    } else {
      value = py::str(v).cast<std::string>();
    }
    overrides.push_back(py::str(k).cast<std::string>() + "=" + value);
  }
  return load_config(std::nullopt, overrides);
}

py::dict table_to_dict(const MetricsTable& t) {
  py::dict d;
  d["protocol"] = std::string(to_string(t.protocol));
  d["interference"] = t.interference;
  d["K0"] = t.k0;
  d["sigma_beta"] = t.sigma_beta;
  d["omega_bar"] = t.omega_bar;
  d["episodes"] = t.episodes;
  d["successes"] = t.successes;
  d["failures"] = t.failures;
  d["avg_attempts_all"] = t.avg_attempts_all();
  d["avg_attempts_success"] = t.avg_attempts_success();
  d["fail_prob"] = t.fail_prob();
  d["avg_contenders"] = t.avg_contenders();
  d["attempts_hist"] = t.attempts_hist;

  py::list res;
  for (std::size_t n = 1; n < t.by_contenders.size(); ++n) {
    const auto& c = t.by_contenders[n];
    if (c.total == 0) continue;
    py::dict row;
    row["st"] = n;
    row["p_res"] = c.ratio();
    row["n_samples"] = c.total;
    row["bound"] = p_res_bound(static_cast<long long>(n));
    res.append(row);
  }
  d["resolution"] = res;

  py::list bins;
  for (const auto& b : t.by_distance) {
    py::dict row;
    row["bin_lo_m"] = b.lo;
    row["bin_hi_m"] = b.hi;
    row["episodes"] = b.episodes;
    row["avg_attempts"] = b.avg_attempts();
    row["fail_prob"] = b.fail_prob();
    row["p_res"] = b.p_res();
    row["avg_power_norm"] = b.avg_power_norm();
    row["avg_energy_bw"] = b.avg_energy();
    bins.append(row);
  }
  d["distance"] = bins;
  return d;
}

} // namespace

PYBIND11_MODULE(_mmra, m) {
  m.doc() = "Massive-MIMO random-access simulator (SUCRe, ACBPC, baseline)";

  m.def("version", &version_string);

  m.def("p_res_bound", &p_res_bound, py::arg("n"),
        "Resolution-probability bound (1 - 1/n)^(n - 1) for n contenders.");
  m.def("gamma_ratio_sq", &gamma_ratio_sq, py::arg("antennas"),
        "[Gamma(M + 1/2) / Gamma(M)]^2.");
  m.def("sucre_power", [](double sigma2, double d_max) {
          return sucre_power(sigma2, PathLoss{}, d_max);
        },
        py::arg("sigma2") = 1.0, py::arg("d_max") = 250.0,
        "Fixed SUCRe pilot power for the default path loss.");
  m.def("path_gain", [](double d, double chi) { return PathLoss{}.gain(d, chi); },
        py::arg("distance_m"), py::arg("chi") = 1.0);
  m.def("tx_power",
        [](const std::string& protocol, double beta, double rho_bar, double rho_max) {
          const double rs = sucre_power(1.0, PathLoss{}, 250.0);
          return tx_power(policy_for(parse_protocol(protocol), rs, rho_bar, rho_max), beta);
        },
        py::arg("protocol"), py::arg("beta"), py::arg("rho_bar") = 1.0,
        py::arg("rho_max") = sucre_power(1.0, PathLoss{}, 250.0),
        "Pilot power under the protocol's policy (SUCRe power fixed at the default).");
  m.def("estimate_contenders",
        [](double alpha_hat, double omega_bar, double rho_bar, int tau_p) {
          AlphaEstimate a;
          a.value = alpha_hat;
          return estimate_contenders(a, omega_bar, rho_bar, tau_p);
        },
        py::arg("alpha_hat"), py::arg("omega_bar"), py::arg("rho_bar"), py::arg("tau_p"));

  m.def("config_keys", &config_keys);
  m.def("preset_names", &preset_names);
  m.def("default_config", [] { return to_config_text(SimParams{}); },
        "Echo of the default configuration.");
  m.def("config_text", [](const py::dict& settings) { return to_config_text(params_from(settings)); },
        py::arg("settings"), "Validated effective configuration for the given overrides.");

  m.def("run",
        [](const py::dict& settings) {
          const SimParams p = params_from(settings);
          MetricsTable t;
          {
            py::gil_scoped_release release;
            t = run(p);
          }
          return table_to_dict(t);
        },
        py::arg("settings") = py::dict(),
        "Run one configuration (keys as in the config file) and return its metrics.");

  m.def("bound_table",
        [](int n_max, std::int64_t trials, std::uint64_t seed) {
          py::list out;
          for (const auto& r : bound_table(n_max, trials, seed)) {
            py::dict row;
            row["n"] = r.n;
            row["bound"] = r.bound;
            row["simulated"] = r.simulated;
            row["n_trials"] = r.trials;
            out.append(row);
          }
          return out;
        },
        py::arg("n_max") = 50, py::arg("trials") = 100000, py::arg("seed") = 1);
}
