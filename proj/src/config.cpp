#include "mmra/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mmra {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view what) {
  throw std::invalid_argument(std::string(key) + ": invalid value '" + std::string(value) +
                              "' (" + std::string(what) + ")");
}

double to_double(std::string_view key, std::string_view v) {
  // std::from_chars<double> is missing from some of the toolchains we build on.
  const std::string s(v);
  char* end = nullptr;
  const double d = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) bad_value(key, v, "expected a number");
  return d;
}

template <typename Int>
Int to_int(std::string_view key, std::string_view v) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, v, "expected an integer");
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
  if (v == "off" || v == "false" || v == "0" || v == "no") return false;
  bad_value(key, v, "expected on/off");
}

std::optional<double> to_optional(std::string_view key, std::string_view v) {
  if (v == "auto") return std::nullopt;
  return to_double(key, v);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : "auto"; }

} // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "protocol",       "interference",      "link_shadowing", "dl_interference",
      "K0",             "P_a",               "tau_p",                "M",
      "max_attempts",   "backoff_window",    "n_blocks",             "warmup_blocks",
      "episodes",       "sigma_beta",        "sigma2",               "q",
      "rho_bar",        "rho_max",           "epsilon",              "d_max",
      "d_min",          "d_ref",             "kappa",                "shadow_db",
      "omega_bar_samples", "rho_sucre_watts", "seed"};
  return keys;
}

void apply_setting(SimParams& p, std::string_view key, std::string_view raw) {
  const std::string_view v = trim(raw);
  if (key == "protocol") {
    try {
      p.protocol = parse_protocol(v);
    } catch (const std::invalid_argument&) {
      bad_value(key, v, "expected sucre, acbpc or baseline");
    }
  } else if (key == "interference") {
    p.interference = to_bool(key, v);
  } else if (key == "link_shadowing") {
    if (v == "per_ue") {
      p.link_shadowing = ShadowingModel::PerUe;
    } else if (v == "per_link") {
      p.link_shadowing = ShadowingModel::PerLink;
    } else {
      bad_value(key, v, "expected per_ue or per_link");
    }
  } else if (key == "dl_interference") {
    p.dl_interference = to_bool(key, v);
  } else if (key == "K0") {
    p.k0 = to_int<std::int64_t>(key, v);
  } else if (key == "P_a") {
    p.p_active = to_double(key, v);
  } else if (key == "tau_p") {
    p.tau_p = to_int<int>(key, v);
  } else if (key == "M") {
    p.antennas = to_int<int>(key, v);
  } else if (key == "max_attempts") {
    p.max_attempts = to_int<int>(key, v);
  } else if (key == "backoff_window") {
    p.backoff_window = to_int<int>(key, v);
  } else if (key == "n_blocks") {
    p.n_blocks = to_int<std::int64_t>(key, v);
  } else if (key == "warmup_blocks") {
    p.warmup_blocks = to_int<std::int64_t>(key, v);
  } else if (key == "episodes") {
    p.target_episodes = to_int<std::int64_t>(key, v);
  } else if (key == "sigma_beta") {
    p.sigma_beta = to_double(key, v);
  } else if (key == "sigma2") {
    p.sigma2 = to_double(key, v);
  } else if (key == "q") {
    p.q = to_optional(key, v);
  } else if (key == "rho_bar") {
    p.rho_bar = to_optional(key, v);
  } else if (key == "rho_max") {
    p.rho_max = to_optional(key, v);
  } else if (key == "epsilon") {
    p.epsilon = to_optional(key, v);
  } else if (key == "d_max") {
    p.d_max = to_double(key, v);
  } else if (key == "d_min") {
    p.d_min = to_double(key, v);
  } else if (key == "d_ref") {
    p.pathloss.d_ref = to_double(key, v);
  } else if (key == "kappa") {
    p.pathloss.kappa = to_double(key, v);
  } else if (key == "shadow_db") {
    p.pathloss.shadow_db = to_double(key, v);
  } else if (key == "omega_bar_samples") {
    p.omega_bar_samples = to_int<int>(key, v);
  } else if (key == "rho_sucre_watts") {
    p.rho_sucre_watts = to_double(key, v);
  } else if (key == "seed") {
    p.seed = to_int<std::uint64_t>(key, v);
  } else {
    throw std::invalid_argument("unknown config key '" + std::string(key) + "'");
  }
}

SimParams parse_config_text(std::string_view text, SimParams base) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key=value, got '" + std::string(line) + "'");
    apply_setting(base, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

SimParams load_config(const std::optional<std::filesystem::path>& path,
                      std::span<const std::string> overrides, SimParams base) {
  if (path) {
    std::ifstream in(*path);
    if (!in) throw std::runtime_error("cannot read config file " + path->string());
    std::stringstream ss;
    ss << in.rdbuf();
    base = parse_config_text(ss.str(), base);
  }
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("override '" + o + "': expected key=value");
    apply_setting(base, trim(std::string_view(o).substr(0, eq)), std::string_view(o).substr(eq + 1));
  }
  base.validate();
  return base;
}

std::string to_config_text(const SimParams& p) {
  std::ostringstream os;
  os << "protocol = " << to_string(p.protocol) << '\n'
     << "interference = " << (p.interference ? "on" : "off") << '\n'
     << "link_shadowing = "
     << (p.link_shadowing == ShadowingModel::PerUe ? "per_ue" : "per_link") << '\n'
     << "dl_interference = " << (p.dl_interference ? "on" : "off") << '\n'
     << "K0 = " << p.k0 << '\n'
     << "P_a = " << fmt(p.p_active) << '\n'
     << "tau_p = " << p.tau_p << '\n'
     << "M = " << p.antennas << '\n'
     << "max_attempts = " << p.max_attempts << '\n'
     << "backoff_window = " << p.backoff_window << '\n'
     << "n_blocks = " << p.n_blocks << '\n'
     << "warmup_blocks = " << p.warmup_blocks << '\n'
     << "episodes = " << p.target_episodes << '\n'
     << "sigma_beta = " << fmt(p.sigma_beta) << '\n'
     << "sigma2 = " << fmt(p.sigma2) << '\n'
     << "q = " << fmt(p.q) << '\n'
     << "rho_bar = " << fmt(p.rho_bar) << '\n'
     << "rho_max = " << fmt(p.rho_max) << '\n'
     << "epsilon = " << fmt(p.epsilon) << '\n'
     << "d_max = " << fmt(p.d_max) << '\n'
     << "d_min = " << fmt(p.d_min) << '\n'
     << "d_ref = " << fmt(p.pathloss.d_ref) << '\n'
     << "kappa = " << fmt(p.pathloss.kappa) << '\n'
     << "shadow_db = " << fmt(p.pathloss.shadow_db) << '\n'
     << "omega_bar_samples = " << p.omega_bar_samples << '\n'
     << "rho_sucre_watts = " << fmt(p.rho_sucre_watts) << '\n'
     << "seed = " << p.seed << '\n';
  return os.str();
}

bool same_params(const SimParams& a, const SimParams& b) {
  return to_config_text(a) == to_config_text(b);
}

std::vector<SimParams> ExperimentPreset::expand() const {
  std::vector<SimParams> out;
  for (const auto& s : series) {
    for (std::int64_t k0 : k0_axis) {
      SimParams p = base;
      p.protocol = s.protocol;
      p.interference = s.interference;
      p.sigma_beta = s.sigma_beta;
      p.k0 = k0;
      p.seed = base.seed + out.size();
      out.push_back(p);
    }
  }
  return out;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {
      "fig1-attempts",        "fig1-failures",     "fig2a-res-vs-st", "fig2b-res-vs-dist",
      "fig3-dist-performance", "fig4-power-energy", "bound-table"};
  return names;
}

ExperimentPreset make_preset(std::string_view name) {
  ExperimentPreset ps;
  ps.name = std::string(name);
  ps.base.target_episodes = 200000;
  const PresetSeries sucre_i{Protocol::Sucre, true, 0.0};
  const PresetSeries acbpc_i{Protocol::Acbpc, true, 0.0};
  const PresetSeries sucre_n{Protocol::Sucre, false, 0.0};
  const PresetSeries acbpc_n{Protocol::Acbpc, false, 0.0};

  if (name == "fig1-attempts" || name == "fig1-failures") {
    for (std::int64_t k = 1000; k <= 28000; k += 1000) ps.k0_axis.push_back(k);
    ps.series = {sucre_i, acbpc_i, sucre_n, acbpc_n};
  } else if (name == "fig2a-res-vs-st") {
    ps.k0_axis = {15000};
    ps.series = {sucre_i, acbpc_i, sucre_n, acbpc_n};
  } else if (name == "fig2b-res-vs-dist") {
    ps.k0_axis = {15000};
    ps.series = {sucre_i, acbpc_i};
  } else if (name == "fig3-dist-performance" || name == "fig4-power-energy") {
    ps.k0_axis = {15000};
    ps.series = {sucre_i, acbpc_i, {Protocol::Sucre, true, 0.2}, {Protocol::Acbpc, true, 0.2}};
  } else if (name == "bound-table") {
    ps.bound_table = true;
  } else {
    throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
  }
  return ps;
}

} // namespace mmra
