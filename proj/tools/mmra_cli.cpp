// mmra: command-line driver for the random-access simulator.
//
//   mmra run    [--config FILE] [--set key=value]... [--out DIR] [--seed N]
//   mmra sweep  --k0 1000,2000,... [common flags] [--workers N]
//   mmra preset <name> [common flags] [--k0 ...] [--workers N]
//   mmra bound  [--n-max N] [--trials N] [--out DIR] [--seed N]
//
// Every command echoes the effective configuration before running and
// writes its CSVs plus manifest.json into a fresh run-* directory.

#include "mmra/config.hpp"
#include "mmra/results_io.hpp"
#include "mmra/simulator.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

struct CommonOptions {
  std::string config;
  std::vector<std::string> sets;
  std::string out = "results";
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "key=value configuration file");
  cmd->add_option("--set", o.sets, "override one key (repeatable), e.g. --set K0=15000");
  cmd->add_option("--out", o.out, "output directory")->capture_default_str();
  cmd->add_option("--seed", o.seed, "base RNG seed");
}

mmra::SimParams effective(const CommonOptions& o, mmra::SimParams base = {}) {
  std::vector<std::string> sets = o.sets;
  if (o.seed) sets.push_back("seed=" + std::to_string(*o.seed));
  std::optional<std::filesystem::path> path;
  if (!o.config.empty()) path = o.config;
  return mmra::load_config(path, sets, base);
}

void echo(const std::string& title, const mmra::SimParams& p) {
  std::cout << "# " << title << '\n' << mmra::to_config_text(p) << std::flush;
}

void report(const std::vector<std::filesystem::path>& files) {
  for (const auto& f : files) std::cout << "wrote " << f.string() << '\n';
}

void summarize(const std::vector<mmra::MetricsTable>& tables) {
  for (const auto& t : tables) {
    std::printf("%-22s interference=%-3s K0=%-6lld episodes=%-8lld avg_attempts=%.4f fail=%.4f\n",
                mmra::series_label(t).c_str(), t.interference ? "on" : "off",
                static_cast<long long>(t.k0), static_cast<long long>(t.episodes),
                t.avg_attempts_all(), t.fail_prob());
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo simulator of massive MIMO random access (SUCRe / ACBPC / baseline)"};
  app.require_subcommand(1);
  const std::string command_line = [&] {
    std::string s;
    for (int i = 0; i < argc; ++i) s += (i ? " " : "") + std::string(argv[i]);
    return s;
  }();

  CommonOptions run_opts, sweep_opts, preset_opts;
  auto* run_cmd = app.add_subcommand("run", "simulate one configuration");
  add_common(run_cmd, run_opts);

  std::vector<std::int64_t> sweep_k0;
  auto* sweep_cmd = app.add_subcommand("sweep", "simulate one configuration over a K0 axis");
  add_common(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--k0", sweep_k0, "K0 values")->delimiter(',')->required();
  sweep_cmd->add_option("--workers", sweep_opts.workers, "parallel runs")->capture_default_str();

  std::string preset_name;
  std::vector<std::int64_t> preset_k0;
  auto* preset_cmd = app.add_subcommand("preset", "run a figure preset");
  add_common(preset_cmd, preset_opts);
  preset_cmd->add_option("name", preset_name, "preset name")
      ->required()
      ->check(CLI::IsMember(mmra::preset_names()));
  preset_cmd->add_option("--k0", preset_k0, "replace the preset's K0 axis")->delimiter(',');
  preset_cmd->add_option("--workers", preset_opts.workers, "parallel runs")->capture_default_str();

  int n_max = 50;
  std::int64_t trials = 1000000;
  std::string bound_out = "results";
  std::uint64_t bound_seed = 1;
  auto* bound_cmd = app.add_subcommand("bound", "tabulate the ACBPC resolution bound");
  bound_cmd->add_option("--n-max", n_max, "largest contender count")->capture_default_str();
  bound_cmd->add_option("--trials", trials, "Monte Carlo trials per n")->capture_default_str();
  bound_cmd->add_option("--out", bound_out, "output directory")->capture_default_str();
  bound_cmd->add_option("--seed", bound_seed, "RNG seed")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    const auto t0 = std::chrono::steady_clock::now();
    if (*run_cmd) {
      const mmra::SimParams p = effective(run_opts);
      echo("effective config", p);
      std::vector<mmra::MetricsTable> tables{mmra::run(p)};
      summarize(tables);
      report(mmra::write_results(tables, {command_line, {p}, seconds_since(t0)}, run_opts.out));
    } else if (*sweep_cmd) {
      const mmra::SimParams base = effective(sweep_opts);
      echo("effective config (K0 replaced by the axis)", base);
      mmra::SweepAxis axis{mmra::SweepAxis::Kind::K0, sweep_k0};
      auto tables = mmra::sweep(base, axis, sweep_opts.workers);
      summarize(tables);
      std::vector<mmra::SimParams> configs;
      for (std::size_t i = 0; i < sweep_k0.size(); ++i) {
        mmra::SimParams p = base;
        p.k0 = sweep_k0[i];
        p.seed = base.seed + i;
        configs.push_back(p);
      }
      report(mmra::write_results(tables, {command_line, configs, seconds_since(t0)}, sweep_opts.out));
    } else if (*preset_cmd) {
      mmra::ExperimentPreset preset = mmra::make_preset(preset_name);
      if (preset.bound_table) {
        const auto rows = mmra::bound_table(n_max, trials, preset.base.seed);
        report(mmra::write_bound_results(rows, {command_line, {}, seconds_since(t0)}, preset_opts.out));
        return 0;
      }
      preset.base = effective(preset_opts, preset.base);
      if (!preset_k0.empty()) preset.k0_axis = preset_k0;
      echo("preset " + preset.name + " base config (protocol, interference, sigma_beta, K0 and seed "
           "set per point)", preset.base);
      const auto points = preset.expand();
      auto tables = mmra::run_all(points, preset_opts.workers);
      summarize(tables);
      report(mmra::write_results(tables, {command_line, points, seconds_since(t0)}, preset_opts.out));
    } else if (*bound_cmd) {
      const auto rows = mmra::bound_table(n_max, trials, bound_seed);
      for (const auto& r : rows) std::printf("n=%-3d bound=%.12f simulated=%.6f\n", r.n, r.bound, r.simulated);
      report(mmra::write_bound_results(rows, {command_line, {}, seconds_since(t0)}, bound_out));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
