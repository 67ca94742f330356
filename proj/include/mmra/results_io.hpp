#pragma once

// CSV tables, the bound table and the JSON run manifest.

#include "mmra/simulator.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace mmra {

inline constexpr const char* kAttemptsHeader =
    "protocol,interference,K0,avg_attempts_all,avg_attempts_success,fail_prob,avg_contenders";
inline constexpr const char* kResolutionHeader = "protocol,interference,st,p_res,n_samples,bound";
inline constexpr const char* kDistanceHeader =
    "protocol,interference,bin_lo_m,bin_hi_m,avg_attempts,fail_prob,p_res,avg_power_norm,"
    "avg_energy_bw";
inline constexpr const char* kBoundHeader = "n,bound,simulated,n_trials";

std::string version_string();

/// Series label used in the protocol column: the protocol name, suffixed
/// with `_imperfect_beta` when the table was produced with sigma_beta > 0.
std::string series_label(const MetricsTable& t);

/// Rows of attempts_vs_k0.csv, one per table.
std::string attempts_csv(std::span<const MetricsTable> tables);
/// Rows of res_vs_st.csv; tables of the same series are merged first.
std::string resolution_csv(std::span<const MetricsTable> tables);
/// Rows of dist_perf.csv; tables of the same series are merged first.
std::string distance_csv(std::span<const MetricsTable> tables);

struct BoundRow {
  int n = 1;
  double bound = 1.0;
  double simulated = 1.0;
  std::int64_t trials = 0;
};

std::vector<BoundRow> bound_table(int n_max, std::int64_t trials, std::uint64_t seed);
std::string bound_csv(std::span<const BoundRow> rows);

struct RunManifest {
  std::string command;
  std::vector<SimParams> configs;
  double wall_seconds = 0.0;
};

/// Creates out_dir/run-<UTC timestamp>[-n], never reusing an existing one.
std::filesystem::path make_run_dir(const std::filesystem::path& out_dir);

/// Writes attempts_vs_k0.csv, res_vs_st.csv, dist_perf.csv and manifest.json
/// into a fresh run directory under out_dir; returns the files written.
/// I/O failures throw std::runtime_error naming the path.
std::vector<std::filesystem::path> write_results(std::span<const MetricsTable> tables,
                                                 const RunManifest& manifest,
                                                 const std::filesystem::path& out_dir);

std::vector<std::filesystem::path> write_bound_results(std::span<const BoundRow> rows,
                                                       const RunManifest& manifest,
                                                       const std::filesystem::path& out_dir);

std::string manifest_json(const RunManifest& manifest, std::span<const MetricsTable> tables);

/// Parses one numeric CSV row (no quoting).
std::vector<std::string> split_csv_row(const std::string& row);

} // namespace mmra
