#include "mmra/results_io.hpp"

#include "mmra/config.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

#ifndef MMRA_VERSION
#define MMRA_VERSION "0.1.0-unknown"
#endif

namespace mmra {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

const char* onoff(bool b) { return b ? "on" : "off"; }

using SeriesKey = std::tuple<std::string, bool>;

std::map<SeriesKey, MetricsTable> merge_by_series(std::span<const MetricsTable> tables,
                                                  std::vector<SeriesKey>& order) {
  std::map<SeriesKey, MetricsTable> merged;
  for (const auto& t : tables) {
    SeriesKey key{series_label(t), t.interference};
    auto it = merged.find(key);
    if (it == merged.end()) {
      merged.emplace(key, t);
      order.push_back(key);
    } else {
      it->second.merge(t);
    }
  }
  return merged;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

} // namespace

std::string version_string() { return MMRA_VERSION; }

std::string series_label(const MetricsTable& t) {
  std::string s(to_string(t.protocol));
  if (t.sigma_beta > 0.0) s += "_imperfect_beta";
  return s;
}

std::string attempts_csv(std::span<const MetricsTable> tables) {
  std::string out = std::string(kAttemptsHeader) + '\n';
  for (const auto& t : tables) {
    out += series_label(t) + ',' + onoff(t.interference) + ',' + std::to_string(t.k0) + ',' +
           num(t.avg_attempts_all()) + ',' + num(t.avg_attempts_success()) + ',' +
           num(t.fail_prob()) + ',' + num(t.avg_contenders()) + '\n';
  }
  return out;
}

std::string resolution_csv(std::span<const MetricsTable> tables) {
  std::vector<SeriesKey> order;
  const auto merged = merge_by_series(tables, order);
  std::string out = std::string(kResolutionHeader) + '\n';
  for (const auto& key : order) {
    const auto& t = merged.at(key);
    for (std::size_t n = 1; n < t.by_contenders.size(); ++n) {
      const auto& c = t.by_contenders[n];
      if (c.total == 0) continue;
      out += std::get<0>(key) + ',' + onoff(std::get<1>(key)) + ',' + std::to_string(n) + ',' +
             num(c.ratio()) + ',' + std::to_string(c.total) + ',' +
             num(p_res_bound(static_cast<long long>(n))) + '\n';
    }
  }
  return out;
}

std::string distance_csv(std::span<const MetricsTable> tables) {
  std::vector<SeriesKey> order;
  const auto merged = merge_by_series(tables, order);
  std::string out = std::string(kDistanceHeader) + '\n';
  for (const auto& key : order) {
    for (const auto& b : merged.at(key).by_distance) {
      out += std::get<0>(key) + ',' + onoff(std::get<1>(key)) + ',' + num(b.lo) + ',' +
             num(b.hi) + ',' + num(b.avg_attempts()) + ',' + num(b.fail_prob()) + ',' +
             num(b.p_res()) + ',' + num(b.avg_power_norm()) + ',' + num(b.avg_energy()) + '\n';
    }
  }
  return out;
}

std::vector<BoundRow> bound_table(int n_max, std::int64_t trials, std::uint64_t seed) {
  if (n_max < 1) throw std::invalid_argument("bound_table: n_max must be >= 1");
  std::vector<BoundRow> rows;
  for (int n = 1; n <= n_max; ++n) {
    Rng rng(seed, static_cast<std::uint64_t>(n));
    rows.push_back({n, p_res_bound(n), idealized_resolution_frequency(n, trials, rng), trials});
  }
  return rows;
}

std::string bound_csv(std::span<const BoundRow> rows) {
  std::string out = std::string(kBoundHeader) + '\n';
  for (const auto& r : rows) {
    out += std::to_string(r.n) + ',' + num(r.bound) + ',' + num(r.simulated) + ',' +
           std::to_string(r.trials) + '\n';
  }
  return out;
}

fs::path make_run_dir(const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create " + out_dir.string() + ": " + ec.message());
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y%m%dT%H%M%SZ", &tm);
  for (int i = 0; i < 10000; ++i) {
    fs::path dir = out_dir / (std::string("run-") + stamp + (i ? "-" + std::to_string(i) : ""));
    if (fs::create_directory(dir, ec)) return dir;
    if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  }
  throw std::runtime_error("cannot allocate a run directory under " + out_dir.string());
}

std::string manifest_json(const RunManifest& m, std::span<const MetricsTable> tables) {
  nlohmann::json j;
  j["version"] = version_string();
  j["command"] = m.command;
  j["wall_seconds"] = m.wall_seconds;
  j["configs"] = nlohmann::json::array();
  for (const auto& c : m.configs) {
    j["configs"].push_back({{"seed", c.seed}, {"config", to_config_text(c)}});
  }
  j["omega_bar"] = nlohmann::json::array();
  for (const auto& t : tables) j["omega_bar"].push_back(t.omega_bar);
  return j.dump(2) + '\n';
}

std::vector<fs::path> write_results(std::span<const MetricsTable> tables, const RunManifest& manifest,
                                    const fs::path& out_dir) {
  const fs::path dir = make_run_dir(out_dir);
  std::vector<fs::path> files = {dir / "attempts_vs_k0.csv", dir / "res_vs_st.csv",
                                 dir / "dist_perf.csv", dir / "manifest.json"};
  write_file(files[0], attempts_csv(tables));
  write_file(files[1], resolution_csv(tables));
  write_file(files[2], distance_csv(tables));
  write_file(files[3], manifest_json(manifest, tables));
  return files;
}

std::vector<fs::path> write_bound_results(std::span<const BoundRow> rows, const RunManifest& manifest,
                                          const fs::path& out_dir) {
  const fs::path dir = make_run_dir(out_dir);
  std::vector<fs::path> files = {dir / "bound.csv", dir / "manifest.json"};
  write_file(files[0], bound_csv(rows));
  write_file(files[1], manifest_json(manifest, {}));
  return files;
}

std::vector<std::string> split_csv_row(const std::string& row) {
  std::vector<std::string> out;
  std::stringstream ss(row);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!row.empty() && row.back() == ',') out.emplace_back();
  return out;
}

} // namespace mmra
