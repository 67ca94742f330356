#include "mmra/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mmra {

namespace {

constexpr int kMaxRejections = 1'000'000;
const double kSqrt3 = std::sqrt(3.0);

Point sample_local(const CellLayout& layout, Rng& rng) {
  const double r = layout.d_max;
  const double half_height = 0.5 * kSqrt3 * r;
  for (int i = 0; i < kMaxRejections; ++i) {
    const Point p{(2.0 * rng.uniform() - 1.0) * r, (2.0 * rng.uniform() - 1.0) * half_height};
    if (!layout.inside_hexagon(p)) continue;
    if (std::hypot(p.x, p.y) < layout.d_min) continue;
    return p;
  }
  throw std::logic_error("place_ue: rejection sampler exceeded 1e6 draws");
}

} // namespace

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

void CellLayout::validate() const {
  if (!(d_max > 0.0)) throw std::invalid_argument("layout: d_max must be > 0");
  if (!(d_min >= 0.0) || !(d_min < d_max))
    throw std::invalid_argument("layout: need 0 <= d_min < d_max");
  if (n_adjacent < 0 || n_adjacent > 6)
    throw std::invalid_argument("layout: n_adjacent must be in [0, 6]");
}

std::vector<Point> CellLayout::adjacent_centers() const {
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(n_adjacent));
  const double isd = kSqrt3 * d_max;
  for (int k = 0; k < n_adjacent; ++k) {
    const double a = std::numbers::pi / 6.0 + k * std::numbers::pi / 3.0;
    out.push_back({isd * std::cos(a), isd * std::sin(a)});
  }
  return out;
}

bool CellLayout::inside_hexagon(Point p) const {
  const double ax = std::abs(p.x);
  const double ay = std::abs(p.y);
  return ay <= 0.5 * kSqrt3 * d_max && kSqrt3 * ax + ay <= kSqrt3 * d_max;
}

UePosition make_position(const CellLayout& layout, Point xy) {
  UePosition pos;
  pos.xy = xy;
  pos.d_home = std::hypot(xy.x, xy.y);
  for (const Point c : layout.adjacent_centers()) pos.d_adjacent.push_back(distance(xy, c));
  return pos;
}

UePosition place_ue(const CellLayout& layout, Rng& rng) {
  return make_position(layout, sample_local(layout, rng));
}

double draw_shadowing(Rng& rng, double shadow_sigma_db) {
  if (shadow_sigma_db == 0.0) return 1.0;
  return std::pow(10.0, shadow_sigma_db * rng.normal() / 10.0);
}

LargeScaleGain gain_with_shadowing(double d, double chi, const PathLoss& pl) {
  if (!(d > 0.0)) throw std::domain_error("large_scale_gain: distance must be positive");
  LargeScaleGain g;
  g.chi = chi;
  g.beta = pl.gain(d, chi);
  g.beta_known = g.beta;
  return g;
}

LargeScaleGain large_scale_gain(double d, Rng& rng, double shadow_sigma_db, const PathLoss& pl) {
  if (!(d > 0.0)) throw std::domain_error("large_scale_gain: distance must be positive");
  return gain_with_shadowing(d, draw_shadowing(rng, shadow_sigma_db), pl);
}

LargeScaleGain perturb_beta(const LargeScaleGain& g, double sigma_beta, Rng& rng) {
  if (!(sigma_beta >= 0.0)) throw std::invalid_argument("perturb_beta: sigma_beta must be >= 0");
  LargeScaleGain out = g;
  if (sigma_beta == 0.0) {
    out.beta_known = g.beta;
    return out;
  }
  double phi = 0.0;
  do {
    phi = 1.0 + sigma_beta * rng.normal();
  } while (phi <= 0.0);
  out.beta_known = phi * g.beta;
  return out;
}

void draw_channel(double beta, std::span<cplx> out, Rng& rng) {
  rng.fill_complex_normal(out, beta);
}

CVector draw_channel(double beta, std::size_t antennas, Rng& rng) {
  CVector h(antennas);
  draw_channel(beta, h, rng);
  return h;
}

std::vector<Interferer> spawn_interferers(const CellLayout& layout, int tau_p,
                                          const PowerPolicy& policy, const PathLoss& pl,
                                          Rng& rng, ShadowingModel shadowing) {
  if (tau_p < 1) throw std::invalid_argument("spawn_interferers: tau_p must be >= 1");
  const auto centers = layout.adjacent_centers();
  std::vector<Interferer> out;
  out.reserve(centers.size() * static_cast<std::size_t>(tau_p));
  for (std::size_t c = 0; c < centers.size(); ++c) {
    for (int t = 0; t < tau_p; ++t) {
      const Point local = sample_local(layout, rng);
      Interferer it;
      it.cell = static_cast<int>(c);
      it.pilot = t;
      it.xy = {centers[c].x + local.x, centers[c].y + local.y};
      const double chi_own = draw_shadowing(rng, pl.shadow_db);
      const double chi_home =
          shadowing == ShadowingModel::PerLink ? draw_shadowing(rng, pl.shadow_db) : chi_own;
      it.beta_own = pl.gain(std::hypot(local.x, local.y), chi_own);
      it.beta_home = pl.gain(std::hypot(it.xy.x, it.xy.y), chi_home);
      it.power = tx_power(policy, it.beta_own);
      out.push_back(it);
    }
  }
  return out;
}

} // namespace mmra
