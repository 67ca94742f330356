#pragma once

// Cell layout, UE placement, large-scale fading and the adjacent-cell
// interferer population.

#include "mmra/power_policy.hpp"
#include "mmra/rng.hpp"

#include <cstddef>
#include <vector>

namespace mmra {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double distance(Point a, Point b);

/// Flat-topped hexagonal home cell (BS at the origin) surrounded by up to six
/// neighbours at inter-site distance sqrt(3) * d_max.
struct CellLayout {
  double d_max = 250.0; // hexagon circumradius [m]
  double d_min = 25.0;  // exclusion radius around each BS [m]
  int n_adjacent = 6;   // 0 disables the neighbour ring

  void validate() const;
  std::vector<Point> adjacent_centers() const;
  /// True if p (relative to a BS) lies inside that BS's hexagon.
  bool inside_hexagon(Point p) const;
};

struct UePosition {
  Point xy;                        // relative to the home BS
  double d_home = 0.0;             // [m]
  std::vector<double> d_adjacent;  // one entry per adjacent BS [m]
};

/// Position at a fixed point, with cached distances.
UePosition make_position(const CellLayout& layout, Point xy);

/// Uniform over the hexagon, rejection-sampled so d_home >= d_min.
UePosition place_ue(const CellLayout& layout, Rng& rng);

struct LargeScaleGain {
  double beta = 0.0;       // true gain
  double chi = 1.0;        // shadowing multiplier
  double beta_known = 0.0; // what the UE believes (== beta unless perturbed)
};

/// beta = d_ref * d^-kappa * chi with chi log-normal (shadow_sigma_db in dB).
LargeScaleGain large_scale_gain(double d, Rng& rng, double shadow_sigma_db,
                                const PathLoss& pl = {});
/// Same law with chi fixed by the caller.
LargeScaleGain gain_with_shadowing(double d, double chi, const PathLoss& pl = {});
double draw_shadowing(Rng& rng, double shadow_sigma_db);

/// beta_known = phi * beta with phi ~ N(1, sigma_beta^2); phi <= 0 is redrawn.
LargeScaleGain perturb_beta(const LargeScaleGain& g, double sigma_beta, Rng& rng);

/// h = sqrt(beta) * CN(0, I_M).
CVector draw_channel(double beta, std::size_t antennas, Rng& rng);
void draw_channel(double beta, std::span<cplx> out, Rng& rng);

struct Interferer {
  int cell = 0;            // index into CellLayout::adjacent_centers()
  int pilot = 0;           // 0-based pilot index
  Point xy;                // relative to the home BS
  double beta_home = 0.0;  // gain towards the home BS
  double beta_own = 0.0;   // gain towards its serving BS
  double power = 0.0;
};

/// How an interferer's shadowing towards its own BS and towards the home BS
/// relate: one draw per UE, or independent draws per link.
enum class ShadowingModel { PerUe, PerLink };

/// tau_p active UEs in every adjacent cell, one per pilot, power set by
/// `policy` relative to their own BS.
std::vector<Interferer> spawn_interferers(const CellLayout& layout, int tau_p,
                                          const PowerPolicy& policy, const PathLoss& pl,
                                          Rng& rng,
                                          ShadowingModel shadowing = ShadowingModel::PerUe);

} // namespace mmra
