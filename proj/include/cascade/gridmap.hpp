#pragma once

#include <cstdint>
#include <vector>

namespace cascade {

// Mass histogram on uniform bins over [lo, hi].
struct GriddedMap1D {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> mass;

  double bin_width() const { return (hi - lo) / static_cast<double>(mass.size()); }
  double total() const;
  // Mass of the ball [x - r, x + r], linearly interpolated inside boundary
  // bins so that radii need not align with the grid.
  double ball_mass(double x, double r) const;
};

// Mass histogram on an nx-by-ny uniform grid (row-major, y fastest).
struct GriddedMap2D {
  double xlo = 0.0, xhi = 1.0, ylo = 0.0, yhi = 1.0;
  int nx = 0, ny = 0;
  std::vector<double> mass;
  double total() const;
};

// Deposits `amount` over the interval [a, b] proportionally across the bins
// it overlaps; a degenerate interval (a == b) lands in its containing bin.
void deposit_interval(GriddedMap1D& map, double a, double b, double amount);

// Deterministic mu-typical sample positions: bin chosen by CDF inversion of
// hashed uniforms, position at the bin center.
std::vector<double> sample_map_points(const GriddedMap1D& map, int count, std::uint64_t seed);

struct LocalDimResult {
  std::vector<double> slopes;  // one OLS slope of log mass vs log r per usable point
  int excluded = 0;            // points dropped because the smallest ball had zero mass
  double median = 0.0;
};

// Per-point least-squares slope of log mu(B(x,r)) against log r. Requires at
// least 4 radii (InvariantError). Points whose smallest ball carries no mass
// are excluded and counted; throws EmptyBallError only if every point is
// excluded.
LocalDimResult local_dimension(const GriddedMap1D& map, const std::vector<double>& points,
                               const std::vector<double>& radii);

}  // namespace cascade
