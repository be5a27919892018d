#pragma once

#include <cstdint>
#include <vector>

#include "cascade/trace.hpp"

namespace cascade {

// Windowed log-log regression result. log_stats[i] is the base-b log of the
// per-level statistic at levels[i]; slope and intercept come from ordinary
// least squares over the window, r2 is the coefficient of determination and
// low_r2 flags r2 < 0.9 (a warning, not an error).
struct ScalingFit {
  std::vector<int> levels;
  std::vector<double> log_stats;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int j_min = 0;
  int j_max = 0;
  bool low_r2 = false;
};

// Oscillation L^q spectrum: per level j the statistic
//   S_j(q) = sum over level-j cells with positive oscillation of osc^q,
// fitted as log_b S_j against -j over the window, so the slope estimates the
// scaling exponent of the composed function. Throws DegenerateError when
// fewer than 3 window levels have cells with positive oscillation.
std::vector<ScalingFit> lq_spectrum(const FunctionTrace& trace, const std::vector<double>& qs,
                                    int j_min, int j_max);

struct LegendreEstimate {
  std::vector<double> h;
  std::vector<double> d;  // discrete inf over the q-grid of q*h - tau_hat(q)
  bool low_confidence = false;  // fewer than 5 q-points supplied
};

// Numeric Legendre transform of an estimated exponent function on an h-grid
// spanning the observed slopes (finite differences of tau_hat on the q-grid).
LegendreEstimate legendre_numeric(const std::vector<double>& qs,
                                  const std::vector<double>& tau_hats, int h_points = 101);

enum class BoxTarget { graph, range, projection, levelset };

struct BoxCountResult {
  BoxTarget target = BoxTarget::graph;
  std::vector<int> levels;            // j = 1 .. trace.depth
  std::vector<std::int64_t> counts;   // N_j per level
  ScalingFit fit;
  double theta = 0.0;  // projection / levelset direction, angle from the y-axis
  double y = 0.0;      // levelset value in projected coordinates
};

// Graph covering count: x-columns of width b^-j * F_L(1); each column needs
// ceil(osc / width) + 1 squares, where the column oscillation envelope is
// assembled from the level-depth cells' fine-grid F_W envelopes (a cell's
// envelope goes to every column its open x-span meets; endpoint values are
// shared with boundary columns).
BoxCountResult box_count_graph(const FunctionTrace& trace, int j_min, int j_max);

// Range covering count: occupied y-bins of size b^-j, from interval merging
// of the per-cell F_W envelopes at level j.
BoxCountResult box_count_range(const FunctionTrace& trace, int j_min, int j_max);

// Projection covering count: occupied bins of size b^-j on the line at angle
// theta from the y-axis, from the projected per-cell bounding boxes.
BoxCountResult box_count_projection(const FunctionTrace& trace, double theta,
                                    int j_min, int j_max);

// Level-set covering count at projected level y: x-columns whose projected
// polyline value interval straddles y, with linear interpolation inside the
// finest cells deciding the straddle at column boundaries. Throws
// OutOfRangeError when y lies outside the projected range.
BoxCountResult box_count_levelset(const FunctionTrace& trace, double y, double theta,
                                  int j_min, int j_max);

// OLS slope of log_b N_j against j over the window, using levels with
// N_j > 0. Throws DegenerateError with fewer than 3 usable levels.
ScalingFit fit_dimension(const std::vector<int>& levels, const std::vector<std::int64_t>& counts,
                         int j_min, int j_max, int b = 2);

// Shared OLS helper: fits y against x, returns slope/intercept/r2.
ScalingFit ols_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace cascade
