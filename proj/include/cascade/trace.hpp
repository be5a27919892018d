#pragma once

#include <array>
#include <vector>

#include "cascade/realization.hpp"

namespace cascade {

// Values of F_W and F_L at every b-adic point of level `depth`, plus per-cell
// oscillation tables for all coarser levels. Endpoint values use the
// tail-truncated limit: the increment over a level-n cell u is
// W_u(empty) * Zhat(u) with Zhat(u) = sum over level-tail_depth descendants
// of their weight products (tail_depth = 0 reproduces the partial-sum
// approximation). Oscillations are max - min of the function over each
// cell's level-(depth+tail_depth) grid endpoints.
struct FunctionTrace {
  int b = 2;
  int depth = 0;       // n: resolution of the stored endpoint arrays
  int tail_depth = 0;  // m: extra levels used for the endpoint tail and oscillations
  std::vector<double> FW_at;  // b^depth + 1 values, FW_at[0] = 0
  std::vector<double> FL_at;  // strictly increasing, FL_at[0] = 0

  // Indexed [j][k] for level j in 0..depth, cell k in 0..b^j-1.
  std::vector<std::vector<double>> osc_W;
  std::vector<std::vector<double>> osc_L;
  // Fine-grid envelope of F_W per cell (min/max over the cell's fine endpoints).
  std::vector<std::vector<double>> min_W;
  std::vector<std::vector<double>> max_W;

  double fl_total() const { return FL_at.back(); }
};

// Requires depth + tail_depth <= real.depth() (DepthError) and
// b^(depth+tail_depth) within the in-memory guard (CapacityError).
FunctionTrace build_trace(const CascadeRealization& real, int depth, int tail_depth);

// The composed-graph point set {(FL_at[k], FW_at[k])}: both coordinates are
// sampled at the same b-adic times, so composing F_W with the inverse of F_L
// is reparametrization-free. Throws NonMonotoneError if FL_at is not strictly
// increasing (upstream bug).
std::vector<std::array<double, 2>> compose_F(const FunctionTrace& trace);

// CSV export with the fixed header level,k,x,FW,FL,oscW,oscL: one row per
// cell of every level, x the level-j b-adic left endpoint in parameter space
// and FW/FL the function values there.
std::string trace_csv(const FunctionTrace& trace);

}  // namespace cascade
