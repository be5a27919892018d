#pragma once

#include <cstdint>
#include <vector>

#include "cascade/gridmap.hpp"
#include "cascade/trace.hpp"

namespace cascade {

// The auxiliary measure mu_q restricted to level-`level` words. mass[k] is
// the tail-depth-m approximation of mu_q of the k-th cylinder: the sum over
// its level-(level+tail_depth) descendants u of |W_u(empty)|^q *
// L_u(empty)^(-tau_q) (zero-weight paths excluded), which equals
// W_{q,w}(empty) * Yhat_q(w). Summing children therefore reproduces the
// parent mass computed at tail m+1 exactly up to float association.
struct MeasureTable {
  double q = 0.0;
  int level = 0;
  int tail_depth = 0;
  double tau_q = 0.0;  // exponent used in the weights, from the exact spectrum
  std::vector<double> mass;
  double total = 0.0;
};

// Requires level + tail_depth <= real.depth(). tau(q) is always taken from
// the exact spectrum module.
MeasureTable build_mu_q(const CascadeRealization& real, double q, int level, int tail_depth);

enum class PushTarget { domain, range, projection };

// Pushforward of the table mass onto a uniform 1d grid: domain deposits each
// word on its image interval [F_L(lambda w), F_L(lambda w) + dF_L], range on
// the cell's F_W value envelope, projection(theta) on the projected interval
// of the cell's graph bounding box. The projection coordinate of a point
// (x, y) is x*sin(theta) + y*cos(theta) (theta measured from the y-axis,
// clockwise), so theta = 0 reproduces the range pushforward. Requires
// table.level == trace.depth; throws BinningError if the bin width falls
// below 2^-40.
GriddedMap1D pushforward_1d(const MeasureTable& table, const FunctionTrace& trace,
                            PushTarget target, int bins, double theta = 0.0);

// Graph pushforward onto a 2d grid: each word's mass is split across the bins
// overlapped by its bounding box (x-interval times F_W envelope),
// proportionally to overlap area.
GriddedMap2D pushforward_graph(const MeasureTable& table, const FunctionTrace& trace,
                               int nx, int ny);

// Survival data for the band filter started at level n. A level-p word passes
// stage p when |W_w(empty)| and L_w(empty) lie in [e^(-p(xi +- eps))] and
// [e^(-p(xi_tilde +- eps))] respectively and the normalized oscillations
// Osc_{F_U}(I_w) / |U_w(empty)| lie in [e^(-p eps), e^(p eps)] for U in
// {W, L}; every check also applies to the same-level neighbors w-, w+ where
// they exist. `surviving` holds the level-n words passing stage n;
// complement_mass_by_level[i] is the mu_q mass of words failing at any stage
// in [n, n+i] (cumulative truncation of the nested intersection over stages),
// with all masses aggregated from one deepest-level table so the series is
// exactly monotone in its own accounting.
struct CantorFilterResult {
  double q = 0.0;
  double epsilon = 0.0;
  int n = 0;
  std::vector<std::uint64_t> surviving;
  double retained_mass = 0.0;
  double total_mass = 0.0;
  std::vector<double> complement_mass_by_level;
};

// Stages run from n to trace.depth. epsilon = +infinity passes everything.
CantorFilterResult cantor_filter(const CascadeRealization& real, const FunctionTrace& trace,
                                 double q, double epsilon, int n);

enum class KernelMode { graph, range };

struct EnergyEstimate {
  double gamma = 0.0;
  int depth = 0;
  double value = 0.0;
  std::uint64_t pair_count = 0;  // ordered pairs represented (b^n squared)
  bool subsampled = false;
  double stderr_value = 0.0;  // standard error of the estimate when subsampled
};

// Discrete Riesz energy sum_{u,v} K_gamma(u,v) mass(u) mass(v) over ordered
// word pairs with F-values at left-endpoint representatives. mode=graph uses
// the planar kernel (dx^2 + dy^2)^(-gamma/2) v 1, mode=range the y-only
// kernel |dy|^(-gamma) v 1. Self-pairs and coincident representatives use the
// kernel value 1, which keeps the gamma -> 0 limit at total^2. Exact when the
// ordered pair count fits the budget, otherwise uniform pair subsampling with
// unbiased weighting. Requires gamma > 0 and table.level == trace.depth.
EnergyEstimate riesz_energy(const MeasureTable& table, const FunctionTrace& trace,
                            double gamma, KernelMode mode,
                            std::uint64_t pair_budget = 20000000ull);

}  // namespace cascade
