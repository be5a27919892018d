#pragma once

#include <vector>

#include "cascade/generator.hpp"

namespace cascade {

// All exact theoretical quantities at one q.
// Units: xi and xi_tilde are natural-log decay rates per tree level; tau,
// tau_prime, tau_star, gammaG, gammaR are base-b dimension values; gamma is
// in nats per level, so tau_star == gamma / xi_tilde.
struct SpectrumPoint {
  double q = 0.0;
  double tau = 0.0;        // unique root of Phi(q, tau) = 1
  double xi = 0.0;         // -dPhi/dq at (q, tau)
  double xi_tilde = 0.0;   // dPhi/dt at (q, tau), always > 0
  double tau_prime = 0.0;  // xi / xi_tilde
  double gamma = 0.0;      // q*xi - tau*xi_tilde
  double tau_star = 0.0;   // q*tau_prime - tau
  double gammaG = 0.0;     // (tau_star/h ^ (tau_star+1-h)) v tau_star, h = tau_prime
  double gammaR = 0.0;     // tau_star/h ^ 1
};

enum class JClass { J1, J2, J3 };

// J1: gammaG > 1; J2: gammaG <= 1 and tau_prime < 1; J3: gammaG <= 1 and
// tau_prime >= 1. The gammaG threshold is resolved with a 1e-12 rounding
// floor so tangential touchings of 1 classify deterministically.
JClass classify(const SpectrumPoint& pt);

struct JSegment {
  double lo = 0.0;
  double hi = 0.0;
  JClass label = JClass::J1;
};

// Maximal interval where q*tau'(q) - tau(q) > 0, with its classification
// partition. Endpoints outside the scan box [-50, 50] are reported as
// +-infinity sentinels.
struct IntervalJ {
  double q_lo = 0.0;
  double q_hi = 0.0;
  std::vector<JSegment> segments;
  bool contains(double q) const { return q > q_lo && q < q_hi; }
};

// Unique t with Phi(q,t) = 1, solved to |Phi - 1| <= 1e-13 by bracket
// expansion plus safeguarded Newton. Throws BracketError if the bracket
// expansion exceeds |t| > 1e3.
double tau(const GeneratorSpec& spec, double q);

// Fills every SpectrumPoint field from the exact analytic derivatives of Phi
// at (q, tau(q)).
SpectrumPoint spectrum_point(const GeneratorSpec& spec, double q);

// Legendre transform inf_q q*h - tau(q), computed by inverting tau'(q) = h
// (tau is concave, so tau' is monotone) on the scan box [-50, 50]. For h
// outside the attainable slope range the boundary linear extension
// q_b*h - tau(q_b) is returned, which keeps the function total and continuous
// in h; this also covers the degenerate monofractal case where tau' is
// constant. Requires h > 0 (throws OutOfRangeError otherwise).
double tau_star(const GeneratorSpec& spec, double h);

// Locates J by scanning 1e4 grid points on [-50, 50] and bisecting sign
// changes of q*tau'(q) - tau(q) to 1e-8. Values below a 1e-12 positivity
// floor count as non-positive so that laws whose margin decays to the order
// of double rounding get finite detected endpoints. Throws EmptyJError if no
// positive region exists.
IntervalJ interval_J(const GeneratorSpec& spec);

struct PredictedSpectra {
  double dimG = 0.0;             // graph spectrum at h
  double dimR = 0.0;             // range spectrum at h
  double dimL = 0.0;             // level-set spectrum tau_star(h) - h; NaN if <= 0
  double dim_graph_whole = 0.0;  // box dimension of the whole graph, 1 - tau(1)
};

// Predicted spectra at exponent h > 0.
PredictedSpectra predicted_spectra(const GeneratorSpec& spec, double h);

struct UpperBoundValues {
  double graphUB = 0.0;
  double rangeUB = 0.0;
  double levelUB = 0.0;
};

// General graph/range/level-set upper bounds for a set of dimension dimE,
// exponent h > 0 and level-set deficiency gamma_level >= 0:
//   graphUB = (dimE/h ^ (dimE+1-h)) v dimE, rangeUB = dimE/h ^ 1,
//   levelUB = dimE - h*gamma_level.
UpperBoundValues upper_bounds(double dimE, double h, double gamma_level);

}  // namespace cascade
