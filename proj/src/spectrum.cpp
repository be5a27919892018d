#include "cascade/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cascade/errors.hpp"

namespace cascade {

namespace {

constexpr double kScanLo = -50.0;
constexpr double kScanHi = 50.0;
constexpr int kScanPoints = 10000;
// Margins at or below this count as non-positive when locating J endpoints:
// laws whose margin decays toward zero hit double rounding around 1e-16.
constexpr double kPositivityFloor = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double tau(const GeneratorSpec& spec, double q) {
  // Phi(q, t) is continuous and strictly increasing in t, so first expand a
  // sign-changing bracket, then polish with Newton guarded by bisection.
  double lo = -1.0, hi = 1.0;
  while (moment(spec, q, lo) > 1.0) {
    lo *= 2.0;
    if (lo < -1e3) throw BracketError("tau bracket expansion exceeded t = -1e3");
  }
  while (moment(spec, q, hi) < 1.0) {
    hi *= 2.0;
    if (hi > 1e3) throw BracketError("tau bracket expansion exceeded t = 1e3");
  }
  double t = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    double f = moment(spec, q, t) - 1.0;
    if (std::abs(f) <= 1e-13) return t;
    if (f > 0.0)
      hi = t;
    else
      lo = t;
    // dPhi/dt = sum p |w|^q l^-t (-log l) > 0
    double deriv = 0.0;
    for (const Atom& a : spec.atoms) {
      double inner = 0.0;
      for (int j = 0; j < spec.b; ++j) {
        double wj = a.w[static_cast<std::size_t>(j)];
        if (wj == 0.0) continue;
        double lj = a.l[static_cast<std::size_t>(j)];
        inner += std::pow(std::abs(wj), q) * std::pow(lj, -t) * (-std::log(lj));
      }
      deriv += a.p * inner;
    }
    double step = t - f / deriv;
    t = (step > lo && step < hi) ? step : 0.5 * (lo + hi);
  }
  return t;
}

SpectrumPoint spectrum_point(const GeneratorSpec& spec, double q) {
  SpectrumPoint pt;
  pt.q = q;
  pt.tau = tau(spec, q);
  double xi = 0.0, xit = 0.0;
  for (const Atom& a : spec.atoms) {
    for (int j = 0; j < spec.b; ++j) {
      double wj = a.w[static_cast<std::size_t>(j)];
      if (wj == 0.0) continue;
      double lj = a.l[static_cast<std::size_t>(j)];
      double term = a.p * std::pow(std::abs(wj), q) * std::pow(lj, -pt.tau);
      xi += term * (-std::log(std::abs(wj)));
      xit += term * (-std::log(lj));
    }
  }
  pt.xi = xi;
  pt.xi_tilde = xit;
  pt.tau_prime = xi / xit;
  pt.gamma = q * xi - pt.tau * xit;
  pt.tau_star = q * pt.tau_prime - pt.tau;
  double h = pt.tau_prime;
  pt.gammaG = std::max(std::min(pt.tau_star / h, pt.tau_star + 1.0 - h), pt.tau_star);
  pt.gammaR = std::min(pt.tau_star / h, 1.0);
  return pt;
}

JClass classify(const SpectrumPoint& pt) {
  // The same rounding floor as the J scan: conservative laws touch gammaG = 1
  // tangentially at q = 1, where the last bit of the computed value is noise.
  if (pt.gammaG > 1.0 + kPositivityFloor) return JClass::J1;
  return pt.tau_prime < 1.0 ? JClass::J2 : JClass::J3;
}

double tau_star(const GeneratorSpec& spec, double h) {
  if (!(h > 0.0)) throw OutOfRangeError("tau_star requires h > 0");
  // tau is concave, so tau' is non-increasing in q: largest slope at the left
  // edge of the scan box, smallest at the right.
  double slope_hi = spectrum_point(spec, kScanLo).tau_prime;
  double slope_lo = spectrum_point(spec, kScanHi).tau_prime;
  if (h >= slope_hi) return kScanLo * h - tau(spec, kScanLo);
  if (h <= slope_lo) return kScanHi * h - tau(spec, kScanHi);
  double lo = kScanLo, hi = kScanHi;
  for (int it = 0; it < 100 && hi - lo > 1e-10; ++it) {
    double mid = 0.5 * (lo + hi);
    if (spectrum_point(spec, mid).tau_prime > h)
      lo = mid;
    else
      hi = mid;
  }
  double qh = 0.5 * (lo + hi);
  return qh * h - tau(spec, qh);
}

namespace {

double j_margin(const GeneratorSpec& spec, double q) {
  SpectrumPoint pt = spectrum_point(spec, q);
  return q * pt.tau_prime - pt.tau;
}

double bisect_margin(const GeneratorSpec& spec, double lo, double hi, bool rising) {
  // Finds the crossing of the margin through the positivity floor; `rising`
  // means the margin is above the floor at `hi` side.
  for (int it = 0; it < 100 && hi - lo > 1e-8; ++it) {
    double mid = 0.5 * (lo + hi);
    bool pos = j_margin(spec, mid) > kPositivityFloor;
    if (pos == rising)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

IntervalJ interval_J(const GeneratorSpec& spec) {
  std::vector<double> grid(kScanPoints + 1);
  std::vector<bool> pos(kScanPoints + 1);
  int first = -1, last = -1;
  for (int i = 0; i <= kScanPoints; ++i) {
    grid[static_cast<std::size_t>(i)] =
        kScanLo + (kScanHi - kScanLo) * i / static_cast<double>(kScanPoints);
    pos[static_cast<std::size_t>(i)] =
        j_margin(spec, grid[static_cast<std::size_t>(i)]) > kPositivityFloor;
    if (pos[static_cast<std::size_t>(i)]) {
      if (first < 0) first = i;
      last = i;
    }
  }
  if (first < 0) throw EmptyJError("no q with positive Legendre margin found in the scan box");

  IntervalJ J;
  if (first == 0)
    J.q_lo = -kInf;
  else
    J.q_lo = bisect_margin(spec, grid[static_cast<std::size_t>(first - 1)],
                           grid[static_cast<std::size_t>(first)], true);
  if (last == kScanPoints)
    J.q_hi = kInf;
  else
    J.q_hi = bisect_margin(spec, grid[static_cast<std::size_t>(last)],
                           grid[static_cast<std::size_t>(last + 1)], false);

  // Classification partition on the detected interval, refined at label
  // changes by bisection (gammaG and tau_prime vary continuously in q).
  double seg_lo = std::max(J.q_lo, kScanLo);
  double seg_hi = std::min(J.q_hi, kScanHi);
  const int cells = 2000;
  double prev_q = seg_lo;
  JClass prev_label = classify(spectrum_point(spec, std::min(seg_lo + 1e-9, seg_hi)));
  double start = seg_lo;
  for (int i = 1; i <= cells; ++i) {
    double qi = seg_lo + (seg_hi - seg_lo) * i / static_cast<double>(cells);
    JClass li = classify(spectrum_point(spec, qi));
    if (li != prev_label) {
      double a = prev_q, bq = qi;
      for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (a + bq);
        if (classify(spectrum_point(spec, mid)) == prev_label)
          a = mid;
        else
          bq = mid;
      }
      double cut = 0.5 * (a + bq);
      J.segments.push_back({start, cut, prev_label});
      start = cut;
      prev_label = li;
    }
    prev_q = qi;
  }
  J.segments.push_back({start, seg_hi, prev_label});
  if (J.q_lo == -kInf) J.segments.front().lo = -kInf;
  if (J.q_hi == kInf) J.segments.back().hi = kInf;
  return J;
}

PredictedSpectra predicted_spectra(const GeneratorSpec& spec, double h) {
  if (!(h > 0.0)) throw OutOfRangeError("predicted_spectra requires h > 0");
  PredictedSpectra out;
  double ts = tau_star(spec, h);
  out.dimG = std::max(std::min(ts / h, ts + 1.0 - h), ts);
  out.dimR = std::min(ts / h, 1.0);
  double dl = ts - h;
  out.dimL = dl > 0.0 ? dl : std::numeric_limits<double>::quiet_NaN();
  out.dim_graph_whole = 1.0 - tau(spec, 1.0);
  return out;
}

UpperBoundValues upper_bounds(double dimE, double h, double gamma_level) {
  if (!(h > 0.0)) throw OutOfRangeError("upper_bounds requires h > 0");
  if (!(dimE >= 0.0 && dimE <= 1.0)) throw OutOfRangeError("upper_bounds requires dimE in [0,1]");
  if (!(gamma_level >= 0.0)) throw OutOfRangeError("upper_bounds requires gamma_level >= 0");
  UpperBoundValues out;
  out.graphUB = std::max(std::min(dimE / h, dimE + 1.0 - h), dimE);
  out.rangeUB = std::min(dimE / h, 1.0);
  out.levelUB = dimE - h * gamma_level;
  return out;
}

}  // namespace cascade
