#include <cmath>
#include <vector>

#include "doctest.h"

#include "cascade/generator.hpp"
#include "cascade/spectrum.hpp"

using namespace cascade;

namespace {

GeneratorSpec canonical_spec() {
  return parse_spec(R"({
    "b": 2, "label": "canonical-signed",
    "iid_marginal": { "values": [0.6875, -0.25], "probs": [0.8, 0.2] },
    "l": "uniform"
  })");
}

GeneratorSpec multinomial_spec() {
  return parse_spec(R"({
    "b": 2, "label": "multinomial-quarter",
    "atoms": [ { "w": [0.25, 0.75], "l": [0.5, 0.5], "p": 1.0 } ]
  })");
}

std::vector<double> grid(double lo, double hi, double step) {
  std::vector<double> qs;
  for (double q = lo; q <= hi + 1e-12; q += step) qs.push_back(q);
  return qs;
}

}  // namespace

TEST_CASE("structure function closed form for the multinomial law") {
  GeneratorSpec spec = multinomial_spec();
  CHECK(tau(spec, 2.0) == doctest::Approx(-std::log2(0.625)).epsilon(1e-12));
  CHECK(tau(spec, 2.0) == doctest::Approx(0.67807).epsilon(1e-4));
  for (double q : grid(-5.0, 5.0, 0.25)) {
    double closed = -std::log2(std::pow(0.25, q) + std::pow(0.75, q));
    CHECK(std::abs(tau(spec, q) - closed) <= 1e-10);
  }
}

TEST_CASE("structure function values for the canonical law") {
  GeneratorSpec spec = canonical_spec();
  CHECK(tau(spec, 1.0) == doctest::Approx(-std::log2(1.2)).epsilon(1e-12));
  CHECK(tau(spec, 0.0) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("analytic derivative matches finite differences") {
  for (GeneratorSpec spec : {canonical_spec(), multinomial_spec()}) {
    for (double q : grid(-5.0, 5.0, 0.5)) {
      double tp = spectrum_point(spec, q).tau_prime;
      double fd = (tau(spec, q + 1e-5) - tau(spec, q - 1e-5)) / 2e-5;
      CHECK(std::abs(tp - fd) / (1.0 + std::abs(tp)) <= 1e-6);
    }
  }
}

TEST_CASE("spectrum point internal identities") {
  for (GeneratorSpec spec : {canonical_spec(), multinomial_spec()}) {
    for (double q : grid(-4.0, 4.0, 0.5)) {
      SpectrumPoint pt = spectrum_point(spec, q);
      CHECK(std::abs(moment(spec, q, pt.tau) - 1.0) <= 1e-10);
      CHECK(pt.xi_tilde > 0.0);
      CHECK(pt.tau_prime == doctest::Approx(pt.xi / pt.xi_tilde).epsilon(1e-10));
      CHECK(pt.tau_star == doctest::Approx(pt.gamma / pt.xi_tilde).epsilon(1e-9));
    }
  }
}

TEST_CASE("Legendre transform special values") {
  GeneratorSpec spec = canonical_spec();
  SpectrumPoint p0 = spectrum_point(spec, 0.0);
  CHECK(tau_star(spec, p0.tau_prime) == doctest::Approx(-tau(spec, 0.0)).epsilon(1e-8));
  CHECK(tau_star(spec, p0.tau_prime) == doctest::Approx(1.0).epsilon(1e-8));
  SpectrumPoint p1 = spectrum_point(spec, 1.0);
  CHECK(tau_star(spec, p1.tau_prime) ==
        doctest::Approx(p1.tau_prime - tau(spec, 1.0)).epsilon(1e-8));
}

TEST_CASE("Legendre transform matches a dense grid minimization") {
  GeneratorSpec spec = multinomial_spec();
  double h = spectrum_point(spec, 2.0).tau_prime;
  double best = 1e300;
  for (double q = -20.0; q <= 20.0; q += 1e-3) best = std::min(best, q * h - tau(spec, q));
  CHECK(tau_star(spec, h) == doctest::Approx(best).epsilon(1e-6));
}

TEST_CASE("Legendre involution on the interior grid") {
  for (GeneratorSpec spec : {canonical_spec(), multinomial_spec()}) {
    IntervalJ J = interval_J(spec);
    for (double q : grid(-5.0, 5.0, 0.25)) {
      if (!J.contains(q)) continue;
      SpectrumPoint pt = spectrum_point(spec, q);
      CHECK(std::abs(tau_star(spec, pt.tau_prime) - (q * pt.tau_prime - tau(spec, q))) <= 1e-8);
    }
  }
}

TEST_CASE("interval J for the canonical law is right-unbounded") {
  GeneratorSpec spec = canonical_spec();
  IntervalJ J = interval_J(spec);
  CHECK(J.contains(1.0));
  CHECK(std::isfinite(J.q_lo));
  CHECK(std::isinf(J.q_hi));
  SpectrumPoint at_lo = spectrum_point(spec, J.q_lo);
  CHECK(std::abs(J.q_lo * at_lo.tau_prime - at_lo.tau) <= 1e-6);
}

TEST_CASE("interval J for the multinomial law is bounded") {
  GeneratorSpec spec = multinomial_spec();
  IntervalJ J = interval_J(spec);
  CHECK(std::isfinite(J.q_lo));
  CHECK(std::isfinite(J.q_hi));
  CHECK(J.q_lo < 0.0);
  CHECK(J.q_hi > 1.0);
  // dense-grid cross-check: positivity holds strictly inside, fails outside
  for (double q : grid(J.q_lo + 0.05, J.q_hi - 0.05, 0.37)) {
    SpectrumPoint pt = spectrum_point(spec, q);
    CHECK(q * pt.tau_prime - pt.tau > 0.0);
  }
  SpectrumPoint beyond = spectrum_point(spec, J.q_hi + 1.0);
  CHECK((J.q_hi + 1.0) * beyond.tau_prime - beyond.tau <= 1e-9);
}

TEST_CASE("predicted spectra at reference exponents") {
  GeneratorSpec spec = canonical_spec();
  SpectrumPoint p1 = spectrum_point(spec, 1.0);
  PredictedSpectra ps = predicted_spectra(spec, p1.tau_prime);
  CHECK(ps.dim_graph_whole == doctest::Approx(1.0 + std::log2(1.2)).epsilon(1e-9));
  CHECK(ps.dim_graph_whole == doctest::Approx(1.26303).epsilon(1e-4));
  CHECK(ps.dimL == doctest::Approx(-tau(spec, 1.0)).epsilon(1e-9));
  CHECK(ps.dimL == doctest::Approx(0.26303).epsilon(1e-4));
}

TEST_CASE("graph formula at the fixed point tau_star(h) = h") {
  // for the conservative reference tau(1) = 0, so h = tau'(1) satisfies
  // tau_star(h) = h and both branches of the min hit 1
  GeneratorSpec spec = multinomial_spec();
  SpectrumPoint p1 = spectrum_point(spec, 1.0);
  CHECK(tau(spec, 1.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(tau_star(spec, p1.tau_prime) == doctest::Approx(p1.tau_prime).epsilon(1e-8));
  PredictedSpectra ps = predicted_spectra(spec, p1.tau_prime);
  CHECK(ps.dimG == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("upper bound formulas") {
  UpperBoundValues u1 = upper_bounds(1.0, 1.0, 1.0);
  CHECK(u1.graphUB == doctest::Approx(1.0));
  CHECK(u1.rangeUB == doctest::Approx(1.0));
  CHECK(u1.levelUB == doctest::Approx(0.0));

  UpperBoundValues u2 = upper_bounds(0.5, 0.5, 1.0);
  CHECK(u2.graphUB == doctest::Approx(1.0));
  CHECK(u2.rangeUB == doctest::Approx(1.0));
  CHECK(u2.levelUB == doctest::Approx(0.0));

  const double beta = 0.5;
  UpperBoundValues u3 = upper_bounds(1.0, beta, 0.0);
  CHECK(u3.graphUB == doctest::Approx(2.0 - beta));
}

TEST_CASE("structure function is concave") {
  for (GeneratorSpec spec : {canonical_spec(), multinomial_spec()}) {
    const double step = 0.1;
    for (double q : grid(-5.0, 5.0 - 2 * step, step)) {
      double second = tau(spec, q) - 2.0 * tau(spec, q + step) + tau(spec, q + 2 * step);
      CHECK(second <= 1e-9);
    }
  }
}

TEST_CASE("dimension exponents satisfy the composition identity") {
  for (GeneratorSpec spec : {canonical_spec(), multinomial_spec()}) {
    IntervalJ J = interval_J(spec);
    for (double q : grid(-5.0, 5.0, 0.25)) {
      if (!J.contains(q)) continue;
      SpectrumPoint pt = spectrum_point(spec, q);
      CHECK(pt.gammaR > 0.0);
      CHECK(pt.gammaR <= 1.0 + 1e-12);
      double ly = pt.tau_star + pt.gammaR * std::max(0.0, 1.0 - pt.tau_prime);
      CHECK(pt.gammaG == doctest::Approx(ly).epsilon(1e-9));
      CHECK(pt.gammaG >= pt.gammaR * std::min(1.0, pt.tau_prime) - 1e-12);
    }
  }
}

TEST_CASE("subinterval classification is a partition of J") {
  for (GeneratorSpec spec : {canonical_spec(), multinomial_spec()}) {
    IntervalJ J = interval_J(spec);
    REQUIRE_FALSE(J.segments.empty());
    for (double q : grid(-5.0, 5.0, 0.2)) {
      if (!J.contains(q)) continue;
      int hits = 0;
      JClass seg_label = JClass::J1;
      for (const auto& seg : J.segments) {
        if (q > seg.lo && q <= seg.hi) {
          ++hits;
          seg_label = seg.label;
        }
      }
      CHECK(hits == 1);
      CHECK(seg_label == classify(spectrum_point(spec, q)));
    }
  }
}
