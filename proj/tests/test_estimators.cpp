#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"

#include "cascade/errors.hpp"
#include "cascade/estimators.hpp"
#include "cascade/spectrum.hpp"
#include "cascade/trace.hpp"

using namespace cascade;

namespace {

// exact identity function on the dyadic grid, all envelope tables filled
FunctionTrace identity_trace(int depth) {
  FunctionTrace tr;
  tr.b = 2;
  tr.depth = depth;
  tr.tail_depth = 0;
  const std::uint64_t n = 1ull << depth;
  tr.FW_at.resize(n + 1);
  tr.FL_at.resize(n + 1);
  for (std::uint64_t k = 0; k <= n; ++k) {
    double x = std::ldexp(static_cast<double>(k), -depth);
    tr.FW_at[k] = x;
    tr.FL_at[k] = x;
  }
  tr.osc_W.resize(depth + 1);
  tr.osc_L.resize(depth + 1);
  tr.min_W.resize(depth + 1);
  tr.max_W.resize(depth + 1);
  for (int j = 0; j <= depth; ++j) {
    const std::uint64_t cells = 1ull << j;
    const double w = std::ldexp(1.0, -j);
    tr.osc_W[j].assign(cells, w);
    tr.osc_L[j].assign(cells, w);
    tr.min_W[j].resize(cells);
    tr.max_W[j].resize(cells);
    for (std::uint64_t k = 0; k < cells; ++k) {
      tr.min_W[j][k] = static_cast<double>(k) * w;
      tr.max_W[j][k] = static_cast<double>(k + 1) * w;
    }
  }
  return tr;
}

FunctionTrace flat_trace(int depth) {
  FunctionTrace tr = identity_trace(depth);
  for (auto& v : tr.FW_at) v = 0.0;
  for (int j = 0; j <= depth; ++j) {
    tr.osc_W[j].assign(tr.osc_W[j].size(), 0.0);
    tr.min_W[j].assign(tr.min_W[j].size(), 0.0);
    tr.max_W[j].assign(tr.max_W[j].size(), 0.0);
  }
  return tr;
}

}  // namespace

TEST_CASE("least squares on exact lines") {
  ScalingFit fit = ols_fit({0, 1, 2, 3}, {2, 5, 8, 11});
  CHECK(fit.slope == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_FALSE(fit.low_r2);

  ScalingFit flat = ols_fit({0, 1, 2}, {5, 5, 5});
  CHECK(flat.slope == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(flat.r2 == 1.0);
}

TEST_CASE("oscillation spectrum of the identity is q minus one") {
  FunctionTrace tr = identity_trace(10);
  std::vector<double> qs = {0.0, 0.5, 1.0, 2.0};
  auto fits = lq_spectrum(tr, qs, 2, 8);
  REQUIRE(fits.size() == qs.size());
  for (std::size_t i = 0; i < qs.size(); ++i) {
    CHECK(fits[i].slope == doctest::Approx(qs[i] - 1.0).epsilon(1e-9));
    CHECK(fits[i].r2 == doctest::Approx(1.0).epsilon(1e-9));
  }
  // affine exponent estimates have vanishing second differences
  std::vector<double> dense_q = {0.0, 0.25, 0.5, 0.75, 1.0};
  auto dense = lq_spectrum(tr, dense_q, 2, 8);
  for (std::size_t i = 1; i + 1 < dense.size(); ++i) {
    double second = dense[i + 1].slope - 2.0 * dense[i].slope + dense[i - 1].slope;
    CHECK(std::abs(second) <= 1e-9);
  }
}

TEST_CASE("degenerate windows and flat functions are rejected") {
  FunctionTrace tr = identity_trace(10);
  CHECK_THROWS_AS(lq_spectrum(tr, {1.0}, 5, 6), DegenerateError);
  CHECK_THROWS_AS(lq_spectrum(flat_trace(8), {1.0}, 2, 6), DegenerateError);
  std::vector<int> levels = {1, 2, 3, 4};
  std::vector<std::int64_t> zeros = {0, 0, 0, 0};
  CHECK_THROWS_AS(fit_dimension(levels, zeros, 1, 4), DegenerateError);
}

TEST_CASE("graph covering of the identity scales like dimension one") {
  FunctionTrace tr = identity_trace(10);
  BoxCountResult res = box_count_graph(tr, 2, 8);
  REQUIRE(res.levels.size() == static_cast<std::size_t>(tr.depth));
  for (std::size_t i = 0; i < res.levels.size(); ++i)
    CHECK(res.counts[i] == 2ll << res.levels[i]);  // 2 squares per column
  CHECK(res.fit.slope == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(res.fit.r2 == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("range covering of the identity scales like dimension one") {
  FunctionTrace tr = identity_trace(10);
  BoxCountResult res = box_count_range(tr, 2, 8);
  for (std::size_t i = 0; i < res.levels.size(); ++i) {
    int j = res.levels[i];
    CHECK(res.counts[i] == (1ll << j) + 1);  // bins k..k+1 per cell, merged
  }
  // log2(2^j + 1) flattens the small-j end, so the window OLS sits below 1
  CHECK(res.fit.slope == doctest::Approx(1.0).epsilon(0.06));

  BoxCountResult graph = box_count_graph(tr, 2, 8);
  for (std::size_t i = 0; i < res.counts.size(); ++i) CHECK(res.counts[i] <= graph.counts[i]);
}

TEST_CASE("level sets of a strictly increasing function are points") {
  FunctionTrace tr = identity_trace(10);
  BoxCountResult res = box_count_levelset(tr, 0.3, 0.0, 2, 8);
  for (std::size_t i = 0; i < res.levels.size(); ++i) {
    CHECK(res.counts[i] >= 1);
    CHECK(res.counts[i] <= 2);  // a single crossing meets at most two columns
  }
  CHECK(std::abs(res.fit.slope) <= 0.05);
  CHECK_THROWS_AS(box_count_levelset(tr, 2.0, 0.0, 2, 8), OutOfRangeError);
}

TEST_CASE("projection covering of the identity graph scales like a segment") {
  FunctionTrace tr = identity_trace(10);
  BoxCountResult res = box_count_projection(tr, 0.5, 2, 8);
  CHECK(res.fit.slope == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("dimension fits on synthetic counts") {
  std::vector<int> levels;
  std::vector<std::int64_t> pow2, constant, frac;
  for (int j = 1; j <= 14; ++j) {
    levels.push_back(j);
    pow2.push_back(1ll << j);
    constant.push_back(7);
    frac.push_back(static_cast<std::int64_t>(std::llround(std::pow(2.0, 1.263 * j))));
  }
  ScalingFit f1 = fit_dimension(levels, pow2, 1, 14);
  CHECK(f1.slope == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f1.r2 == doctest::Approx(1.0).epsilon(1e-12));
  ScalingFit f0 = fit_dimension(levels, constant, 1, 14);
  CHECK(f0.slope == doctest::Approx(0.0).epsilon(1e-12));
  ScalingFit fd = fit_dimension(levels, frac, 1, 14);
  CHECK(fd.slope == doctest::Approx(1.263).epsilon(0.01));
}

TEST_CASE("numeric Legendre transform tracks the exact one") {
  GeneratorSpec spec = parse_spec(R"({
    "b": 2, "label": "multinomial-quarter",
    "atoms": [ { "w": [0.25, 0.75], "l": [0.5, 0.5], "p": 1.0 } ]
  })");
  std::vector<double> qs, taus;
  for (double q = -3.0; q <= 3.0 + 1e-12; q += 0.05) {
    qs.push_back(q);
    taus.push_back(tau(spec, q));
  }
  LegendreEstimate est = legendre_numeric(qs, taus);
  REQUIRE(est.h.size() == est.d.size());
  REQUIRE(est.h.size() >= 2);
  CHECK_FALSE(est.low_confidence);
  for (std::size_t i = 0; i < est.h.size(); ++i)
    CHECK(est.d[i] == doctest::Approx(tau_star(spec, est.h[i])).epsilon(1e-3));
}

TEST_CASE("numeric Legendre transform of an affine exponent collapses") {
  std::vector<double> qs = {-2, -1, 0, 1, 2};
  std::vector<double> taus;
  for (double q : qs) taus.push_back(q - 1.0);
  LegendreEstimate est = legendre_numeric(qs, taus);
  REQUIRE(est.h.size() == 1);
  CHECK(est.h[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(est.d[0] == doctest::Approx(1.0).epsilon(1e-12));

  LegendreEstimate tiny = legendre_numeric({1.0}, {0.0});
  CHECK(tiny.low_confidence);
  CHECK(tiny.h.empty());

  LegendreEstimate three = legendre_numeric({0.0, 1.0, 2.0}, {-1.0, 0.0, 0.5});
  CHECK(three.low_confidence);
}
