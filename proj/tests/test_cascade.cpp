#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"

#include "cascade/errors.hpp"
#include "cascade/generator.hpp"
#include "cascade/realization.hpp"
#include "cascade/rng.hpp"
#include "cascade/trace.hpp"
#include "cascade/word.hpp"

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

}  // namespace

TEST_CASE("depth-0 realization yields the single-segment trace") {
  CascadeRealization real = sample(canonical_spec(), 7, 0);
  FunctionTrace trace = build_trace(real, 0, 0);
  REQUIRE(trace.FW_at.size() == 2);
  CHECK(trace.FW_at[0] == 0.0);
  CHECK(trace.FW_at[1] == 1.0);
  CHECK(trace.FL_at[0] == 0.0);
  CHECK(trace.FL_at[1] == 1.0);
}

TEST_CASE("node draws are traversal-order independent") {
  GeneratorSpec spec = canonical_spec();
  CascadeRealization a = sample(spec, 42, 8);
  CascadeRealization b = sample(spec, 42, 8);
  const std::uint64_t n = level_count(2, 7);
  std::vector<int> forward, backward(n);
  forward.reserve(n);
  for (std::uint64_t k = 0; k < n; ++k) forward.push_back(a.atom_index(Word{7, k}));
  for (std::uint64_t k = n; k-- > 0;) backward[k] = b.atom_index(Word{7, k});
  CHECK(forward == backward);
}

TEST_CASE("traces are bit-identical across rebuilds") {
  GeneratorSpec spec = canonical_spec();
  FunctionTrace t1 = build_trace(sample(spec, 9, 10), 8, 2);
  FunctionTrace t2 = build_trace(sample(spec, 9, 10), 8, 2);
  CHECK(t1.FW_at == t2.FW_at);
  CHECK(t1.FL_at == t2.FL_at);
  CHECK(t1.osc_W == t2.osc_W);
  CHECK(t1.osc_L == t2.osc_L);
}

TEST_CASE("every sampled node is one of the spec atoms") {
  GeneratorSpec spec = canonical_spec();
  CascadeRealization real = sample(spec, 3, 12);
  for (std::uint64_t k = 0; k < 200; ++k) {
    Word w{11, (k * 2654435761u) % level_count(2, 11)};
    const Atom& atom = real.node(w);
    bool member = false;
    for (const auto& a : spec.atoms) member = member || (a.w == atom.w && a.l == atom.l);
    CHECK(member);
  }
}

TEST_CASE("weight products telescope") {
  GeneratorSpec spec = canonical_spec();
  CascadeRealization real = sample(spec, 12, 6);

  CHECK(weight_product(real, Word::root(), Word::root()) == std::pair{1.0, 1.0});

  // brute-force oracle: multiply node entries digit by digit
  for (std::uint64_t pi = 0; pi < 4; ++pi) {
    Word prefix{2, pi};
    for (std::uint64_t ui = 0; ui < 16; ++ui) {
      Word u{4, ui};
      double w = 1.0, l = 1.0;
      Word at = prefix;
      for (std::uint32_t i = 0; i < u.length; ++i) {
        unsigned d = u.digit(2, i);
        const Atom& atom = real.node(at);
        w *= atom.w[d];
        l *= atom.l[d];
        at = at.child(2, d);
      }
      auto [pw, pl] = weight_product(real, prefix, u);
      CHECK(pw == doctest::Approx(w).epsilon(1e-15));
      CHECK(pl == doctest::Approx(l).epsilon(1e-15));
    }
  }

  CHECK_THROWS_AS(weight_product(real, Word{4, 0}, Word{4, 0}), DepthError);
}

TEST_CASE("conservative laws telescope to exact endpoint values") {
  GeneratorSpec spec = multinomial_spec();
  for (int tail : {0, 3}) {
    FunctionTrace trace = build_trace(sample(spec, 5, 8 + tail), 8, tail);
    CHECK(trace.FW_at.back() == 1.0);
    CHECK(trace.FL_at.back() == 1.0);
  }
}

TEST_CASE("partial sums at 1 are mean-one across seeds") {
  GeneratorSpec spec = canonical_spec();
  const int n_seeds = 200;
  double mean = 0.0, m2 = 0.0;
  for (int s = 0; s < n_seeds; ++s) {
    FunctionTrace trace = build_trace(sample(spec, rng::derive_stream(77, s), 10), 10, 0);
    double y = trace.FW_at.back();
    double delta = y - mean;
    mean += delta / (s + 1);
    m2 += delta * (y - mean);
  }
  double se = std::sqrt(m2 / (n_seeds - 1.0) / n_seeds);
  CHECK(std::abs(mean - 1.0) <= 3.0 * se);
}

TEST_CASE("oscillation dominates the endpoint increment") {
  FunctionTrace trace = build_trace(sample(canonical_spec(), 3, 10), 8, 2);
  for (int j = 0; j <= trace.depth; ++j) {
    const std::uint64_t cells = level_count(2, j);
    const std::uint64_t step = level_count(2, trace.depth - j);
    for (std::uint64_t k = 0; k < cells; ++k) {
      double incr_w = std::abs(trace.FW_at[(k + 1) * step] - trace.FW_at[k * step]);
      double incr_l = trace.FL_at[(k + 1) * step] - trace.FL_at[k * step];
      CHECK(trace.osc_W[static_cast<std::size_t>(j)][k] >= incr_w - 1e-14);
      CHECK(trace.osc_L[static_cast<std::size_t>(j)][k] >= incr_l - 1e-14);
    }
  }
}

TEST_CASE("root oscillation spans the stored grid") {
  FunctionTrace trace = build_trace(sample(canonical_spec(), 11, 8), 8, 0);
  double mn = trace.FW_at[0], mx = trace.FW_at[0];
  for (double v : trace.FW_at) {
    mn = std::min(mn, v);
    mx = std::max(mx, v);
  }
  CHECK(trace.osc_W[0][0] == mx - mn);
}

TEST_CASE("composed graph endpoints") {
  GeneratorSpec spec = multinomial_spec();
  FunctionTrace trace = build_trace(sample(spec, 4, 6), 6, 0);
  auto pts = compose_F(trace);
  REQUIRE(pts.size() == trace.FL_at.size());
  CHECK(pts[0][0] == 0.0);
  CHECK(pts[0][1] == 0.0);
  const double dx = 1.0 / 64.0;
  for (std::size_t k = 0; k < pts.size(); ++k) CHECK(pts[k][0] == static_cast<double>(k) * dx);

  FunctionTrace ctrace = build_trace(sample(canonical_spec(), 4, 6), 6, 0);
  auto cpts = compose_F(ctrace);
  CHECK(cpts.back()[0] == ctrace.fl_total());
  double mn = 1e300, mx = -1e300;
  for (double v : ctrace.FW_at) {
    mn = std::min(mn, v);
    mx = std::max(mx, v);
  }
  for (const auto& p : cpts) {
    CHECK(p[1] >= mn);
    CHECK(p[1] <= mx);
  }
}

TEST_CASE("rescaled subtree increments match the root law") {
  // two-sample Kolmogorov-Smirnov at significance 0.01: the increment of F_W
  // over the first half, versus the normalized increment of the subtree at a
  // fixed level-2 word over its first half (four remaining levels each)
  GeneratorSpec spec = canonical_spec();
  const int m = 80;
  std::vector<double> root_sample, sub_sample;
  for (int s = 0; s < m; ++s) {
    FunctionTrace t4 = build_trace(sample(spec, rng::derive_stream(501, s), 4), 4, 0);
    root_sample.push_back(t4.FW_at[8]);
  }
  const Word w{2, 1};
  for (int s = 0; s < m; ++s) {
    CascadeRealization real = sample(spec, rng::derive_stream(907, s), 6);
    FunctionTrace t6 = build_trace(real, 6, 0);
    double ww = weight_product(real, Word::root(), w).first;
    REQUIRE(ww != 0.0);
    sub_sample.push_back((t6.FW_at[24] - t6.FW_at[16]) / ww);
  }
  std::sort(root_sample.begin(), root_sample.end());
  std::sort(sub_sample.begin(), sub_sample.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < root_sample.size() && j < sub_sample.size()) {
    if (root_sample[i] <= sub_sample[j])
      ++i;
    else
      ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / m - static_cast<double>(j) / m));
  }
  const double threshold = 1.628 * std::sqrt(2.0 / m);  // c(0.01) * sqrt((m+n)/(mn))
  CHECK(d <= threshold);
}

TEST_CASE("trace CSV uses the fixed header") {
  FunctionTrace trace = build_trace(sample(multinomial_spec(), 1, 3), 3, 0);
  std::string csv = trace_csv(trace);
  CHECK(csv.rfind("level,k,x,FW,FL,oscW,oscL\n", 0) == 0);
  // one row per cell of every level plus the header
  std::size_t rows = static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n'));
  CHECK(rows == 1 + 1 + 2 + 4 + 8);
}

TEST_CASE("sampling guard rejects oversized trees") {
  CHECK_THROWS_AS(sample(canonical_spec(), 1, 40), CapacityError);
}
