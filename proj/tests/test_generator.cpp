#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"

#include "cascade/errors.hpp"
#include "cascade/generator.hpp"

using namespace cascade;

namespace {

const char* kCanonicalJson = R"({
  "b": 2,
  "label": "canonical-signed",
  "iid_marginal": { "values": [0.6875, -0.25], "probs": [0.8, 0.2] },
  "l": "uniform"
})";

const char* kMultinomialJson = R"({
  "b": 2,
  "label": "multinomial-quarter",
  "atoms": [ { "w": [0.25, 0.75], "l": [0.5, 0.5], "p": 1.0 } ]
})";

}  // namespace

TEST_CASE("iid marginal form expands to the product law") {
  GeneratorSpec spec = parse_spec(kCanonicalJson);
  CHECK(spec.b == 2);
  REQUIRE(spec.atoms.size() == 4);

  std::vector<double> probs;
  double esw = 0.0;
  for (const auto& a : spec.atoms) {
    REQUIRE(a.w.size() == 2);
    REQUIRE(a.l.size() == 2);
    CHECK(a.l[0] == doctest::Approx(0.5));
    CHECK(a.l[1] == doctest::Approx(0.5));
    probs.push_back(a.p);
    esw += a.p * (a.w[0] + a.w[1]);
  }
  std::sort(probs.begin(), probs.end());
  CHECK(probs[0] == doctest::Approx(0.04));
  CHECK(probs[1] == doctest::Approx(0.16));
  CHECK(probs[2] == doctest::Approx(0.16));
  CHECK(probs[3] == doctest::Approx(0.64));
  CHECK(esw == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("single-atom conservative law parses") {
  GeneratorSpec spec = parse_spec(kMultinomialJson);
  CHECK(spec.atoms.size() == 1);
  CHECK(is_conservative(spec));
}

TEST_CASE("length entry equal to 1 is rejected naming the field") {
  const char* bad = R"({
    "b": 2, "label": "bad",
    "atoms": [ { "w": [0.25, 0.75], "l": [1.0, 0.5], "p": 1.0 } ]
  })";
  try {
    parse_spec(bad);
    FAIL("expected InvariantError");
  } catch (const InvariantError& e) {
    CHECK(std::string(e.what()).find("l") != std::string::npos);
  }
}

TEST_CASE("malformed documents raise SchemaError") {
  CHECK_THROWS_AS(parse_spec("not json"), SchemaError);
  CHECK_THROWS_AS(parse_spec(R"({"label":"x"})"), SchemaError);
  CHECK_THROWS_AS(parse_spec(R"({"b":2,"label":"x"})"), SchemaError);
}

TEST_CASE("moment functional on reference laws") {
  GeneratorSpec canonical = parse_spec(kCanonicalJson);
  GeneratorSpec multinomial = parse_spec(kMultinomialJson);
  CHECK(moment(multinomial, 1.0, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(moment(canonical, 1.0, 0.0) == doctest::Approx(1.2).epsilon(1e-12));
  // t = -1 with l = 1/b turns each term into l_j itself, so the sum is E(sum L) = 1
  CHECK(moment(canonical, 0.0, -1.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("log-moment exponents") {
  GeneratorSpec canonical = parse_spec(kCanonicalJson);
  GeneratorSpec multinomial = parse_spec(kMultinomialJson);
  CHECK(phi_u(canonical, Side::W, 2.0) == doctest::Approx(-std::log2(0.78125)).epsilon(1e-12));
  CHECK(phi_u(canonical, Side::W, 2.0) == doctest::Approx(0.35614).epsilon(1e-4));
  CHECK(phi_u(canonical, Side::W, 1.0) == doctest::Approx(-std::log2(1.2)).epsilon(1e-12));
  CHECK(phi_u(multinomial, Side::L, 1.0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("assumption report for the canonical law") {
  AssumptionReport rep = check_assumptions(parse_spec(kCanonicalJson));
  CHECK(rep.a1_holds);
  CHECK(rep.a1_witness_p > 1.0);
  CHECK(rep.a1_witness_p <= 2.0 + 1e-9);
  // phi_W increases towards p = 2 on the bracket, so the witness sits there
  CHECK(rep.a1_witness_p == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(rep.a2_holds);
  CHECK(rep.a3_holds);
  CHECK_FALSE(rep.conservative);
  CHECK(rep.violations.empty());
}

TEST_CASE("assumption report flags conservative laws") {
  AssumptionReport rep = check_assumptions(parse_spec(kMultinomialJson));
  CHECK(rep.conservative);
  CHECK_FALSE(rep.a3_holds);
}

TEST_CASE("zero branch weight fails the positivity clause") {
  const char* spec_text = R"({
    "b": 2, "label": "zero-branch",
    "atoms": [ { "w": [0.0, 1.0], "l": [0.5, 0.5], "p": 1.0 } ]
  })";
  AssumptionReport rep = check_assumptions(parse_spec(spec_text));
  CHECK_FALSE(rep.a3_holds);
  bool found = false;
  for (const auto& v : rep.violations)
    if (v.find("|W_j|>0 fails") != std::string::npos) found = true;
  CHECK(found);
}

TEST_CASE("moment is strictly increasing in t") {
  GeneratorSpec spec = parse_spec(kCanonicalJson);
  for (double q : {-2.0, -0.5, 0.0, 1.0, 2.5}) {
    for (double t : {-3.0, -1.0, 0.0, 0.7, 2.0}) {
      CHECK(moment(spec, q, t) < moment(spec, q, t + 0.25));
    }
  }
}

TEST_CASE("moment is log-convex in q") {
  GeneratorSpec spec = parse_spec(kCanonicalJson);
  for (double t : {-1.0, 0.0, 1.0}) {
    for (double q : {-3.0, -1.0, 0.5, 2.0}) {
      double mid = std::log(moment(spec, q + 0.5, t));
      double avg = 0.5 * (std::log(moment(spec, q, t)) + std::log(moment(spec, q + 1.0, t)));
      CHECK(mid <= avg + 1e-12);
    }
  }
}

TEST_CASE("phi_W is concave in p") {
  GeneratorSpec spec = parse_spec(kCanonicalJson);
  for (double p : {-2.0, -0.5, 0.5, 1.5, 3.0}) {
    double mid = phi_u(spec, Side::W, p + 0.5);
    double avg = 0.5 * (phi_u(spec, Side::W, p) + phi_u(spec, Side::W, p + 1.0));
    CHECK(mid >= avg - 1e-12);
  }
}
