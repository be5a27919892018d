#include "cascade/generator.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "cascade/errors.hpp"
#include "json.hpp"

namespace cascade {

namespace {

using nlohmann::json;

double checked_number(const json& j, const std::string& field) {
  if (!j.is_number()) throw SchemaError(field + " must be a number");
  return j.get<double>();
}

std::vector<double> checked_vector(const json& j, const std::string& field, std::size_t len) {
  if (!j.is_array() || j.size() != len)
    throw SchemaError(field + " must be an array of length " + std::to_string(len));
  std::vector<double> out;
  out.reserve(len);
  for (const auto& e : j) out.push_back(checked_number(e, field));
  return out;
}

void validate(const GeneratorSpec& spec) {
  if (spec.b < 2) throw InvariantError("b must be >= 2");
  if (spec.atoms.empty()) throw SchemaError("atoms must be non-empty");
  double psum = 0.0, ew = 0.0, el = 0.0;
  for (const Atom& a : spec.atoms) {
    if (a.p <= 0.0) throw InvariantError("p: every atom probability must be > 0");
    psum += a.p;
    for (double lj : a.l) {
      if (!(lj > 0.0 && lj < 1.0)) throw InvariantError("l: entries must lie in (0,1)");
      el += a.p * lj;
    }
    for (double wj : a.w) ew += a.p * wj;
  }
  if (std::abs(psum - 1.0) > 1e-12) throw InvariantError("p: probabilities must sum to 1");
  if (std::abs(el - 1.0) > 1e-9) throw InvariantError("l: E(sum L_j) must equal 1");
  if (std::abs(ew - 1.0) > 1e-9) throw InvariantError("w: E(sum W_j) must equal 1");
}

GeneratorSpec from_json(const json& doc) {
  if (!doc.is_object()) throw SchemaError("document must be a JSON object");
  GeneratorSpec spec;
  if (!doc.contains("b") || !doc["b"].is_number_integer())
    throw SchemaError("b: required integer field");
  spec.b = doc["b"].get<int>();
  if (!doc.contains("label") || !doc["label"].is_string())
    throw SchemaError("label: required string field");
  spec.label = doc["label"].get<std::string>();
  if (spec.b < 2) throw InvariantError("b must be >= 2");

  const std::size_t b = static_cast<std::size_t>(spec.b);
  if (doc.contains("atoms")) {
    if (!doc["atoms"].is_array()) throw SchemaError("atoms must be an array");
    for (const auto& aj : doc["atoms"]) {
      Atom a;
      if (!aj.is_object()) throw SchemaError("atoms: entries must be objects");
      if (!aj.contains("w") || !aj.contains("l") || !aj.contains("p"))
        throw SchemaError("atoms: entries need fields w, l, p");
      a.w = checked_vector(aj["w"], "w", b);
      a.l = checked_vector(aj["l"], "l", b);
      a.p = checked_number(aj["p"], "p");
      spec.atoms.push_back(std::move(a));
    }
  } else if (doc.contains("iid_marginal")) {
    const auto& im = doc["iid_marginal"];
    if (!im.is_object() || !im.contains("values") || !im.contains("probs"))
      throw SchemaError("iid_marginal: needs fields values and probs");
    if (!im["values"].is_array() || !im["probs"].is_array() ||
        im["values"].size() != im["probs"].size() || im["values"].empty())
      throw SchemaError("iid_marginal: values and probs must be equal-length non-empty arrays");
    if (!doc.contains("l") || !doc["l"].is_string() || doc["l"].get<std::string>() != "uniform")
      throw SchemaError("l: iid_marginal form requires l = \"uniform\"");
    std::vector<double> values, probs;
    for (const auto& v : im["values"]) values.push_back(checked_number(v, "iid_marginal.values"));
    for (const auto& p : im["probs"]) probs.push_back(checked_number(p, "iid_marginal.probs"));
    double ps = 0.0;
    for (double p : probs) {
      if (p <= 0.0) throw InvariantError("iid_marginal.probs: entries must be > 0");
      ps += p;
    }
    if (std::abs(ps - 1.0) > 1e-12)
      throw InvariantError("iid_marginal.probs: must sum to 1");

    const std::size_t k = values.size();
    double count = std::pow(static_cast<double>(k), static_cast<double>(b));
    if (count > 4096.0)
      throw CapacityError("iid_marginal: product law has more than 4096 atoms");
    const std::size_t n_atoms = static_cast<std::size_t>(count);
    const double lu = 1.0 / static_cast<double>(spec.b);
    for (std::size_t idx = 0; idx < n_atoms; ++idx) {
      Atom a;
      a.w.resize(b);
      a.l.assign(b, lu);
      a.p = 1.0;
      // branch 0 takes the most significant base-k digit
      std::size_t rem = idx;
      for (std::size_t j = b; j-- > 0;) {
        std::size_t d = rem % k;
        rem /= k;
        a.w[j] = values[d];
        a.p *= probs[d];
      }
      spec.atoms.push_back(std::move(a));
    }
  } else {
    throw SchemaError("document needs either atoms or iid_marginal");
  }

  validate(spec);
  return spec;
}

}  // namespace

GeneratorSpec parse_spec(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what());
  }
  return from_json(doc);
}

GeneratorSpec parse_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open spec file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_spec(buf.str());
}

double moment(const GeneratorSpec& spec, double q, double t) {
  double sum = 0.0;
  for (const Atom& a : spec.atoms) {
    double inner = 0.0;
    for (int j = 0; j < spec.b; ++j) {
      double wj = a.w[static_cast<std::size_t>(j)];
      if (wj == 0.0) continue;
      inner += std::pow(std::abs(wj), q) * std::pow(a.l[static_cast<std::size_t>(j)], -t);
    }
    sum += a.p * inner;
  }
  return sum;
}

double phi_u(const GeneratorSpec& spec, Side side, double p) {
  double sum = 0.0;
  for (const Atom& a : spec.atoms) {
    double inner = 0.0;
    for (int j = 0; j < spec.b; ++j) {
      if (side == Side::W) {
        double wj = a.w[static_cast<std::size_t>(j)];
        if (wj == 0.0) continue;
        inner += std::pow(std::abs(wj), p);
      } else {
        inner += std::pow(a.l[static_cast<std::size_t>(j)], p);
      }
    }
    sum += a.p * inner;
  }
  if (!(sum > 0.0)) throw DivergedError("moment sum is not positive");
  return -std::log(sum) / std::log(static_cast<double>(spec.b));
}

bool is_conservative(const GeneratorSpec& spec) {
  for (const Atom& a : spec.atoms) {
    double s = 0.0;
    for (double wj : a.w) s += wj;
    if (std::abs(s - 1.0) > 1e-12) return false;
  }
  return true;
}

namespace {

// Golden-section maximum of phi_W (concave in p) on [lo, hi].
double argmax_phi_w(const GeneratorSpec& spec, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = phi_u(spec, Side::W, c);
  double fd = phi_u(spec, Side::W, d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = phi_u(spec, Side::W, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = phi_u(spec, Side::W, d);
    }
  }
  return (a + b) / 2.0;
}

}  // namespace

AssumptionReport check_assumptions(const GeneratorSpec& spec) {
  AssumptionReport rep;
  rep.conservative = is_conservative(spec);

  // a1: witness exponent with phi_W > 0, plus strict L-contraction on average
  double hi = rep.conservative ? 8.0 : 2.0;
  double p_star = argmax_phi_w(spec, 1.0 + 1e-9, hi, 1e-9);
  double phi_star = phi_u(spec, Side::W, p_star);
  double el_log = 0.0;
  for (const Atom& a : spec.atoms)
    for (double lj : a.l) el_log += a.p * lj * std::log(lj);
  rep.a1_witness_p = p_star;
  bool a1_phi = phi_star > 0.0;
  bool a1_llog = el_log < 0.0;
  rep.a1_holds = a1_phi && a1_llog;
  if (!a1_phi)
    rep.violations.push_back("A1: max phi_W(p) on the search bracket is <= 0");
  if (!a1_llog)
    rep.violations.push_back("A1: E(sum L_j log L_j) >= 0");

  // a2: finiteness at a negative exponent and enough active branches
  double phi_neg = phi_u(spec, Side::W, -1.0);
  bool a2_finite = std::isfinite(phi_neg);
  bool a2_branches = true;
  for (std::size_t i = 0; i < spec.atoms.size(); ++i) {
    int nonzero = 0;
    for (double wj : spec.atoms[i].w)
      if (wj != 0.0) ++nonzero;
    if (nonzero < 2) {
      a2_branches = false;
      rep.violations.push_back("A2: atom " + std::to_string(i) +
                               " has fewer than 2 nonzero w-entries");
    }
  }
  if (!a2_finite) rep.violations.push_back("A2: phi_W(-1) is not finite");
  rep.a2_holds = a2_finite && a2_branches;

  // a3: non-conservative, strictly nonzero weights, finite phi_W everywhere tested
  bool a3_nonzero = true;
  for (const Atom& a : spec.atoms)
    for (double wj : a.w)
      if (wj == 0.0) a3_nonzero = false;
  if (!a3_nonzero) rep.violations.push_back("A3: |W_j|>0 fails");
  if (rep.conservative) rep.violations.push_back("A3: conservative law (sum W_j = 1 a.s.)");
  bool a3_finite = true;
  for (double p : {-10.0, -1.0, 0.0, 1.0, 2.0, 10.0})
    if (!std::isfinite(phi_u(spec, Side::W, p))) a3_finite = false;
  if (!a3_finite) rep.violations.push_back("A3: phi_W not finite at a tested exponent");
  rep.a3_holds = !rep.conservative && a3_nonzero && a3_finite;

  return rep;
}

}  // namespace cascade
