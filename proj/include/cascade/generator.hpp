#pragma once

#include <string>
#include <vector>

namespace cascade {

// One atom of the joint law of the weight vectors: branch weights w[0..b-1],
// branch lengths l[0..b-1] (each in (0,1)), and probability p.
struct Atom {
  std::vector<double> w;
  std::vector<double> l;
  double p = 0.0;
};

// Finitely-atomic joint law of (W, L) on b branches. Normalizations
// E(sum W_j) = E(sum L_j) = 1 are enforced at parse time, so every moment
// functional downstream is exact.
struct GeneratorSpec {
  int b = 2;
  std::vector<Atom> atoms;
  std::string label;
};

enum class Side { W, L };

struct AssumptionReport {
  bool a1_holds = false;
  double a1_witness_p = 0.0;  // maximizer of phi_W over the searched bracket
  bool a2_holds = false;
  bool a3_holds = false;
  bool conservative = false;
  std::vector<std::string> violations;
};

// Parses either the explicit atom list form
//   {"b":int,"label":str,"atoms":[{"w":[..],"l":[..],"p":real}]}
// or the iid-marginal convenience form
//   {"b":int,"label":str,"iid_marginal":{"values":[..],"probs":[..]},"l":"uniform"}
// which expands to the product law over branches at parse time.
// Throws SchemaError for malformed documents, InvariantError for violated
// normalization sums; both name the failing field.
GeneratorSpec parse_spec(const std::string& json_text);
GeneratorSpec parse_spec_file(const std::string& path);

// Expected weighted moment sum
//   Phi(q,t) = sum_atoms p * sum_j [w_j != 0] |w_j|^q * l_j^(-t).
// Exact for atomic laws; strictly increasing in t.
double moment(const GeneratorSpec& spec, double q, double t);

// phi_U(p) = -log_b E(sum_j [U_j != 0] |U_j|^p).
double phi_u(const GeneratorSpec& spec, Side side, double p);

// True iff every atom has sum_j w_j = 1 within 1e-12.
bool is_conservative(const GeneratorSpec& spec);

// Verifies the standing assumptions:
//  a1: exists p in (1,2] with phi_W(p) > 0 (searched on (1,8] for conservative
//      laws), and E(sum L_j log L_j) < 0;
//  a2: phi_W finite at p = -1 and every atom has >= 2 nonzero w-entries;
//  a3: non-conservative, all |w_j| > 0, phi_W finite at all tested exponents.
// Never throws; failures are listed in violations.
AssumptionReport check_assumptions(const GeneratorSpec& spec);

}  // namespace cascade
