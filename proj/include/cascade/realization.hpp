#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cascade/generator.hpp"
#include "cascade/word.hpp"

namespace cascade {

// A sampled weight tree to a fixed depth. Nothing is stored per node: the
// atom at a word is a pure function of (seed, digit path) through the
// counter-based RNG, so queries are traversal-order and thread independent
// and re-querying is bit-identical.
class CascadeRealization {
 public:
  CascadeRealization(GeneratorSpec spec, std::uint64_t seed, int depth);

  const GeneratorSpec& spec() const { return spec_; }
  std::uint64_t seed() const { return seed_; }
  int depth() const { return depth_; }
  int b() const { return spec_.b; }

  // RNG state at a word (root state walked by the digits).
  std::uint64_t state_at(const Word& w) const;

  // Atom index drawn at a word; requires |w| < depth.
  int atom_index_at_state(std::uint64_t state) const;
  int atom_index(const Word& w) const;

  // The (w-vector, l-vector) atom governing the children of `w`.
  const Atom& node(const Word& w) const;

 private:
  GeneratorSpec spec_;
  std::uint64_t seed_ = 0;
  int depth_ = 0;
  std::vector<double> cdf_;  // cumulative atom probabilities
};

// Guard: depth * log2(b) <= 34. Throws CapacityError beyond it.
CascadeRealization sample(const GeneratorSpec& spec, std::uint64_t seed, int depth);

// Telescoping weight products (W_u(prefix), L_u(prefix)) along the digit path
// u below prefix. Throws DepthError if |prefix| + |u| > depth.
std::pair<double, double> weight_product(const CascadeRealization& real,
                                         const Word& prefix, const Word& u);

// Cumulative products (W_w(empty), L_w(empty)) for every word w of one level,
// indexed by word index. Computed in fixed subtree chunks so the arrays are
// bit-identical for any thread count. Throws DepthError when level > depth,
// CapacityError when b^level exceeds the in-memory guard (2^24).
struct LevelProducts {
  int level = 0;
  std::vector<double> w;
  std::vector<double> l;
};
LevelProducts level_products(const CascadeRealization& real, int level);

// Products for all levels 0..max_level at once (serial; intended for the
// moderate depths used by band filters and tests).
std::vector<LevelProducts> products_by_level(const CascadeRealization& real, int max_level);

}  // namespace cascade
