#include "cascade/realization.hpp"

#include <cmath>

#include "cascade/errors.hpp"
#include "cascade/parallel.hpp"
#include "cascade/rng.hpp"

namespace cascade {

using rng::atom_state;
using rng::child_state;
using rng::root_state;
using rng::unit01;

namespace {

// In-memory guard for whole-level arrays (doubles per array).
constexpr std::uint64_t kLevelCapacity = 1ull << 24;

}  // namespace

CascadeRealization::CascadeRealization(GeneratorSpec spec, std::uint64_t seed, int depth)
    : spec_(std::move(spec)), seed_(seed), depth_(depth) {
  cdf_.reserve(spec_.atoms.size());
  double acc = 0.0;
  for (const Atom& a : spec_.atoms) {
    acc += a.p;
    cdf_.push_back(acc);
  }
  cdf_.back() = 1.0;
}

std::uint64_t CascadeRealization::state_at(const Word& w) const {
  std::uint64_t state = root_state(seed_);
  for (std::uint32_t i = 0; i < w.length; ++i)
    state = child_state(state, w.digit(spec_.b, i));
  return state;
}

int CascadeRealization::atom_index_at_state(std::uint64_t state) const {
  double u = unit01(atom_state(state));
  // invert the atom CDF; the final entry is exactly 1 so u < 1 always lands
  std::size_t lo = 0;
  while (lo + 1 < cdf_.size() && u >= cdf_[lo]) ++lo;
  return static_cast<int>(lo);
}

int CascadeRealization::atom_index(const Word& w) const {
  if (static_cast<int>(w.length) >= depth_)
    throw DepthError("node query at or beyond sampled depth");
  return atom_index_at_state(state_at(w));
}

const Atom& CascadeRealization::node(const Word& w) const {
  return spec_.atoms[static_cast<std::size_t>(atom_index(w))];
}

CascadeRealization sample(const GeneratorSpec& spec, std::uint64_t seed, int depth) {
  if (depth < 0) throw CapacityError("depth must be >= 0");
  double leaves_log2 = depth * std::log2(static_cast<double>(spec.b));
  if (leaves_log2 > 34.0) throw CapacityError("depth exceeds the 2^34 leaf guard");
  return CascadeRealization(spec, seed, depth);
}

std::pair<double, double> weight_product(const CascadeRealization& real,
                                         const Word& prefix, const Word& u) {
  if (static_cast<int>(prefix.length + u.length) > real.depth())
    throw DepthError("weight product path exceeds sampled depth");
  const int b = real.b();
  std::uint64_t state = real.state_at(prefix);
  double w = 1.0, l = 1.0;
  for (std::uint32_t i = 0; i < u.length; ++i) {
    const Atom& a = real.spec().atoms[static_cast<std::size_t>(real.atom_index_at_state(state))];
    int d = u.digit(b, i);
    w *= a.w[static_cast<std::size_t>(d)];
    l *= a.l[static_cast<std::size_t>(d)];
    state = child_state(state, d);
  }
  return {w, l};
}

namespace {

// Expands the subtree under `root_word_index` at `root_level` down to `level`,
// writing cumulative products into out_w/out_l at the subtree's slice.
void expand_subtree(const CascadeRealization& real, int root_level, std::uint64_t root_index,
                    int level, double* out_w, double* out_l) {
  const int b = real.b();
  const int sub = level - root_level;
  Word root{static_cast<std::uint32_t>(root_level), root_index};
  std::uint64_t st0 = real.state_at(root);
  auto [w0, l0] = weight_product(real, Word{}, root);

  if (sub == 0) {
    out_w[0] = w0;
    out_l[0] = l0;
    return;
  }
  std::uint64_t count = 1;
  std::vector<double> ws{w0}, ls{l0};
  std::vector<std::uint64_t> states{st0};
  for (int j = 0; j < sub; ++j) {
    std::uint64_t next_count = count * static_cast<std::uint64_t>(b);
    bool last = (j == sub - 1);
    std::vector<double> nws(next_count), nls(next_count);
    std::vector<std::uint64_t> nstates(last ? 0 : next_count);
    for (std::uint64_t k = 0; k < count; ++k) {
      const Atom& a =
          real.spec().atoms[static_cast<std::size_t>(real.atom_index_at_state(states[k]))];
      for (int d = 0; d < b; ++d) {
        std::uint64_t c = k * static_cast<std::uint64_t>(b) + static_cast<std::uint64_t>(d);
        nws[c] = ws[k] * a.w[static_cast<std::size_t>(d)];
        nls[c] = ls[k] * a.l[static_cast<std::size_t>(d)];
        if (!last) nstates[c] = child_state(states[k], d);
      }
    }
    ws.swap(nws);
    ls.swap(nls);
    states.swap(nstates);
    count = next_count;
  }
  for (std::uint64_t k = 0; k < count; ++k) {
    out_w[k] = ws[k];
    out_l[k] = ls[k];
  }
}

}  // namespace

LevelProducts level_products(const CascadeRealization& real, int level) {
  if (level > real.depth()) throw DepthError("level exceeds sampled depth");
  const int b = real.b();
  std::uint64_t count = level_count(b, level);
  if (count > kLevelCapacity) throw CapacityError("level array exceeds the in-memory guard");

  LevelProducts out;
  out.level = level;
  out.w.resize(count);
  out.l.resize(count);

  // Fixed chunking at a level independent of the worker count keeps every
  // slice bit-identical under any parallel schedule.
  int chunk_level = std::min(level, 8);
  std::uint64_t n_chunks = level_count(b, chunk_level);
  std::uint64_t slice = count / n_chunks;
  parallel_chunks(n_chunks, [&](std::uint64_t c) {
    expand_subtree(real, chunk_level, c, level, out.w.data() + c * slice,
                   out.l.data() + c * slice);
  });
  return out;
}

std::vector<LevelProducts> products_by_level(const CascadeRealization& real, int max_level) {
  if (max_level > real.depth()) throw DepthError("level exceeds sampled depth");
  const int b = real.b();
  if (level_count(b, max_level) > kLevelCapacity)
    throw CapacityError("level array exceeds the in-memory guard");
  std::vector<LevelProducts> out(static_cast<std::size_t>(max_level) + 1);
  out[0].level = 0;
  out[0].w = {1.0};
  out[0].l = {1.0};
  std::vector<std::uint64_t> states{root_state(real.seed())};
  for (int j = 1; j <= max_level; ++j) {
    std::uint64_t count = level_count(b, j);
    auto& lv = out[static_cast<std::size_t>(j)];
    lv.level = j;
    lv.w.resize(count);
    lv.l.resize(count);
    std::vector<std::uint64_t> nstates(count);
    const auto& prev = out[static_cast<std::size_t>(j - 1)];
    for (std::uint64_t k = 0; k < count / static_cast<std::uint64_t>(b); ++k) {
      const Atom& a =
          real.spec().atoms[static_cast<std::size_t>(real.atom_index_at_state(states[k]))];
      for (int d = 0; d < b; ++d) {
        std::uint64_t c = k * static_cast<std::uint64_t>(b) + static_cast<std::uint64_t>(d);
        lv.w[c] = prev.w[k] * a.w[static_cast<std::size_t>(d)];
        lv.l[c] = prev.l[k] * a.l[static_cast<std::size_t>(d)];
        nstates[c] = child_state(states[k], d);
      }
    }
    states.swap(nstates);
  }
  return out;
}

}  // namespace cascade
