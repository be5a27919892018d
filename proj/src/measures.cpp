#include "cascade/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cascade/errors.hpp"
#include "cascade/parallel.hpp"
#include "cascade/rng.hpp"
#include "cascade/spectrum.hpp"

namespace cascade {

using rng::derive_stream;
using rng::unit01;

namespace {

constexpr double kMinBinWidth = 1.0 / 1099511627776.0;  // 2^-40

double pow_weight(double w, double l, double q, double tau_q) {
  if (w == 0.0) return 0.0;
  return std::pow(std::abs(w), q) * std::pow(l, -tau_q);
}

}  // namespace

MeasureTable build_mu_q(const CascadeRealization& real, double q, int level, int tail_depth) {
  if (level < 0 || tail_depth < 0) throw DepthError("level and tail_depth must be >= 0");
  if (level + tail_depth > real.depth())
    throw DepthError("level + tail_depth exceeds sampled depth");
  const int b = real.b();
  MeasureTable t;
  t.q = q;
  t.level = level;
  t.tail_depth = tail_depth;
  t.tau_q = tau(real.spec(), q);

  LevelProducts fine = level_products(real, level + tail_depth);
  const std::uint64_t cells = level_count(b, level);
  const std::uint64_t block = level_count(b, tail_depth);
  t.mass.assign(cells, 0.0);

  const int chunk_level = std::min(level, 8);
  const std::uint64_t n_chunks = level_count(b, chunk_level);
  const std::uint64_t cells_per_chunk = cells / n_chunks;
  parallel_chunks(n_chunks, [&](std::uint64_t c) {
    for (std::uint64_t k = c * cells_per_chunk; k < (c + 1) * cells_per_chunk; ++k) {
      double acc = 0.0;
      for (std::uint64_t u = k * block; u < (k + 1) * block; ++u)
        acc += pow_weight(fine.w[u], fine.l[u], q, t.tau_q);
      t.mass[k] = acc;
    }
  });
  double total = 0.0;
  for (double m : t.mass) total += m;
  t.total = total;
  return t;
}

namespace {

struct CellBoxes {
  // per level-n word: x-interval [x0, x1], F_W envelope [y0, y1]
  const FunctionTrace& tr;
  std::uint64_t cells;
  double x0(std::uint64_t k) const { return tr.FL_at[k]; }
  double x1(std::uint64_t k) const { return tr.FL_at[k + 1]; }
  double y0(std::uint64_t k) const { return tr.min_W.back()[k]; }
  double y1(std::uint64_t k) const { return tr.max_W.back()[k]; }
};

void require_matching(const MeasureTable& table, const FunctionTrace& trace) {
  if (table.level != trace.depth)
    throw InvariantError("measure table and trace must share the same level");
  if (table.mass.size() + 1 != trace.FL_at.size())
    throw InvariantError("measure table and trace sizes disagree");
}

}  // namespace

GriddedMap1D pushforward_1d(const MeasureTable& table, const FunctionTrace& trace,
                            PushTarget target, int bins, double theta) {
  require_matching(table, trace);
  if (bins < 1) throw InvariantError("pushforward needs at least one bin");
  CellBoxes cb{trace, table.mass.size()};
  const double s = std::sin(theta), c = std::cos(theta);

  auto interval_of = [&](std::uint64_t k) -> std::pair<double, double> {
    switch (target) {
      case PushTarget::domain:
        return {cb.x0(k), cb.x1(k)};
      case PushTarget::range:
        return {cb.y0(k), cb.y1(k)};
      case PushTarget::projection:
      default: {
        double px = std::min(cb.x0(k) * s, cb.x1(k) * s);
        double qx = std::max(cb.x0(k) * s, cb.x1(k) * s);
        double py = std::min(cb.y0(k) * c, cb.y1(k) * c);
        double qy = std::max(cb.y0(k) * c, cb.y1(k) * c);
        return {px + py, qx + qy};
      }
    }
  };

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  if (target == PushTarget::domain) {
    lo = 0.0;
    hi = trace.fl_total();
  } else if (target == PushTarget::range) {
    lo = trace.min_W[0][0];
    hi = trace.max_W[0][0];
  } else {
    for (std::uint64_t k = 0; k < cb.cells; ++k) {
      auto [a, bnd] = interval_of(k);
      lo = std::min(lo, a);
      hi = std::max(hi, bnd);
    }
  }
  if (!(hi > lo)) throw DegenerateError("pushforward support has zero extent");

  GriddedMap1D map;
  map.lo = lo;
  map.hi = hi;
  map.mass.assign(static_cast<std::size_t>(bins), 0.0);
  if (map.bin_width() < kMinBinWidth)
    throw BinningError("bin width below the 2^-40 precision floor");
  for (std::uint64_t k = 0; k < cb.cells; ++k) {
    if (table.mass[k] == 0.0) continue;
    auto [a, bnd] = interval_of(k);
    deposit_interval(map, a, bnd, table.mass[k]);
  }
  return map;
}

GriddedMap2D pushforward_graph(const MeasureTable& table, const FunctionTrace& trace,
                               int nx, int ny) {
  require_matching(table, trace);
  if (nx < 1 || ny < 1) throw InvariantError("pushforward needs at least one bin per axis");
  CellBoxes cb{trace, table.mass.size()};
  GriddedMap2D map;
  map.xlo = 0.0;
  map.xhi = trace.fl_total();
  map.ylo = trace.min_W[0][0];
  map.yhi = trace.max_W[0][0];
  map.nx = nx;
  map.ny = ny;
  if (!(map.xhi > map.xlo) || !(map.yhi > map.ylo))
    throw DegenerateError("pushforward support has zero extent");
  const double wx = (map.xhi - map.xlo) / nx;
  const double wy = (map.yhi - map.ylo) / ny;
  if (wx < kMinBinWidth || wy < kMinBinWidth)
    throw BinningError("bin width below the 2^-40 precision floor");
  map.mass.assign(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny), 0.0);

  auto axis_overlaps = [](double a, double b, double glo, double w, int nbins,
                          std::vector<std::pair<int, double>>& out) {
    out.clear();
    if (b < a) std::swap(a, b);
    auto bin_of = [&](double x) {
      auto i = static_cast<std::int64_t>(std::floor((x - glo) / w));
      return std::clamp<std::int64_t>(i, 0, nbins - 1);
    };
    std::int64_t i0 = bin_of(a), i1 = bin_of(b);
    if (b - a <= 0.0 || i0 == i1) {
      out.emplace_back(static_cast<int>(i0), 1.0);
      return;
    }
    double len = b - a;
    for (std::int64_t i = i0; i <= i1; ++i) {
      double elo = glo + w * static_cast<double>(i);
      double ov = std::min(b, elo + w) - std::max(a, elo);
      if (ov > 0.0) out.emplace_back(static_cast<int>(i), ov / len);
    }
  };

  std::vector<std::pair<int, double>> fx, fy;
  for (std::uint64_t k = 0; k < cb.cells; ++k) {
    if (table.mass[k] == 0.0) continue;
    axis_overlaps(cb.x0(k), cb.x1(k), map.xlo, wx, nx, fx);
    axis_overlaps(cb.y0(k), cb.y1(k), map.ylo, wy, ny, fy);
    for (const auto& [ix, px] : fx)
      for (const auto& [iy, py] : fy)
        map.mass[static_cast<std::size_t>(ix) * static_cast<std::size_t>(ny) +
                 static_cast<std::size_t>(iy)] += table.mass[k] * px * py;
  }
  return map;
}

CantorFilterResult cantor_filter(const CascadeRealization& real, const FunctionTrace& trace,
                                 double q, double epsilon, int n) {
  if (!(epsilon > 0.0)) throw OutOfRangeError("cantor_filter requires epsilon > 0");
  if (n < 0 || n > trace.depth) throw DepthError("filter level must lie within the trace");
  const int b = real.b();
  const int T = trace.depth;
  SpectrumPoint sp = spectrum_point(real.spec(), q);
  const bool pass_all = std::isinf(epsilon);

  CantorFilterResult res;
  res.q = q;
  res.epsilon = epsilon;
  res.n = n;

  std::vector<LevelProducts> prods = products_by_level(real, T);

  // Per-stage band pass flags, including the same-level neighbor requirement.
  std::vector<std::vector<char>> ok(static_cast<std::size_t>(T + 1));
  for (int p = n; p <= T; ++p) {
    std::uint64_t cells = level_count(b, p);
    std::vector<char> self(cells);
    const auto& wv = prods[static_cast<std::size_t>(p)].w;
    const auto& lv = prods[static_cast<std::size_t>(p)].l;
    const auto& ow = trace.osc_W[static_cast<std::size_t>(p)];
    const auto& ol = trace.osc_L[static_cast<std::size_t>(p)];
    const double wlo = std::exp(-p * (sp.xi + epsilon));
    const double whi = std::exp(-p * (sp.xi - epsilon));
    const double llo = std::exp(-p * (sp.xi_tilde + epsilon));
    const double lhi = std::exp(-p * (sp.xi_tilde - epsilon));
    const double olo = std::exp(-p * epsilon);
    const double ohi = std::exp(p * epsilon);
    for (std::uint64_t k = 0; k < cells; ++k) {
      if (pass_all) {
        self[k] = 1;
        continue;
      }
      double aw = std::abs(wv[k]);
      bool okw = aw >= wlo && aw <= whi;
      bool okl = lv[k] >= llo && lv[k] <= lhi;
      double o_w = ow[k] / aw;
      double o_l = ol[k] / lv[k];
      bool oko = o_w >= olo && o_w <= ohi && o_l >= olo && o_l <= ohi;
      self[k] = okw && okl && oko;
    }
    auto& okp = ok[static_cast<std::size_t>(p)];
    okp.resize(cells);
    for (std::uint64_t k = 0; k < cells; ++k) {
      bool v = self[k];
      if (k > 0) v = v && self[k - 1];
      if (k + 1 < cells) v = v && self[k + 1];
      okp[k] = v;
    }
  }

  // One deepest-level mass table; coarser masses are exact child sums of it,
  // so the cumulative complement series is monotone in its own accounting.
  MeasureTable deepest = build_mu_q(real, q, T, trace.tail_depth);
  res.total_mass = deepest.total;

  std::uint64_t leaves = level_count(b, T);
  std::vector<char> surv(leaves, 1);
  for (int p = n; p <= T; ++p) {
    std::uint64_t div = level_count(b, T - p);
    const auto& okp = ok[static_cast<std::size_t>(p)];
    for (std::uint64_t i = 0; i < leaves; ++i)
      if (!okp[i / div]) surv[i] = 0;
    double kept = 0.0;
    for (std::uint64_t i = 0; i < leaves; ++i)
      if (surv[i]) kept += deepest.mass[i];
    res.complement_mass_by_level.push_back(deepest.total - kept);
    if (p == n) {
      res.retained_mass = kept;
      for (std::uint64_t k = 0; k < level_count(b, n); ++k)
        if (ok[static_cast<std::size_t>(n)][k]) res.surviving.push_back(k);
    }
  }
  return res;
}

EnergyEstimate riesz_energy(const MeasureTable& table, const FunctionTrace& trace,
                            double gamma, KernelMode mode, std::uint64_t pair_budget) {
  if (!(gamma > 0.0)) throw OutOfRangeError("riesz_energy requires gamma > 0");
  require_matching(table, trace);
  const std::uint64_t nwords = table.mass.size();
  EnergyEstimate est;
  est.gamma = gamma;
  est.depth = table.level;
  est.pair_count = nwords * nwords;

  const double* xs = trace.FL_at.data();
  const double* ys = trace.FW_at.data();
  const double* ms = table.mass.data();

  auto kernel = [&](std::uint64_t i, std::uint64_t j) {
    double d;
    if (mode == KernelMode::graph) {
      double dx = xs[i] - xs[j];
      double dy = ys[i] - ys[j];
      d = std::sqrt(dx * dx + dy * dy);
    } else {
      d = std::abs(ys[i] - ys[j]);
    }
    if (d <= 0.0) return 1.0;  // coincident representatives: kernel floor
    return std::max(std::pow(d, -gamma), 1.0);
  };

  if (est.pair_count <= pair_budget) {
    est.subsampled = false;
    // fixed row blocks; block partials summed in block order
    const std::uint64_t block = 64;
    const std::uint64_t n_blocks = (nwords + block - 1) / block;
    std::vector<double> partial(n_blocks, 0.0);
    parallel_chunks(n_blocks, [&](std::uint64_t bi) {
      double acc = 0.0;
      std::uint64_t i_end = std::min(nwords, (bi + 1) * block);
      for (std::uint64_t i = bi * block; i < i_end; ++i) {
        if (ms[i] == 0.0) continue;
        acc += ms[i] * ms[i];  // self-pair at the kernel cap
        double row = 0.0;
        for (std::uint64_t j = i + 1; j < nwords; ++j) {
          if (ms[j] == 0.0) continue;
          row += kernel(i, j) * ms[j];
        }
        acc += 2.0 * ms[i] * row;
      }
      partial[bi] = acc;
    });
    double total = 0.0;
    for (double v : partial) total += v;
    est.value = total;
    return est;
  }

  // Unbiased uniform subsampling over ordered pairs.
  est.subsampled = true;
  const std::uint64_t samples = pair_budget;
  const std::uint64_t block = 1u << 16;
  const std::uint64_t n_blocks = (samples + block - 1) / block;
  std::vector<double> psum(n_blocks, 0.0), psum2(n_blocks, 0.0);
  constexpr std::uint64_t kSaltI = 0x9a3c11d47b02e6f1ull;
  constexpr std::uint64_t kSaltJ = 0x5d8e23a9c4f017b3ull;
  parallel_chunks(n_blocks, [&](std::uint64_t bi) {
    double acc = 0.0, acc2 = 0.0;
    std::uint64_t s_end = std::min(samples, (bi + 1) * block);
    for (std::uint64_t s = bi * block; s < s_end; ++s) {
      auto i = static_cast<std::uint64_t>(unit01(derive_stream(kSaltI, s)) *
                                          static_cast<double>(nwords));
      auto j = static_cast<std::uint64_t>(unit01(derive_stream(kSaltJ, s)) *
                                          static_cast<double>(nwords));
      i = std::min(i, nwords - 1);
      j = std::min(j, nwords - 1);
      double term = (i == j ? 1.0 : kernel(i, j)) * ms[i] * ms[j];
      acc += term;
      acc2 += term * term;
    }
    psum[bi] = acc;
    psum2[bi] = acc2;
  });
  double sum = 0.0, sum2 = 0.0;
  for (std::uint64_t bi = 0; bi < n_blocks; ++bi) {
    sum += psum[bi];
    sum2 += psum2[bi];
  }
  const double mean = sum / static_cast<double>(samples);
  const double var =
      std::max(0.0, sum2 / static_cast<double>(samples) - mean * mean);
  est.value = mean * static_cast<double>(est.pair_count);
  est.stderr_value = std::sqrt(var / static_cast<double>(samples)) *
                     static_cast<double>(est.pair_count);
  return est;
}

}  // namespace cascade
