#include "cascade/trace.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cascade/csvio.hpp"
#include "cascade/errors.hpp"
#include "cascade/parallel.hpp"

namespace cascade {

namespace {

// Chunked two-pass prefix sum writing every endpoint value. The chunk
// decomposition is fixed by `chunk_level`, never by the worker count, so the
// grouping of floating-point additions is identical for any thread count.
std::vector<double> chunked_prefix(const std::vector<double>& vals, int b, int chunk_level) {
  std::uint64_t n = vals.size();
  std::uint64_t n_chunks = level_count(b, chunk_level);
  std::uint64_t slice = n / n_chunks;
  std::vector<double> totals(n_chunks);
  parallel_chunks(n_chunks, [&](std::uint64_t c) {
    double acc = 0.0;
    for (std::uint64_t i = c * slice; i < (c + 1) * slice; ++i) acc += vals[i];
    totals[c] = acc;
  });
  std::vector<double> offsets(n_chunks + 1);
  offsets[0] = 0.0;
  for (std::uint64_t c = 0; c < n_chunks; ++c) offsets[c + 1] = offsets[c] + totals[c];
  std::vector<double> prefix(n + 1);
  parallel_chunks(n_chunks, [&](std::uint64_t c) {
    double acc = offsets[c];
    for (std::uint64_t i = c * slice; i < (c + 1) * slice; ++i) {
      prefix[i] = acc;
      acc += vals[i];
    }
  });
  prefix[n] = offsets[n_chunks];
  return prefix;
}

}  // namespace

FunctionTrace build_trace(const CascadeRealization& real, int depth, int tail_depth) {
  if (depth < 0 || tail_depth < 0) throw DepthError("depth and tail_depth must be >= 0");
  if (depth + tail_depth > real.depth())
    throw DepthError("depth + tail_depth exceeds sampled depth");
  const int b = real.b();
  const int n = depth;
  const int N = depth + tail_depth;

  FunctionTrace tr;
  tr.b = b;
  tr.depth = n;
  tr.tail_depth = tail_depth;

  LevelProducts fine = level_products(real, N);
  const std::uint64_t fine_cells = level_count(b, N);
  const std::uint64_t cells_n = level_count(b, n);
  const std::uint64_t stride = level_count(b, N - n);
  const int chunk_level = std::min(n, 8);

  std::vector<double> prefixW = chunked_prefix(fine.w, b, chunk_level);
  fine.w.clear();
  fine.w.shrink_to_fit();
  std::vector<double> prefixL = chunked_prefix(fine.l, b, chunk_level);
  fine.l.clear();
  fine.l.shrink_to_fit();

  tr.FW_at.resize(cells_n + 1);
  tr.FL_at.resize(cells_n + 1);
  for (std::uint64_t k = 0; k <= cells_n; ++k) {
    tr.FW_at[k] = prefixW[k * stride];
    tr.FL_at[k] = prefixL[k * stride];
  }

  // Envelope pyramid of F_W over the fine endpoint grid: adjacent cells share
  // boundary endpoints, so parent envelopes are exact merges of child ones.
  std::vector<double> cmin(fine_cells), cmax(fine_cells);
  for (std::uint64_t i = 0; i < fine_cells; ++i) {
    cmin[i] = std::min(prefixW[i], prefixW[i + 1]);
    cmax[i] = std::max(prefixW[i], prefixW[i + 1]);
  }
  prefixW.clear();
  prefixW.shrink_to_fit();
  prefixL.clear();
  prefixL.shrink_to_fit();

  tr.osc_W.resize(static_cast<std::size_t>(n) + 1);
  tr.osc_L.resize(static_cast<std::size_t>(n) + 1);
  tr.min_W.resize(static_cast<std::size_t>(n) + 1);
  tr.max_W.resize(static_cast<std::size_t>(n) + 1);
  for (int lvl = N; lvl >= 0; --lvl) {
    if (lvl <= n) {
      auto& mn = tr.min_W[static_cast<std::size_t>(lvl)];
      auto& mx = tr.max_W[static_cast<std::size_t>(lvl)];
      auto& ow = tr.osc_W[static_cast<std::size_t>(lvl)];
      std::uint64_t cells = level_count(b, lvl);
      mn.assign(cmin.begin(), cmin.begin() + static_cast<std::ptrdiff_t>(cells));
      mx.assign(cmax.begin(), cmax.begin() + static_cast<std::ptrdiff_t>(cells));
      ow.resize(cells);
      for (std::uint64_t k = 0; k < cells; ++k) ow[k] = mx[k] - mn[k];
    }
    if (lvl == 0) break;
    std::uint64_t parent_cells = level_count(b, lvl - 1);
    for (std::uint64_t k = 0; k < parent_cells; ++k) {
      double mn = cmin[k * static_cast<std::uint64_t>(b)];
      double mx = cmax[k * static_cast<std::uint64_t>(b)];
      for (int d = 1; d < b; ++d) {
        mn = std::min(mn, cmin[k * static_cast<std::uint64_t>(b) + static_cast<std::uint64_t>(d)]);
        mx = std::max(mx, cmax[k * static_cast<std::uint64_t>(b) + static_cast<std::uint64_t>(d)]);
      }
      cmin[k] = mn;
      cmax[k] = mx;
    }
    cmin.resize(parent_cells);
    cmax.resize(parent_cells);
  }

  // F_L is strictly increasing, so its oscillation over a cell equals the
  // endpoint increment.
  for (int lvl = 0; lvl <= n; ++lvl) {
    std::uint64_t cells = level_count(b, lvl);
    std::uint64_t step = level_count(b, n - lvl);
    auto& ol = tr.osc_L[static_cast<std::size_t>(lvl)];
    ol.resize(cells);
    for (std::uint64_t k = 0; k < cells; ++k)
      ol[k] = tr.FL_at[(k + 1) * step] - tr.FL_at[k * step];
  }

  return tr;
}

std::vector<std::array<double, 2>> compose_F(const FunctionTrace& trace) {
  for (std::size_t k = 0; k + 1 < trace.FL_at.size(); ++k)
    if (!(trace.FL_at[k + 1] > trace.FL_at[k]))
      throw NonMonotoneError("FL endpoint values are not strictly increasing");
  std::vector<std::array<double, 2>> pts;
  pts.reserve(trace.FL_at.size());
  for (std::size_t k = 0; k < trace.FL_at.size(); ++k)
    pts.push_back({trace.FL_at[k], trace.FW_at[k]});
  return pts;
}

std::string trace_csv(const FunctionTrace& trace) {
  std::ostringstream out;
  CsvWriter w(out);
  w.row({"level", "k", "x", "FW", "FL", "oscW", "oscL"});
  for (int j = 0; j <= trace.depth; ++j) {
    const std::uint64_t cells = level_count(trace.b, j);
    const std::uint64_t step = level_count(trace.b, trace.depth - j);
    const double dx = 1.0 / static_cast<double>(cells);
    for (std::uint64_t k = 0; k < cells; ++k) {
      w.row({format_int(j), format_int(static_cast<std::int64_t>(k)),
             format_double(static_cast<double>(k) * dx), format_double(trace.FW_at[k * step]),
             format_double(trace.FL_at[k * step]),
             format_double(trace.osc_W[static_cast<std::size_t>(j)][k]),
             format_double(trace.osc_L[static_cast<std::size_t>(j)][k])});
    }
  }
  return out.str();
}

}  // namespace cascade
