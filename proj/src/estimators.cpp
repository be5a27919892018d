#include "cascade/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cascade/errors.hpp"

namespace cascade {

namespace {

double log_base(double v, int b) { return std::log(v) / std::log(static_cast<double>(b)); }

// Occupied-bin count of a union of index intervals [lo, hi].
std::int64_t merged_bin_count(std::vector<std::pair<std::int64_t, std::int64_t>>& iv) {
  if (iv.empty()) return 0;
  std::sort(iv.begin(), iv.end());
  std::int64_t count = 0;
  std::int64_t cur_lo = iv[0].first, cur_hi = iv[0].second;
  for (std::size_t i = 1; i < iv.size(); ++i) {
    auto [lo, hi] = iv[i];
    if (lo > cur_hi + 1) {
      count += cur_hi - cur_lo + 1;
      cur_lo = lo;
      cur_hi = hi;
    } else {
      cur_hi = std::max(cur_hi, hi);
    }
  }
  count += cur_hi - cur_lo + 1;
  return count;
}

// Column range spanned by the x-interval [x0, x1): an interval ending exactly
// on a column edge does not enter the next column.
std::pair<std::int64_t, std::int64_t> column_span(double x0, double x1, double width,
                                                  std::int64_t ncols) {
  auto c_lo = static_cast<std::int64_t>(std::floor(x0 / width));
  auto c_hi = static_cast<std::int64_t>(std::floor(x1 / width));
  if (x1 == static_cast<double>(c_hi) * width) --c_hi;
  c_lo = std::clamp<std::int64_t>(c_lo, 0, ncols - 1);
  c_hi = std::clamp<std::int64_t>(c_hi, c_lo, ncols - 1);
  return {c_lo, c_hi};
}

}  // namespace

ScalingFit ols_fit(const std::vector<double>& x, const std::vector<double>& y) {
  ScalingFit fit;
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double ybar = sy / n;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double e = y[i] - (fit.slope * x[i] + fit.intercept);
    ss_res += e * e;
    ss_tot += (y[i] - ybar) * (y[i] - ybar);
  }
  fit.r2 = ss_tot > 0 ? std::max(0.0, 1.0 - ss_res / ss_tot) : 1.0;
  fit.low_r2 = fit.r2 < 0.9;
  return fit;
}

std::vector<ScalingFit> lq_spectrum(const FunctionTrace& trace, const std::vector<double>& qs,
                                    int j_min, int j_max) {
  j_min = std::max(j_min, 0);
  j_max = std::min(j_max, trace.depth);
  std::vector<ScalingFit> fits;
  fits.reserve(qs.size());
  for (double q : qs) {
    std::vector<double> xs, ys;
    std::vector<int> levels;
    for (int j = j_min; j <= j_max; ++j) {
      double s = 0.0;
      for (double osc : trace.osc_W[static_cast<std::size_t>(j)])
        if (osc > 0.0) s += std::pow(osc, q);
      if (!(s > 0.0) || !std::isfinite(s)) continue;
      levels.push_back(j);
      xs.push_back(-static_cast<double>(j));
      ys.push_back(log_base(s, trace.b));
    }
    if (levels.size() < 3)
      throw DegenerateError("fewer than 3 levels with positive oscillation in the window");
    ScalingFit fit = ols_fit(xs, ys);
    fit.levels = levels;
    fit.log_stats = ys;
    fit.j_min = j_min;
    fit.j_max = j_max;
    fits.push_back(std::move(fit));
  }
  return fits;
}

LegendreEstimate legendre_numeric(const std::vector<double>& qs,
                                  const std::vector<double>& tau_hats, int h_points) {
  LegendreEstimate out;
  out.low_confidence = qs.size() < 5;
  if (qs.size() < 2 || qs.size() != tau_hats.size()) return out;
  double hmin = std::numeric_limits<double>::infinity(), hmax = -hmin;
  for (std::size_t i = 0; i + 1 < qs.size(); ++i) {
    double s = (tau_hats[i + 1] - tau_hats[i]) / (qs[i + 1] - qs[i]);
    hmin = std::min(hmin, s);
    hmax = std::max(hmax, s);
  }
  int pts = hmax > hmin ? h_points : 1;
  for (int i = 0; i < pts; ++i) {
    double h = pts == 1 ? hmin : hmin + (hmax - hmin) * i / static_cast<double>(pts - 1);
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < qs.size(); ++k) d = std::min(d, qs[k] * h - tau_hats[k]);
    out.h.push_back(h);
    out.d.push_back(d);
  }
  return out;
}

ScalingFit fit_dimension(const std::vector<int>& levels, const std::vector<std::int64_t>& counts,
                         int j_min, int j_max, int b) {
  std::vector<double> xs, ys;
  std::vector<int> used;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] < j_min || levels[i] > j_max || counts[i] <= 0) continue;
    used.push_back(levels[i]);
    xs.push_back(static_cast<double>(levels[i]));
    ys.push_back(log_base(static_cast<double>(counts[i]), b));
  }
  if (used.size() < 3) throw DegenerateError("fewer than 3 usable levels in the window");
  ScalingFit fit = ols_fit(xs, ys);
  fit.levels = used;
  fit.log_stats = ys;
  fit.j_min = j_min;
  fit.j_max = j_max;
  return fit;
}

BoxCountResult box_count_graph(const FunctionTrace& trace, int j_min, int j_max) {
  BoxCountResult res;
  res.target = BoxTarget::graph;
  const int b = trace.b;
  const std::uint64_t cells = trace.osc_W.back().size();
  const double total_x = trace.fl_total();
  const auto& ymin = trace.min_W.back();
  const auto& ymax = trace.max_W.back();
  for (int j = 1; j <= trace.depth; ++j) {
    const auto ncols = static_cast<std::int64_t>(level_count(b, j));
    const double width = total_x / static_cast<double>(ncols);
    std::vector<double> cmin(static_cast<std::size_t>(ncols),
                             std::numeric_limits<double>::infinity());
    std::vector<double> cmax(static_cast<std::size_t>(ncols),
                             -std::numeric_limits<double>::infinity());
    for (std::uint64_t k = 0; k < cells; ++k) {
      auto [c0, c1] = column_span(trace.FL_at[k], trace.FL_at[k + 1], width, ncols);
      for (std::int64_t c = c0; c <= c1; ++c) {
        cmin[static_cast<std::size_t>(c)] = std::min(cmin[static_cast<std::size_t>(c)], ymin[k]);
        cmax[static_cast<std::size_t>(c)] = std::max(cmax[static_cast<std::size_t>(c)], ymax[k]);
      }
    }
    std::int64_t nj = 0;
    for (std::int64_t c = 0; c < ncols; ++c) {
      if (!(cmin[static_cast<std::size_t>(c)] <= cmax[static_cast<std::size_t>(c)])) continue;
      double osc = cmax[static_cast<std::size_t>(c)] - cmin[static_cast<std::size_t>(c)];
      nj += static_cast<std::int64_t>(std::ceil(osc / width)) + 1;
    }
    res.levels.push_back(j);
    res.counts.push_back(nj);
  }
  res.fit = fit_dimension(res.levels, res.counts, j_min, j_max, b);
  return res;
}

BoxCountResult box_count_range(const FunctionTrace& trace, int j_min, int j_max) {
  BoxCountResult res;
  res.target = BoxTarget::range;
  const int b = trace.b;
  for (int j = 1; j <= trace.depth; ++j) {
    const double s = std::pow(static_cast<double>(b), -j);
    const auto& mn = trace.min_W[static_cast<std::size_t>(j)];
    const auto& mx = trace.max_W[static_cast<std::size_t>(j)];
    std::vector<std::pair<std::int64_t, std::int64_t>> iv;
    iv.reserve(mn.size());
    for (std::size_t k = 0; k < mn.size(); ++k)
      iv.emplace_back(static_cast<std::int64_t>(std::floor(mn[k] / s)),
                      static_cast<std::int64_t>(std::floor(mx[k] / s)));
    res.levels.push_back(j);
    res.counts.push_back(merged_bin_count(iv));
  }
  res.fit = fit_dimension(res.levels, res.counts, j_min, j_max, b);
  return res;
}

BoxCountResult box_count_projection(const FunctionTrace& trace, double theta,
                                    int j_min, int j_max) {
  BoxCountResult res;
  res.target = BoxTarget::projection;
  res.theta = theta;
  const int b = trace.b;
  const double st = std::sin(theta), ct = std::cos(theta);
  for (int j = 1; j <= trace.depth; ++j) {
    const double s = std::pow(static_cast<double>(b), -j);
    const std::uint64_t cells = level_count(b, j);
    const std::uint64_t step = level_count(b, trace.depth - j);
    const auto& mn = trace.min_W[static_cast<std::size_t>(j)];
    const auto& mx = trace.max_W[static_cast<std::size_t>(j)];
    std::vector<std::pair<std::int64_t, std::int64_t>> iv;
    iv.reserve(cells);
    for (std::uint64_t k = 0; k < cells; ++k) {
      double xa = trace.FL_at[k * step] * st, xb = trace.FL_at[(k + 1) * step] * st;
      double ya = mn[k] * ct, yb = mx[k] * ct;
      double plo = std::min(xa, xb) + std::min(ya, yb);
      double phi = std::max(xa, xb) + std::max(ya, yb);
      iv.emplace_back(static_cast<std::int64_t>(std::floor(plo / s)),
                      static_cast<std::int64_t>(std::floor(phi / s)));
    }
    res.levels.push_back(j);
    res.counts.push_back(merged_bin_count(iv));
  }
  res.fit = fit_dimension(res.levels, res.counts, j_min, j_max, b);
  return res;
}

BoxCountResult box_count_levelset(const FunctionTrace& trace, double y, double theta,
                                  int j_min, int j_max) {
  BoxCountResult res;
  res.target = BoxTarget::levelset;
  res.theta = theta;
  res.y = y;
  const int b = trace.b;
  const double st = std::sin(theta), ct = std::cos(theta);
  const std::size_t npts = trace.FL_at.size();
  std::vector<double> g(npts);
  double gmin = std::numeric_limits<double>::infinity(), gmax = -gmin;
  for (std::size_t i = 0; i < npts; ++i) {
    g[i] = trace.FL_at[i] * st + trace.FW_at[i] * ct;
    gmin = std::min(gmin, g[i]);
    gmax = std::max(gmax, g[i]);
  }
  if (y < gmin || y > gmax)
    throw OutOfRangeError("level value lies outside the projected range");

  const double total_x = trace.fl_total();
  for (int j = 1; j <= trace.depth; ++j) {
    const auto ncols = static_cast<std::int64_t>(level_count(b, j));
    const double width = total_x / static_cast<double>(ncols);
    std::vector<double> cmin(static_cast<std::size_t>(ncols),
                             std::numeric_limits<double>::infinity());
    std::vector<double> cmax(static_cast<std::size_t>(ncols),
                             -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i + 1 < npts; ++i) {
      double x0 = trace.FL_at[i], x1 = trace.FL_at[i + 1];
      auto [c0, c1] = column_span(x0, x1, width, ncols);
      for (std::int64_t c = c0; c <= c1; ++c) {
        // linear interpolation of the polyline at the column boundaries
        double ex = std::max(x0, static_cast<double>(c) * width);
        double xx = std::min(x1, static_cast<double>(c + 1) * width);
        double t0 = (ex - x0) / (x1 - x0);
        double t1 = (xx - x0) / (x1 - x0);
        double g0 = g[i] + t0 * (g[i + 1] - g[i]);
        double g1 = g[i] + t1 * (g[i + 1] - g[i]);
        auto& lo = cmin[static_cast<std::size_t>(c)];
        auto& hi = cmax[static_cast<std::size_t>(c)];
        lo = std::min(lo, std::min(g0, g1));
        hi = std::max(hi, std::max(g0, g1));
      }
    }
    std::int64_t nj = 0;
    for (std::int64_t c = 0; c < ncols; ++c)
      if (cmin[static_cast<std::size_t>(c)] <= y && y <= cmax[static_cast<std::size_t>(c)]) ++nj;
    res.levels.push_back(j);
    res.counts.push_back(nj);
  }
  res.fit = fit_dimension(res.levels, res.counts, j_min, j_max, b);
  return res;
}

}  // namespace cascade
