#include "cascade/gridmap.hpp"

#include <algorithm>
#include <cmath>

#include "cascade/errors.hpp"
#include "cascade/rng.hpp"

namespace cascade {

using rng::derive_stream;
using rng::unit01;

namespace {

double accumulate_total(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc;
}

// Cumulative mass at bin edges: C[0] = 0, C[k] = sum of the first k bins.
std::vector<double> edge_cumulative(const std::vector<double>& mass) {
  std::vector<double> c(mass.size() + 1);
  c[0] = 0.0;
  for (std::size_t i = 0; i < mass.size(); ++i) c[i + 1] = c[i] + mass[i];
  return c;
}

double interp_cumulative(const std::vector<double>& c, double pos_units) {
  double nbins = static_cast<double>(c.size() - 1);
  double a = std::clamp(pos_units, 0.0, nbins);
  std::size_t ia = static_cast<std::size_t>(a);
  std::size_t ib = std::min(ia + 1, c.size() - 1);
  return c[ia] + (a - static_cast<double>(ia)) * (c[ib] - c[ia]);
}

}  // namespace

double GriddedMap1D::total() const { return accumulate_total(mass); }

double GriddedMap1D::ball_mass(double x, double r) const {
  std::vector<double> c = edge_cumulative(mass);
  double w = bin_width();
  double a = (x - r - lo) / w;
  double b = (x + r - lo) / w;
  return interp_cumulative(c, b) - interp_cumulative(c, a);
}

double GriddedMap2D::total() const { return accumulate_total(mass); }

void deposit_interval(GriddedMap1D& map, double a, double b, double amount) {
  if (amount == 0.0) return;
  const double w = map.bin_width();
  const std::int64_t nbins = static_cast<std::int64_t>(map.mass.size());
  auto bin_of = [&](double x) {
    std::int64_t i = static_cast<std::int64_t>(std::floor((x - map.lo) / w));
    return std::clamp<std::int64_t>(i, 0, nbins - 1);
  };
  if (b < a) std::swap(a, b);
  if (b - a <= 0.0) {
    map.mass[static_cast<std::size_t>(bin_of(a))] += amount;
    return;
  }
  std::int64_t i0 = bin_of(a), i1 = bin_of(b);
  if (i0 == i1) {
    map.mass[static_cast<std::size_t>(i0)] += amount;
    return;
  }
  const double len = b - a;
  for (std::int64_t i = i0; i <= i1; ++i) {
    double edge_lo = map.lo + w * static_cast<double>(i);
    double edge_hi = edge_lo + w;
    double ov = std::min(b, edge_hi) - std::max(a, edge_lo);
    if (ov > 0.0) map.mass[static_cast<std::size_t>(i)] += amount * (ov / len);
  }
}

std::vector<double> sample_map_points(const GriddedMap1D& map, int count, std::uint64_t seed) {
  std::vector<double> c = edge_cumulative(map.mass);
  double total = c.back();
  if (!(total > 0.0)) throw DegenerateError("cannot sample from an empty mass map");
  std::vector<double> pts;
  pts.reserve(static_cast<std::size_t>(count));
  const double w = map.bin_width();
  for (int i = 0; i < count; ++i) {
    double u = unit01(derive_stream(seed, static_cast<std::uint64_t>(i))) * total;
    std::size_t bin = static_cast<std::size_t>(
        std::upper_bound(c.begin(), c.end(), u) - c.begin());
    bin = bin > 0 ? bin - 1 : 0;
    bin = std::min(bin, map.mass.size() - 1);
    pts.push_back(map.lo + (static_cast<double>(bin) + 0.5) * w);
  }
  return pts;
}

LocalDimResult local_dimension(const GriddedMap1D& map, const std::vector<double>& points,
                               const std::vector<double>& radii) {
  if (radii.size() < 4) throw InvariantError("local_dimension needs at least 4 radii");
  std::vector<double> c = edge_cumulative(map.mass);
  const double w = map.bin_width();
  auto ball = [&](double x, double r) {
    return interp_cumulative(c, (x + r - map.lo) / w) -
           interp_cumulative(c, (x - r - map.lo) / w);
  };

  LocalDimResult out;
  std::vector<double> lr, lm;
  lr.reserve(radii.size());
  for (double r : radii) lr.push_back(std::log(r));
  for (double x : points) {
    lm.clear();
    bool ok = true;
    for (double r : radii) {
      double m = ball(x, r);
      if (!(m > 0.0)) {
        ok = false;
        break;
      }
      lm.push_back(std::log(m));
    }
    if (!ok) {
      ++out.excluded;
      continue;
    }
    // OLS slope of log mass against log radius
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    double np = static_cast<double>(lr.size());
    for (std::size_t i = 0; i < lr.size(); ++i) {
      sx += lr[i];
      sy += lm[i];
      sxx += lr[i] * lr[i];
      sxy += lr[i] * lm[i];
    }
    out.slopes.push_back((np * sxy - sx * sy) / (np * sxx - sx * sx));
  }
  if (out.slopes.empty())
    throw EmptyBallError("every sample point had an empty smallest ball");
  std::vector<double> sorted = out.slopes;
  std::sort(sorted.begin(), sorted.end());
  std::size_t mid = sorted.size() / 2;
  out.median = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  return out;
}

}  // namespace cascade
