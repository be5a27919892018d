#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cascade/acceptance.hpp"
#include "cascade/csvio.hpp"
#include "cascade/errors.hpp"
#include "cascade/estimators.hpp"
#include "cascade/generator.hpp"
#include "cascade/gridmap.hpp"
#include "cascade/manifest.hpp"
#include "cascade/measures.hpp"
#include "cascade/rng.hpp"
#include "cascade/spectrum.hpp"
#include "cascade/svg.hpp"
#include "cascade/trace.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct QGrid {
  double lo = -5.0, hi = 5.0, step = 0.1;

  std::vector<double> values() const {
    if (!(step > 0.0)) throw cascade::SchemaError("q grid step must be > 0");
    std::vector<double> qs;
    auto count = static_cast<long long>(std::llround((hi - lo) / step));
    if (count < 0) throw cascade::SchemaError("q grid upper bound below lower bound");
    for (long long i = 0; i <= count; ++i) qs.push_back(lo + step * static_cast<double>(i));
    return qs;
  }
};

QGrid parse_q_grid(const std::string& text) {
  QGrid g;
  auto p1 = text.find(':');
  auto p2 = text.find(':', p1 == std::string::npos ? p1 : p1 + 1);
  try {
    if (p1 == std::string::npos) {
      g.lo = g.hi = std::stod(text);
      g.step = 1.0;
    } else if (p2 == std::string::npos) {
      throw cascade::SchemaError("--q expects LO:HI:STEP");
    } else {
      g.lo = std::stod(text.substr(0, p1));
      g.hi = std::stod(text.substr(p1 + 1, p2 - p1 - 1));
      g.step = std::stod(text.substr(p2 + 1));
    }
  } catch (const std::invalid_argument&) {
    throw cascade::SchemaError("--q expects numeric LO:HI:STEP");
  }
  return g;
}

std::pair<int, int> parse_window(const std::string& text) {
  auto p = text.find(':');
  if (p == std::string::npos) throw cascade::SchemaError("--window expects JMIN:JMAX");
  try {
    return {std::stoi(text.substr(0, p)), std::stoi(text.substr(p + 1))};
  } catch (const std::invalid_argument&) {
    throw cascade::SchemaError("--window expects integer JMIN:JMAX");
  }
}

std::string iso_timestamp() {
  std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

// Output directory named by the manifest content digest (timestamp excluded),
// so identical parameters always land in the same place.
fs::path prepare_run_dir(const std::string& out_base, const cascade::RunManifest& man) {
  fs::path dir = fs::path(out_base) / man.digest();
  fs::create_directories(dir);
  std::ofstream mf(dir / "manifest.json");
  mf << man.to_json().dump(2) << "\n";
  return dir;
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  f << content;
}

struct SpecBundle {
  cascade::GeneratorSpec spec;
  json doc;
};

SpecBundle load_spec(const std::string& path) {
  if (!fs::exists(path)) throw cascade::SchemaError("spec file not found: " + path);
  std::ifstream f(path);
  std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  SpecBundle b;
  b.spec = cascade::parse_spec(text);
  b.doc = json::parse(text);
  return b;
}

// Commands whose outputs quote theorem-level quantities refuse laws outside
// the standing assumptions.
void require_assumptions(const cascade::GeneratorSpec& spec) {
  cascade::AssumptionReport rep = cascade::check_assumptions(spec);
  if (rep.a1_holds && rep.a2_holds && rep.a3_holds) return;
  std::string msg = "spec fails standing assumptions:";
  for (const auto& v : rep.violations) msg += " [" + v + "]";
  throw cascade::AssumptionError(msg);
}

cascade::RunManifest make_manifest(const std::string& command, const SpecBundle& sb,
                                   json parameters) {
  cascade::RunManifest man;
  man.command = command;
  man.spec_label = sb.spec.label;
  man.spec_hash = cascade::canonical_spec_hash(sb.doc);
  man.parameters = std::move(parameters);
  man.timestamp = iso_timestamp();
  return man;
}

const char* jclass_name(cascade::JClass c) {
  switch (c) {
    case cascade::JClass::J1: return "J1";
    case cascade::JClass::J2: return "J2";
    case cascade::JClass::J3: return "J3";
  }
  return "";
}

int cmd_spectrum(const SpecBundle& sb, const QGrid& grid, const std::string& out_base) {
  auto man = make_manifest("spectrum", sb,
                           json{{"q_lo", grid.lo}, {"q_hi", grid.hi}, {"q_step", grid.step}});
  fs::path dir = prepare_run_dir(out_base, man);

  cascade::IntervalJ J = cascade::interval_J(sb.spec);
  std::ostringstream csv;
  cascade::CsvWriter w(csv);
  w.row({"q", "tau", "tau_prime", "tau_star", "gammaG", "gammaR", "inJ", "subinterval"});
  std::vector<std::array<double, 2>> curve_star, curve_g, curve_r, curve_l;
  for (double q : grid.values()) {
    cascade::SpectrumPoint pt = cascade::spectrum_point(sb.spec, q);
    bool in_j = J.contains(q);
    std::string sub;
    if (in_j) {
      for (const auto& seg : J.segments)
        if (q > seg.lo && q <= seg.hi) sub = jclass_name(seg.label);
    }
    w.row({cascade::format_double(q), cascade::format_double(pt.tau),
           cascade::format_double(pt.tau_prime), cascade::format_double(pt.tau_star),
           cascade::format_double(pt.gammaG), cascade::format_double(pt.gammaR),
           in_j ? "1" : "0", sub});
    if (in_j && pt.tau_prime > 0) {
      cascade::PredictedSpectra ps = cascade::predicted_spectra(sb.spec, pt.tau_prime);
      curve_star.push_back({pt.tau_prime, pt.tau_star});
      curve_g.push_back({pt.tau_prime, ps.dimG});
      curve_r.push_back({pt.tau_prime, ps.dimR});
      if (std::isfinite(ps.dimL)) curve_l.push_back({pt.tau_prime, ps.dimL});
    }
  }
  write_file(dir / "spectrum.csv", csv.str());

  double hlo = 1e300, hhi = -1e300, vlo = 0.0, vhi = 0.0;
  for (const auto& p : curve_star) {
    hlo = std::min(hlo, p[0]);
    hhi = std::max(hhi, p[0]);
  }
  for (const auto* c : {&curve_star, &curve_g, &curve_r, &curve_l})
    for (const auto& p : *c) vhi = std::max(vhi, p[1]);
  if (curve_star.empty()) {
    hlo = 0;
    hhi = 1;
    vhi = 1;
  }
  cascade::SvgPlot plot(hlo, hhi, vlo, vhi * 1.05 + 0.05);
  plot.axes();
  plot.polyline(curve_star, "#000000", 1.5);
  plot.polyline(curve_g, "#c02020");
  plot.polyline(curve_r, "#2060c0");
  plot.polyline(curve_l, "#208040");
  plot.text(hlo + 0.02 * (hhi - hlo), vhi, "tau* (black), graph (red), range (blue), levelset (green)");
  write_file(dir / "spectrum.svg", plot.render());
  std::cout << dir.string() << "\n";
  return 0;
}

int cmd_simulate(const SpecBundle& sb, int depth, int tail, std::uint64_t seed,
                 const std::string& out_base) {
  auto man = make_manifest("simulate", sb,
                           json{{"depth", depth}, {"tail", tail}, {"seed", seed}});
  fs::path dir = prepare_run_dir(out_base, man);

  cascade::CascadeRealization real = cascade::sample(sb.spec, seed, depth + tail);
  cascade::FunctionTrace trace = cascade::build_trace(real, depth, tail);
  write_file(dir / "trace.csv", cascade::trace_csv(trace));

  auto pts = cascade::compose_F(trace);
  double ylo = 0, yhi = 0;
  for (const auto& p : pts) {
    ylo = std::min(ylo, p[1]);
    yhi = std::max(yhi, p[1]);
  }
  cascade::SvgPlot plot(0.0, trace.fl_total(), ylo, yhi);
  plot.axes();
  plot.polyline(pts, "#202080");
  write_file(dir / "graph.svg", plot.render());
  std::cout << dir.string() << "\n";
  return 0;
}

// Realization seed for sweep stream s: the base seed itself first, so a
// single-seed estimate analyzes the same realization `simulate` samples.
std::uint64_t sweep_seed(std::uint64_t seed, int s) {
  return s == 0 ? seed : cascade::rng::derive_stream(seed, static_cast<std::uint64_t>(s));
}

int cmd_estimate(const SpecBundle& sb, int depth, int tail, std::uint64_t seed, int seeds,
                 const QGrid& grid, int theta_samples, std::pair<int, int> window,
                 const std::string& out_base) {
  require_assumptions(sb.spec);
  auto man = make_manifest(
      "estimate", sb,
      json{{"depth", depth}, {"tail", tail}, {"seed", seed}, {"seeds", seeds},
           {"q_lo", grid.lo}, {"q_hi", grid.hi}, {"q_step", grid.step},
           {"theta_samples", theta_samples}, {"window", {window.first, window.second}}});
  fs::path dir = prepare_run_dir(out_base, man);

  cascade::CascadeRealization real = cascade::sample(sb.spec, seed, depth + tail);
  cascade::FunctionTrace trace = cascade::build_trace(real, depth, tail);
  const auto qs = grid.values();
  const int jmin = window.first, jmax = window.second;

  // cross-seed mean of the per-realization exponent fits
  std::vector<double> tau_hats(qs.size(), 0.0), r2s(qs.size(), 0.0);
  for (int s = 0; s < seeds; ++s) {
    auto fits = s == 0 ? cascade::lq_spectrum(trace, qs, jmin, jmax)
                       : cascade::lq_spectrum(
                             cascade::build_trace(
                                 cascade::sample(sb.spec, sweep_seed(seed, s), depth + tail),
                                 depth, tail),
                             qs, jmin, jmax);
    for (std::size_t i = 0; i < qs.size(); ++i) {
      tau_hats[i] += fits[i].slope / seeds;
      r2s[i] += fits[i].r2 / seeds;
    }
  }
  {
    std::ostringstream csv;
    cascade::CsvWriter w(csv);
    w.row({"q", "tau_hat", "r2"});
    for (std::size_t i = 0; i < qs.size(); ++i)
      w.row({cascade::format_double(qs[i]), cascade::format_double(tau_hats[i]),
             cascade::format_double(r2s[i])});
    write_file(dir / "lq.csv", csv.str());
  }
  {
    cascade::LegendreEstimate leg = cascade::legendre_numeric(qs, tau_hats);
    std::ostringstream csv;
    cascade::CsvWriter w(csv);
    w.row({"h", "d", "low_confidence"});
    for (std::size_t i = 0; i < leg.h.size(); ++i)
      w.row({cascade::format_double(leg.h[i]), cascade::format_double(leg.d[i]),
             leg.low_confidence ? "1" : "0"});
    write_file(dir / "legendre.csv", csv.str());
  }

  cascade::SpectrumPoint p1 = cascade::spectrum_point(sb.spec, 1.0);
  auto emit_boxcount = [&](const std::string& name, const cascade::BoxCountResult& bc,
                           double theoretical) {
    std::ostringstream csv;
    cascade::CsvWriter w(csv);
    w.row({"j", "N_j"});
    for (std::size_t i = 0; i < bc.levels.size(); ++i)
      w.row({cascade::format_int(bc.levels[i]), cascade::format_int(bc.counts[i])});
    write_file(dir / (name + ".csv"), csv.str());

    std::vector<std::array<double, 2>> data;
    double ymax = 0;
    for (std::size_t i = 0; i < bc.levels.size(); ++i) {
      if (bc.counts[i] <= 0) continue;
      double y = std::log2(static_cast<double>(bc.counts[i])) /
                 std::log2(static_cast<double>(trace.b));
      data.push_back({static_cast<double>(bc.levels[i]), y});
      ymax = std::max(ymax, y);
    }
    cascade::SvgPlot plot(0.0, static_cast<double>(trace.depth), 0.0, ymax * 1.05 + 0.05);
    plot.axes();
    plot.polyline(data, "#202080", 1.5);
    double x0 = bc.fit.j_min, x1 = bc.fit.j_max;
    plot.line(x0, bc.fit.slope * x0 + bc.fit.intercept, x1, bc.fit.slope * x1 + bc.fit.intercept,
              "#c02020");
    plot.line(x0, theoretical * x0 + bc.fit.intercept, x1, theoretical * x1 + bc.fit.intercept,
              "#208040");
    plot.text(0.5, ymax, name + ": slope " + cascade::format_double(bc.fit.slope) +
                             ", predicted " + cascade::format_double(theoretical) +
                             (bc.fit.low_r2 ? " (low r2)" : ""));
    write_file(dir / (name + ".svg"), plot.render());
  };

  cascade::PredictedSpectra ps = cascade::predicted_spectra(sb.spec, p1.tau_prime);
  emit_boxcount("boxcount_graph", cascade::box_count_graph(trace, jmin, jmax),
                ps.dim_graph_whole);
  emit_boxcount("boxcount_range", cascade::box_count_range(trace, jmin, jmax), ps.dimR);

  const double pi = std::acos(-1.0);
  cascade::MeasureTable table = cascade::build_mu_q(real, 1.0, trace.depth, trace.tail_depth);
  for (int k = 0; k < theta_samples; ++k) {
    double theta = -pi / 4 +
                   (pi / 2) * cascade::rng::unit01(
                                  cascade::rng::derive_stream(seed, 9000 + static_cast<std::uint64_t>(k)));
    emit_boxcount("boxcount_projection_" + std::to_string(k),
                  cascade::box_count_projection(trace, theta, jmin, jmax), 1.0);
    double u = cascade::rng::unit01(
                   cascade::rng::derive_stream(seed, 9500 + static_cast<std::uint64_t>(k))) *
               table.total;
    std::uint64_t cell = 0;
    double acc = 0;
    for (std::uint64_t i = 0; i < table.mass.size(); ++i) {
      acc += table.mass[i];
      if (acc >= u) {
        cell = i;
        break;
      }
    }
    double y = trace.FL_at[cell] * std::sin(theta) + trace.FW_at[cell] * std::cos(theta);
    double predicted_level = std::isfinite(ps.dimL) ? ps.dimL : 0.0;
    try {
      emit_boxcount("boxcount_levelset_" + std::to_string(k),
                    cascade::box_count_levelset(trace, y, theta, jmin, jmax), predicted_level);
    } catch (const cascade::DegenerateError&) {
      // level value met too few occupied levels; skip this draw
    }
  }
  std::cout << dir.string() << "\n";
  return 0;
}

int cmd_measure(const SpecBundle& sb, int level, int tail, std::uint64_t seed, const QGrid& grid,
                const std::string& out_base) {
  require_assumptions(sb.spec);
  auto man = make_manifest("measure", sb,
                           json{{"level", level}, {"tail", tail}, {"seed", seed},
                                {"q_lo", grid.lo}, {"q_hi", grid.hi}, {"q_step", grid.step}});
  fs::path dir = prepare_run_dir(out_base, man);
  cascade::CascadeRealization real = cascade::sample(sb.spec, seed, level + tail);
  const auto qs = grid.values();
  for (std::size_t qi = 0; qi < qs.size(); ++qi) {
    cascade::MeasureTable t = cascade::build_mu_q(real, qs[qi], level, tail);
    std::ostringstream csv;
    cascade::CsvWriter w(csv);
    w.row({"word", "mass"});
    for (std::uint64_t k = 0; k < t.mass.size(); ++k) {
      cascade::Word word{static_cast<std::uint32_t>(level), k};
      w.row({word.digits_string(t.level == 0 ? 2 : real.b()),
             cascade::format_double(t.mass[k])});
    }
    write_file(dir / ("measure_q" + std::to_string(qi) + ".csv"), csv.str());
  }
  std::cout << dir.string() << "\n";
  return 0;
}

int cmd_energy(const SpecBundle& sb, int depth, std::uint64_t seed, int seeds, const QGrid& grid,
               const std::string& out_base) {
  require_assumptions(sb.spec);
  auto man = make_manifest("energy", sb,
                           json{{"depth", depth}, {"seed", seed}, {"seeds", seeds},
                                {"q_lo", grid.lo}, {"q_hi", grid.hi}, {"q_step", grid.step}});
  fs::path dir = prepare_run_dir(out_base, man);
  std::vector<cascade::CascadeRealization> reals;
  for (int s = 0; s < seeds; ++s)
    reals.push_back(cascade::sample(sb.spec, sweep_seed(seed, s), depth));
  std::ostringstream csv;
  cascade::CsvWriter w(csv);
  w.row({"gamma", "n", "value", "subsampled"});
  const int n_lo = std::min(6, depth);
  for (double q : grid.values()) {
    cascade::SpectrumPoint pt = cascade::spectrum_point(sb.spec, q);
    for (int n = n_lo; n <= depth; ++n) {
      double lo_mean = 0.0, hi_mean = 0.0;
      bool lo_sub = false, hi_sub = false;
      for (const auto& real : reals) {
        cascade::FunctionTrace tr = cascade::build_trace(real, n, 0);
        cascade::MeasureTable tb = cascade::build_mu_q(real, q, n, 0);
        // below the finiteness threshold: planar graph kernel; above: range kernel
        cascade::EnergyEstimate lo =
            cascade::riesz_energy(tb, tr, pt.gammaG - 0.3, cascade::KernelMode::graph);
        cascade::EnergyEstimate hi =
            cascade::riesz_energy(tb, tr, pt.gammaG + 0.3, cascade::KernelMode::range);
        lo_mean += lo.value / seeds;
        hi_mean += hi.value / seeds;
        lo_sub = lo_sub || lo.subsampled;
        hi_sub = hi_sub || hi.subsampled;
      }
      w.row({cascade::format_double(pt.gammaG - 0.3), cascade::format_int(n),
             cascade::format_double(lo_mean), lo_sub ? "1" : "0"});
      w.row({cascade::format_double(pt.gammaG + 0.3), cascade::format_int(n),
             cascade::format_double(hi_mean), hi_sub ? "1" : "0"});
    }
  }
  write_file(dir / "energy.csv", csv.str());
  std::cout << dir.string() << "\n";
  return 0;
}

int cmd_verify(const SpecBundle& sb) {
  require_assumptions(sb.spec);
  auto results = cascade::run_acceptance(sb.spec, cascade::reference_multinomial_spec());
  return cascade::report_acceptance(results);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"b-adic multiplicative cascade toolkit"};
  app.require_subcommand(1);

  std::string spec_path, q_text, window_text, out_base = "out";
  int depth = 12, tail = 6, theta_samples = 8;
  std::uint64_t seed = 0;
  int seeds = 1;

  auto add_common = [&](CLI::App* sub, const char* default_q) {
    sub->add_option("--spec", spec_path, "generator spec JSON")->required();
    sub->add_option("--out", out_base, "output base directory");
    q_text = default_q;
    return sub;
  };

  CLI::App* sp = add_common(app.add_subcommand("spectrum", "exact spectrum tables"), "-5:5:0.1");
  sp->add_option("--q", q_text, "q grid LO:HI:STEP");

  CLI::App* sim = app.add_subcommand("simulate", "sample one cascade trace");
  sim->add_option("--spec", spec_path, "generator spec JSON")->required();
  sim->add_option("--out", out_base, "output base directory");
  sim->add_option("--depth", depth, "trace resolution level");
  sim->add_option("--tail", tail, "tail truncation depth");
  sim->add_option("--seed", seed, "RNG seed");

  CLI::App* est = app.add_subcommand("estimate", "empirical exponents and box counts");
  est->add_option("--spec", spec_path, "generator spec JSON")->required();
  est->add_option("--out", out_base, "output base directory");
  est->add_option("--depth", depth, "trace resolution level");
  est->add_option("--tail", tail, "tail truncation depth");
  est->add_option("--seed", seed, "RNG seed");
  est->add_option("--seeds", seeds, "realizations averaged in the exponent sweep")
      ->check(CLI::Range(1, 65536));
  std::string est_q = "-1:2:0.25";
  est->add_option("--q", est_q, "q grid LO:HI:STEP");
  est->add_option("--theta-samples", theta_samples, "projection/levelset direction draws");
  est->add_option("--window", window_text, "fit window JMIN:JMAX");

  CLI::App* mea = app.add_subcommand("measure", "auxiliary measure tables");
  mea->add_option("--spec", spec_path, "generator spec JSON")->required();
  mea->add_option("--out", out_base, "output base directory");
  int mea_level = 8;
  mea->add_option("--depth", mea_level, "table level");
  mea->add_option("--tail", tail, "tail truncation depth");
  mea->add_option("--seed", seed, "RNG seed");
  std::string mea_q = "1";
  mea->add_option("--q", mea_q, "q grid LO:HI:STEP");

  CLI::App* ene = app.add_subcommand("energy", "Riesz energy growth tables");
  ene->add_option("--spec", spec_path, "generator spec JSON")->required();
  ene->add_option("--out", out_base, "output base directory");
  int ene_depth = 10;
  ene->add_option("--depth", ene_depth, "deepest energy level");
  ene->add_option("--seed", seed, "RNG seed");
  ene->add_option("--seeds", seeds, "realizations averaged per energy row")
      ->check(CLI::Range(1, 65536));
  std::string ene_q = "1";
  ene->add_option("--q", ene_q, "q grid LO:HI:STEP");

  CLI::App* ver = app.add_subcommand("verify", "run the acceptance suite");
  ver->add_option("--spec", spec_path, "canonical generator spec JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    SpecBundle sb = load_spec(spec_path);
    if (sp->parsed()) return cmd_spectrum(sb, parse_q_grid(q_text), out_base);
    if (sim->parsed()) return cmd_simulate(sb, depth, tail, seed, out_base);
    if (est->parsed()) {
      std::pair<int, int> window{4, std::max(5, depth - 2)};
      if (!window_text.empty()) window = parse_window(window_text);
      return cmd_estimate(sb, depth, tail, seed, seeds, parse_q_grid(est_q), theta_samples,
                          window, out_base);
    }
    if (mea->parsed()) return cmd_measure(sb, mea_level, tail, seed, parse_q_grid(mea_q), out_base);
    if (ene->parsed()) return cmd_energy(sb, ene_depth, seed, seeds, parse_q_grid(ene_q), out_base);
    if (ver->parsed()) return cmd_verify(sb);
  } catch (const cascade::SchemaError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const cascade::InvariantError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const cascade::CapacityError& e) {
    std::cerr << e.what() << "\n";
    return 3;
  } catch (const cascade::DepthError& e) {
    std::cerr << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    // assumption violations and numeric domain failures
    std::cerr << e.what() << "\n";
    return 2;
  }
  return 1;
}
