#include "singsurf/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>

#include "singsurf/analytic_shock.hpp"
#include "singsurf/errors.hpp"
#include "singsurf/fds_reference.hpp"
#include "singsurf/lwe_solver.hpp"
#include "singsurf/shock_solver.hpp"
#include "singsurf/surface_analysis.hpp"
#include "singsurf/svg.hpp"

namespace singsurf::app {

namespace fs = std::filesystem;
using config::Config;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
const char* const kNumeric = "#1f4e99";
const char* const kTheory = "#d62728";
const char* const kReference = "#2ca02c";

std::string fmt(double v) { return io::format_double(v); }

std::string short_time(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", t);
  return buf;
}

std::string stem(const std::string& prefix, std::size_t index, double t) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03zu", index);
  return prefix + "_" + buf + "_t" + short_time(t);
}

// Files and manifest accumulate here so that a failing run still leaves a
// consistent record behind.
class Output {
 public:
  Output(const fs::path& dir, RunOutput& out) : dir_(dir), out_(out) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) throw IoError("cannot create output directory '" + dir_.string() + "'");
  }

  void write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    io::write_text(p, text);
    out_.files.push_back(p);
  }

  Config& manifest() { return manifest_; }

  void finish(const std::string& status) {
    manifest_.set("run.status", status);
    const fs::path p = dir_ / "manifest.cfg";
    io::write_text(p, "# singsurf run manifest; loads back as a config\n" + manifest_.to_text());
    out_.manifest = p;
    out_.files.push_back(p);
  }

 private:
  fs::path dir_;
  RunOutput& out_;
  Config manifest_;
};

io::Table profile_table(const std::string& xname, const std::string& yname, const std::vector<double>& x,
                        const std::vector<double>& y) {
  io::Table t;
  t.header = {xname, yname};
  t.columns = {x, y};
  return t;
}

template <class F>
double timed(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void record_counters(Config& m, const kss::Counters& c) {
  m.set("counters.operator_applications", std::to_string(c.operator_applications));
  m.set("counters.transforms", std::to_string(c.transforms));
  m.set("counters.matrix_function_products", std::to_string(c.matrix_function_products));
  m.set("counters.lanczos_runs", std::to_string(c.lanczos_runs));
  m.set("counters.lanczos_iterations", std::to_string(c.lanczos_iterations));
  m.set("counters.lanczos_min_iterations", std::to_string(c.lanczos_min_iterations));
  m.set("counters.lanczos_max_iterations", std::to_string(c.lanczos_max_iterations));
}

// Runs body, then writes the manifest with the outcome. Errors propagate.
void guarded(Output& o, const std::function<void()>& body) {
  try {
    const double s = timed(body);
    o.manifest().set("run.seconds", s);
    o.finish("ok");
  } catch (const Error& e) {
    o.manifest().set("run.error", e.what());
    o.finish("failed");
    throw;
  }
}

// ---- shared parameter blocks ------------------------------------------------

surface::IsothermalShockParams read_shock_params(const Config& c, Config& m) {
  surface::IsothermalShockParams p;
  p.c0 = c.get_double("c0", p.c0);
  p.gamma = c.get_double("gamma", p.gamma);
  p.g = c.get_double("g", p.g);
  p.mu_hat = c.get_double("mu_hat", 2.0 * p.gamma * p.g / p.c0);
  p.omega = c.get_double("omega", p.omega);
  p.W0 = c.get_double("W0", p.W0);
  p.validate();
  m.set("c0", p.c0);
  m.set("gamma", p.gamma);
  m.set("g", p.g);
  m.set("mu_hat", p.mu_hat);
  m.set("omega", p.omega);
  m.set("W0", p.W0);
  m.set("derived.mu_c", p.mu_c());
  m.set("derived.scale_height", p.scale_height());
  m.set("derived.chi", p.chi());
  m.set("derived.front_velocity", surface::shock_front_velocity(p));
  return p;
}

surface::LweParams read_lwe_params(const Config& c, Config& m) {
  surface::LweParams p;
  p.gamma = c.get_double("gamma", p.gamma);
  p.epsilon = c.get_double("epsilon", p.epsilon);
  p.validate(false);
  const std::string alpha = c.get("alpha", "auto");
  std::optional<surface::LweCritical> crit;
  try {
    crit = surface::lwe_critical(p.gamma, p.epsilon);
  } catch (const DomainError&) {
    if (alpha == "auto") throw;
  }
  p.alpha = alpha == "auto" ? crit->alpha_bullet : c.get_double("alpha", 0.0);
  p.validate(true);
  m.set("gamma", p.gamma);
  m.set("epsilon", p.epsilon);
  m.set("alpha", p.alpha);
  m.set("derived.beta_hat", p.beta_hat());
  m.set("derived.epsilon_bullet", p.epsilon_bullet());
  m.set("derived.alpha_bullet", crit ? fmt(crit->alpha_bullet) : std::string("none"));
  const auto t = surface::lwe_times(p);
  m.set("derived.t1", t.t1);
  m.set("derived.t_f", t.t_f);
  m.set("derived.alpha_crt", t.alpha_crt);
  m.set("derived.t_infty", t.t_infty ? fmt(*t.t_infty) : std::string("none"));
  m.set("derived.t_bd", t.t_bd ? fmt(*t.t_bd) : std::string("none"));
  return p;
}

PowerLaw read_power(const Config& c, Config& m, const std::string& key, const PowerLaw& fallback) {
  PowerLaw pl = fallback;
  pl.scale = c.get_double(key, pl.scale);
  pl.shape = parse_power_shape(c.get(key + "_shape", to_string(pl.shape)));
  pl.t_end = c.get_double(key + "_t_end", pl.t_end);
  m.set(key, pl.scale);
  m.set(key + "_shape", to_string(pl.shape));
  m.set(key + "_t_end", pl.t_end);
  return pl;
}

kss::LanczosOptions read_lanczos(const Config& c, Config& m) {
  kss::LanczosOptions l;
  l.tol = c.get_double("lanczos_tol", l.tol);
  l.k_max = static_cast<int>(c.get_size("lanczos_kmax", static_cast<std::size_t>(l.k_max)));
  m.set("lanczos_tol", l.tol);
  m.set("lanczos_kmax", std::to_string(l.k_max));
  return l;
}

// ---- LWE profile output -------------------------------------------------------

struct FrontRow {
  double t, measured_front, measured_slope, theory_front, theory_slope;
};

struct LweMeasure {
  double threshold = 1e-2, fit_far = 0.02, fit_near = 0.001;
};

LweMeasure read_measure(const Config& c, Config& m) {
  LweMeasure s;
  s.threshold = c.get_double("front_threshold", s.threshold);
  s.fit_far = c.get_double("fit_far", s.fit_far);
  s.fit_near = c.get_double("fit_near", s.fit_near);
  if (!(s.threshold > 0.0 && s.threshold < 1.0)) throw ConfigError("front_threshold must lie in (0, 1)");
  if (!(s.fit_far > s.fit_near && s.fit_near >= 0.0)) throw ConfigError("need fit_far > fit_near >= 0");
  m.set("front_threshold", s.threshold);
  m.set("fit_far", s.fit_far);
  m.set("fit_near", s.fit_near);
  return s;
}

FrontRow lwe_front_row(const surface::LweParams& p, const LweMeasure& ms, double t, const std::vector<double>& x,
                       const std::vector<double>& pr) {
  const auto f = lwe::measure_lwe_front(x, pr, ms.threshold, ms.fit_far, ms.fit_near);
  const auto j = surface::lwe_jumps(p, t);
  return {t, f.position, f.slope, surface::lwe_front(p, t).position, j.jump_px};
}

std::string fronts_csv(const std::vector<FrontRow>& rows) {
  io::Table t;
  t.header = {"T", "measured_front", "measured_slope", "theory_front", "theory_slope"};
  t.columns.assign(5, {});
  for (const auto& r : rows) {
    t.columns[0].push_back(r.t);
    t.columns[1].push_back(r.measured_front);
    t.columns[2].push_back(r.measured_slope);
    t.columns[3].push_back(r.theory_front);
    t.columns[4].push_back(r.theory_slope);
  }
  return t.to_csv();
}

// Profile read back from its CSV, with the theory tangent
// (X - ram(T)) [P_X](T) behind the front and the front itself.
std::string lwe_svg(const std::string& title, const io::Table& data, const FrontRow& row,
                    const io::Table* reference, const std::string& ref_label) {
  svg::Plot plot;
  plot.title = title;
  plot.x_label = "X";
  plot.y_label = "P";
  plot.series.push_back({data.columns[0], data.columns[1], "numerical", kNumeric});
  if (reference) plot.series.push_back({reference->columns[0], reference->columns[1], ref_label, kReference, false, 1.0});
  if (std::isfinite(row.theory_slope)) {
    svg::Series tangent;
    tangent.label = "(X - ram(T)) [P_X](T)";
    tangent.color = kTheory;
    tangent.dashed = true;
    const double x0 = std::max(0.0, row.theory_front - 0.25);
    for (double x : {x0, row.theory_front}) {
      tangent.x.push_back(x);
      tangent.y.push_back((x - row.theory_front) * row.theory_slope);
    }
    plot.series.push_back(tangent);
    double lo = 0, hi = 0;
    for (double v : data.columns[1]) lo = std::min(lo, v), hi = std::max(hi, v);
    const double pad = 0.1 * std::max(hi - lo, 1e-3);
    plot.y_min = lo - pad;
    plot.y_max = hi + pad;
  }
  plot.vertical.push_back({row.theory_front, "front ram(T)", kTheory, true});
  return plot.render();
}

// ---- experiments ---------------------------------------------------------------

void run_shock(const Config& c, Output& o) {
  Config& m = o.manifest();
  shock::ShockConfig sc;
  sc.params = read_shock_params(c, m);
  sc.n = c.get_size("n", sc.n);
  sc.cfl = c.get_double("cfl", sc.cfl);
  sc.ell = c.get_double("ell", 0.0);
  if (sc.ell == 0.0) sc.ell = sc.domain_length();
  sc.lift_cells = c.get_double("lift_cells", sc.lift_cells);
  sc.t_end = c.get_double("t_end", sc.t_end);
  sc.snapshots = c.get_list("snapshots", sc.snapshots);
  sc.backend = kss::parse_backend(c.get("backend", kss::to_string(sc.backend)));
  sc.power_u.t_end = sc.t_end;
  sc.power_ut.t_end = sc.t_end;
  sc.power_u = read_power(c, m, "power_u", sc.power_u);
  sc.power_ut = read_power(c, m, "power_ut", sc.power_ut);
  sc.source = shock::parse_source_mode(c.get("source", to_string(sc.source)));
  sc.damping = shock::parse_damping_mode(c.get("damping", to_string(sc.damping)));
  sc.laplacian = shock::parse_laplacian(c.get("laplacian", to_string(sc.laplacian)));
  sc.lanczos = read_lanczos(c, m);
  c.reject_unused();
  m.set("n", std::to_string(sc.n));
  m.set("cfl", sc.cfl);
  m.set("ell", sc.ell);
  m.set("lift_cells", sc.lift_cells);
  m.set("t_end", sc.t_end);
  m.set("snapshots", config::format_list(sc.snapshots));
  m.set("backend", kss::to_string(sc.backend));
  m.set("source", to_string(sc.source));
  m.set("damping", to_string(sc.damping));
  m.set("laplacian", to_string(sc.laplacian));
  m.set("derived.dz", sc.dz());
  sc.validate();

  guarded(o, [&] {
    const auto run = shock::solve_shock(sc);
    record_counters(m, run.counters);
    m.set("run.steps", std::to_string(run.steps));
    io::Table fronts;
    fronts.header = {"t", "measured_front", "measured_jump", "theory_front", "theory_jump"};
    fronts.columns.assign(5, {});
    for (std::size_t i = 0; i < run.snapshots.size(); ++i) {
      const auto& s = run.snapshots[i];
      const auto data = profile_table("z", "w", s.z, s.w);
      const std::string name = stem("shock", i, s.t);
      o.write(name + ".csv", data.to_csv());
      const auto f = shock::measure_shock_front(s.z, s.w);
      const double amp = surface::shock_amplitude(sc.params, s.t);
      const double front = surface::shock_front(sc.params, s.t);
      fronts.columns[0].push_back(s.t);
      fronts.columns[1].push_back(s.t > 0.0 ? f.position : kNaN);
      fronts.columns[2].push_back(s.t > 0.0 ? f.jump : kNaN);
      fronts.columns[3].push_back(front);
      fronts.columns[4].push_back(amp);

      const auto back = io::parse_csv(data.to_csv());
      svg::Plot plot;
      plot.title = "shock, t = " + short_time(s.t) + " s";
      plot.x_label = "z (m)";
      plot.y_label = "w (m/s)";
      plot.series.push_back({back.columns[0], back.columns[1], "numerical", kNumeric});
      plot.horizontal.push_back({amp, "W0 exp(-(mu_hat - mu_c) t/2)", kTheory, true});
      plot.horizontal.push_back({-amp, "", kTheory, true});
      plot.vertical.push_back({front, "front c0 t", kTheory, true});
      o.write(name + ".svg", plot.render());
    }
    o.write("shock_fronts.csv", fronts.to_csv());
  });
}

void run_shock_analytic(const Config& c, Output& o) {
  Config& m = o.manifest();
  const auto p = read_shock_params(c, m);
  const std::size_t n = c.get_size("n", 1024);
  const double ell = c.get_double("ell", 40.0 * p.c0);
  const auto snaps = c.get_list("snapshots", {0.5, 5.0, 10.0});
  const double tol = c.get_double("quad_tol", 1e-8);
  c.reject_unused();
  if (n < 2) throw ConfigError("n must be at least 2");
  if (!(ell > 0.0)) throw ConfigError("ell must be positive");
  if (snaps.empty()) throw ConfigError("at least one snapshot time is required");
  m.set("n", std::to_string(n));
  m.set("ell", ell);
  m.set("snapshots", config::format_list(snaps));
  m.set("quad_tol", tol);

  guarded(o, [&] {
    std::vector<double> z(n);
    for (std::size_t j = 0; j < n; ++j) z[j] = ell * static_cast<double>(j) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < snaps.size(); ++i) {
      if (!(snaps[i] >= 0.0)) throw ConfigError("snapshot times must be >= 0");
      const auto table = analytic::analytic_profile(p, snaps[i], z, tol);
      const std::string name = stem("analytic", i, snaps[i]);
      o.write(name + ".csv", table.to_csv());
      const auto back = io::parse_csv(table.to_csv());
      svg::Plot plot;
      plot.title = "exact signalling solution, t = " + short_time(snaps[i]) + " s";
      plot.x_label = "z (m)";
      plot.y_label = "w (m/s)";
      plot.series.push_back({back.columns[0], back.columns[1], "exact", kNumeric});
      plot.series.push_back({back.columns[0], back.columns[2], "small-time", "#ff7f0e", true});
      plot.series.push_back({back.columns[0], back.columns[3], "large-time", kReference, true});
      const double amp = surface::shock_amplitude(p, snaps[i]);
      plot.horizontal.push_back({amp, "jump height", kTheory, true});
      plot.vertical.push_back({surface::shock_front(p, snaps[i]), "front c0 t", kTheory, true});
      o.write(name + ".svg", plot.render());
    }
  });
}

void run_lwe(const Config& c, Output& o) {
  Config& m = o.manifest();
  lwe::LweConfig lc;
  lc.params = read_lwe_params(c, m);
  lc.alpha_auto = false;
  lc.n = c.get_size("n", lc.n);
  lc.cfl = c.get_double("cfl", lc.cfl);
  lc.t_end = c.get_double("t_end", 0.0);
  lc.t_end = lc.resolved_t_end();
  lc.snapshots = c.get_list("snapshots", {});
  lc.snapshots = lc.resolved_snapshots();
  lc.backend = kss::parse_backend(c.get("backend", kss::to_string(lc.backend)));
  lc.power_ut = read_power(c, m, "power_ut", lc.resolved_power_ut());
  lc.power_utt = read_power(c, m, "power_utt", lc.resolved_power_utt());
  lc.lift_ell = c.get_double("lift_ell", lc.lift_ell);
  const std::string src = c.get("lift_source", "midpoint");
  if (src != "midpoint" && src != "left") throw ConfigError("lift_source must be midpoint or left");
  lc.source = src == "left" ? lwe::LiftSource::left : lwe::LiftSource::midpoint;
  lc.lanczos = read_lanczos(c, m);
  const auto ms = read_measure(c, m);
  const std::size_t fds_m = c.get_size("compare_fds_m", 0);
  c.reject_unused();
  m.set("n", std::to_string(lc.n));
  m.set("cfl", lc.cfl);
  m.set("t_end", lc.t_end);
  m.set("snapshots", config::format_list(lc.snapshots));
  m.set("backend", kss::to_string(lc.backend));
  m.set("lift_ell", lc.lift_ell);
  m.set("lift_source", src);
  m.set("compare_fds_m", std::to_string(fds_m));
  m.set("derived.dy", lc.dy());
  lc.validate();

  std::vector<FrontRow> rows;
  std::vector<io::Table> profiles;
  kss::Counters counters;
  const auto emit = [&](const lwe::LweSnapshot& s) {
    const auto data = profile_table("X", "P", s.x, s.p);
    o.write(stem("lwe", profiles.size(), s.t) + ".csv", data.to_csv());
    rows.push_back(lwe_front_row(lc.params, ms, s.t, s.x, s.p));
    profiles.push_back(io::parse_csv(data.to_csv()));
  };

  guarded(o, [&] {
    try {
      const auto run = lwe::solve_lwe(lc, emit, &counters);
      m.set("run.steps", std::to_string(run.steps));
    } catch (const Error&) {
      record_counters(m, counters);
      o.write("lwe_fronts.csv", fronts_csv(rows));
      for (std::size_t i = 0; i < profiles.size(); ++i) {
        o.write(stem("lwe", i, rows[i].t) + ".svg",
                lwe_svg("LWE (KSS), T = " + short_time(rows[i].t), profiles[i], rows[i], nullptr, ""));
      }
      throw;
    }
    record_counters(m, counters);
    o.write("lwe_fronts.csv", fronts_csv(rows));

    std::vector<io::Table> refs;
    if (fds_m > 0) {
      try {
        const auto ref = fds::fds_solve(lc.params, fds_m, surface::lwe_times(lc.params).t_f, lc.snapshots);
        for (std::size_t i = 0; i < ref.snapshots.size(); ++i) {
          const auto& s = ref.snapshots[i];
          const auto data = profile_table("X", "P", s.x, s.p);
          o.write(stem("lwe_fds", i, s.requested) + ".csv", data.to_csv());
          refs.push_back(io::parse_csv(data.to_csv()));
        }
        m.set("run.fds_status", "ok");
      } catch (const NumericalError& e) {
        m.set("run.fds_status", std::string("failed: ") + e.what());
      }
    }
    for (std::size_t i = 0; i < profiles.size(); ++i) {
      const io::Table* ref = i < refs.size() ? &refs[i] : nullptr;
      o.write(stem("lwe", i, rows[i].t) + ".svg",
              lwe_svg("LWE (KSS), T = " + short_time(rows[i].t), profiles[i], rows[i], ref,
                      "FDS M = " + std::to_string(fds_m)));
    }
  });
}

void run_lwe_fds(const Config& c, Output& o) {
  Config& m = o.manifest();
  const auto p = read_lwe_params(c, m);
  const std::size_t mm = c.get_size("m", 2048);
  const double t_f = c.get_double("t_f", surface::lwe_times(p).t_f);
  auto snaps = c.get_list("snapshots", {0.3, 0.6, surface::lwe_front_arrival(p, 0.95)});
  const double min_den = c.get_double("min_denominator", 1e-6);
  const auto ms = read_measure(c, m);
  c.reject_unused();
  m.set("m", std::to_string(mm));
  m.set("t_f", t_f);
  m.set("snapshots", config::format_list(snaps));
  m.set("min_denominator", min_den);
  fds::FdsGrid{mm, t_f}.validate();
  m.set("derived.dx", fds::FdsGrid{mm, t_f}.dx());
  m.set("derived.dt", fds::FdsGrid{mm, t_f}.dt());

  guarded(o, [&] {
    const auto run = fds::fds_solve(p, mm, t_f, snaps, min_den);
    m.set("run.min_denominator", run.min_denominator);
    std::vector<FrontRow> rows;
    for (std::size_t i = 0; i < run.snapshots.size(); ++i) {
      const auto& s = run.snapshots[i];
      m.set("run.snapshot_offset." + std::to_string(i), s.offset);
      const auto data = profile_table("X", "P", s.x, s.p);
      const std::string name = stem("fds", i, s.requested);
      o.write(name + ".csv", data.to_csv());
      rows.push_back(lwe_front_row(p, ms, s.t, s.x, s.p));
      o.write(name + ".svg", lwe_svg("LWE (FDS), T = " + short_time(s.t), io::parse_csv(data.to_csv()), rows.back(),
                                     nullptr, ""));
    }
    o.write("fds_fronts.csv", fronts_csv(rows));
  });
}

void run_analyze(const Config& c, Output& o) {
  Config& m = o.manifest();
  const auto p = read_lwe_params(c, m);
  read_shock_params(c, m);
  const auto tt = surface::lwe_times(p);
  std::vector<double> def;
  for (int i = 0; i <= 40; ++i) def.push_back(tt.t_f * i / 40.0);
  const auto times = c.get_list("times", def);
  c.reject_unused();
  m.set("times", config::format_list(times));

  guarded(o, [&] {
    const auto report = surface::lwe_report(p, times);
    o.write("lwe_report.csv", report.to_csv());
    const auto back = io::parse_csv(report.to_csv());
    svg::Plot plot;
    plot.title = "acceleration-wave jump, epsilon = " + short_time(p.epsilon);
    plot.x_label = "T";
    plot.y_label = "[P_X](T)";
    plot.series.push_back({back.column("T"), back.column("jump_px"), "[P_X]", kNumeric});
    if (tt.t_infty) plot.vertical.push_back({*tt.t_infty, "blow-up time", kTheory, true});
    plot.vertical.push_back({tt.t1, "front reaches X = 1", kReference, true});
    double lo = 0;
    for (double v : back.column("jump_px")) {
      if (std::isfinite(v)) lo = std::min(lo, v);
    }
    plot.y_min = std::max(lo, -50.0) * 1.05 - 0.1;
    plot.y_max = 0.5;
    o.write("lwe_report.svg", plot.render());
  });
}

}  // namespace

void run(const Config& cfg, const fs::path& out_dir, RunOutput& out) {
  const std::string experiment = cfg.get("experiment", "");
  if (experiment.empty()) throw ConfigError("missing key 'experiment'");
  out.experiment = experiment;
  Output o(out_dir, out);
  o.manifest().set("experiment", experiment);
  // Recorded for reproducibility; the solvers themselves are deterministic.
  o.manifest().set("seed", cfg.get("seed", "0"));
  if (experiment == "shock") {
    run_shock(cfg, o);
  } else if (experiment == "shock-analytic") {
    run_shock_analytic(cfg, o);
  } else if (experiment == "lwe") {
    run_lwe(cfg, o);
  } else if (experiment == "lwe-fds") {
    run_lwe_fds(cfg, o);
  } else if (experiment == "analyze") {
    run_analyze(cfg, o);
  } else {
    throw ConfigError("unknown experiment '" + experiment + "'");
  }
  std::ostringstream s;
  s << experiment << ": wrote " << out.files.size() << " files to " << out_dir.string();
  out.summary = s.str();
}

// ---- comparison ------------------------------------------------------------------

Region parse_region(const std::string& text) {
  Region r;
  r.text = text;
  if (text.empty() || text == "all") return r;
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ':')) parts.push_back(item);
  if (parts.size() != 3) throw UsageError("region '" + text + "': expected all, range:LO:HI, behind:F:C or ahead:F:C");
  if (parts[0] == "range") {
    r.kind = Region::Kind::range;
  } else if (parts[0] == "behind") {
    r.kind = Region::Kind::behind;
  } else if (parts[0] == "ahead") {
    r.kind = Region::Kind::ahead;
  } else {
    throw UsageError("region '" + text + "': unknown kind '" + parts[0] + "'");
  }
  try {
    std::size_t used = 0;
    r.a = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("trailing");
    r.b = std::stod(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw UsageError("region '" + text + "': bad number");
  }
  if (r.kind == Region::Kind::range && !(r.a < r.b)) throw UsageError("region '" + text + "': need LO < HI");
  if (r.kind != Region::Kind::range && !(r.b >= 0)) throw UsageError("region '" + text + "': CELLS must be >= 0");
  return r;
}

std::string CompareReport::line() const {
  return "compare column=" + column + " region=" + region + " points=" + std::to_string(points) +
         " max_abs=" + fmt(max_abs) + " mean_abs=" + fmt(mean_abs) + " max_at=" + fmt(max_at);
}

CompareReport compare(const io::Table& a, const io::Table& b, const Region& region, const std::string& column) {
  if (a.columns.size() < 2 || b.columns.size() < 2) throw UsageError("compare: each table needs two columns");
  if (a.header[0] != b.header[0]) {
    throw UsageError("compare: first columns differ ('" + a.header[0] + "' vs '" + b.header[0] + "')");
  }
  const std::string col = column.empty() ? a.header[1] : column;
  if (!a.has_column(col) || !b.has_column(col)) throw UsageError("compare: column '" + col + "' missing");
  const auto& xa = a.columns[0];
  const auto& ya = a.column(col);
  const auto& xb = b.columns[0];
  const auto& yb = b.column(col);
  if (xa.size() < 2 || xb.size() < 2) throw UsageError("compare: tables need at least two rows");
  for (std::size_t j = 1; j < xb.size(); ++j) {
    if (!(xb[j] > xb[j - 1])) throw UsageError("compare: abscissa of the second table must increase");
  }
  bool same_grid = xa.size() == xb.size();
  for (std::size_t j = 0; same_grid && j < xa.size(); ++j) {
    same_grid = std::abs(xa[j] - xb[j]) <= 1e-12 * std::max(1.0, std::abs(xa[j]));
  }
  const double dx = xa[1] - xa[0];
  double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
  switch (region.kind) {
    case Region::Kind::all: break;
    case Region::Kind::range: lo = region.a, hi = region.b; break;
    case Region::Kind::behind: hi = region.a - region.b * dx; break;
    case Region::Kind::ahead: lo = region.a + region.b * dx; break;
  }

  CompareReport r;
  r.column = col;
  r.region = region.text;
  double sum = 0.0;
  for (std::size_t j = 0; j < xa.size(); ++j) {
    const double x = xa[j];
    if (x < lo || x > hi || !std::isfinite(ya[j])) continue;
    double other;
    if (same_grid) {
      other = yb[j];
    } else {
      if (x < xb.front() || x > xb.back()) continue;
      const auto it = std::upper_bound(xb.begin(), xb.end(), x);
      const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(it - xb.begin()), xb.size() - 1);
      const double t = (x - xb[k - 1]) / (xb[k] - xb[k - 1]);
      other = yb[k - 1] * (1.0 - t) + yb[k] * t;
    }
    if (!std::isfinite(other)) continue;
    const double d = std::abs(ya[j] - other);
    if (d > r.max_abs || r.points == 0) {
      r.max_abs = d;
      r.max_at = x;
    }
    sum += d;
    ++r.points;
  }
  if (r.points == 0) throw UsageError("compare: region '" + region.text + "' holds no comparable points");
  r.mean_abs = sum / static_cast<double>(r.points);
  return r;
}

CompareReport compare_files(const fs::path& a, const fs::path& b, const std::string& region,
                            const std::string& column) {
  return compare(io::read_csv(a), io::read_csv(b), parse_region(region), column);
}

}  // namespace singsurf::app
