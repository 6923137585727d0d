#include "singsurf/shock_solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>

#include "singsurf/csv.hpp"
#include "singsurf/errors.hpp"
#include "singsurf/specfun.hpp"

namespace singsurf {

QuarticBasis::QuarticBasis(double ell) : ell_(ell) {
  if (!(ell > 0.0) || !std::isfinite(ell)) throw ConfigError("lift cutoff must be positive");
  // Unknowns (c1, c3, c4); rows: value, first and second derivative at s = 1.
  Eigen::Matrix3d m;
  m << 1, 1, 1, 1, 3, 4, 0, 6, 12;
  Eigen::FullPivLU<Eigen::Matrix3d> lu(m);
  if (lu.rank() < 3) throw ConfigError("lift system is singular");
  const Eigen::Vector3d ca = lu.solve(Eigen::Vector3d(-1, 0, 0));
  const Eigen::Vector3d cb = lu.solve(Eigen::Vector3d(-1, -2, -2));
  a_ = {1.0, ca(0), 0.0, ca(1), ca(2)};
  b_ = {0.0, cb(0), 1.0, cb(1), cb(2)};
}

QuarticBasis::Values QuarticBasis::at(double z) const {
  Values v;
  if (!(z < ell_) || z < 0.0) return v;
  const double s = z / ell_;
  const auto poly = [s](const std::array<double, 5>& c, double& f, double& d1, double& d2) {
    f = c[0] + s * (c[1] + s * (c[2] + s * (c[3] + s * c[4])));
    d1 = c[1] + s * (2 * c[2] + s * (3 * c[3] + s * 4 * c[4]));
    d2 = 2 * c[2] + s * (6 * c[3] + s * 12 * c[4]);
  };
  double f, d1, d2;
  poly(a_, f, d1, d2);
  v.A = f;
  v.A_z = d1 / ell_;
  v.A_zz = d2 / (ell_ * ell_);
  poly(b_, f, d1, d2);
  v.B = f * ell_ * ell_;
  v.B_z = d1 * ell_;
  v.B_zz = d2;
  return v;
}

double PowerLaw::operator()(double t) const {
  if (scale == 0.0) return 0.0;
  if (shape == Shape::constant) return scale;
  if (!(t_end > 0.0)) return 0.0;
  const double r = t / t_end;
  switch (shape) {
    case Shape::decreasing_square: return scale * std::max(0.0, 1.0 - r) * std::max(0.0, 1.0 - r);
    case Shape::increasing_linear: return scale * r;
    case Shape::increasing_square: return scale * r * r;
    case Shape::constant: break;
  }
  return scale;
}

std::string to_string(PowerLaw::Shape shape) {
  switch (shape) {
    case PowerLaw::Shape::constant: return "constant";
    case PowerLaw::Shape::decreasing_square: return "decreasing-square";
    case PowerLaw::Shape::increasing_linear: return "increasing-linear";
    case PowerLaw::Shape::increasing_square: return "increasing-square";
  }
  return "constant";
}

PowerLaw::Shape parse_power_shape(const std::string& name) {
  for (auto s : {PowerLaw::Shape::constant, PowerLaw::Shape::decreasing_square, PowerLaw::Shape::increasing_linear,
                 PowerLaw::Shape::increasing_square}) {
    if (to_string(s) == name) return s;
  }
  throw ConfigError("unknown power shape '" + name + "'");
}

std::vector<TimeSegment> plan_segments(const std::vector<double>& stops, double dt_max) {
  if (!(dt_max > 0.0) || !std::isfinite(dt_max)) throw ConfigError("time step must be positive");
  std::vector<double> s = stops;
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  std::vector<TimeSegment> out;
  double t = 0.0;
  for (double stop : s) {
    if (stop < 0.0 || !std::isfinite(stop)) throw ConfigError("output times must be finite and >= 0");
    const double gap = stop - t;
    if (gap <= 0.0) {
      out.push_back({t, t, 0, 0.0});
      continue;
    }
    const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(gap / dt_max * (1.0 - 1e-12))));
    out.push_back({t, stop, steps, gap / static_cast<double>(steps)});
    t = stop;
  }
  return out;
}

std::vector<TimeSegment> plan_segments(const std::vector<double>& stops, double dt_max, double t_final) {
  auto out = plan_segments(stops, dt_max);
  const double t = out.empty() ? 0.0 : out.back().t_end;
  if (!std::isfinite(t_final)) throw ConfigError("final time must be finite");
  if (t_final > t) {
    auto tail = plan_segments({t_final - t}, dt_max);
    for (auto& seg : tail) {
      seg.t_begin += t;
      seg.t_end = t_final;
      seg.output = false;
      out.push_back(seg);
    }
  }
  return out;
}

namespace shock {

double TransformedProblem::psi(double z) const { return std::exp(a1 * z / (2.0 * a2)); }

TransformedProblem transform_problem(const IsothermalShockParams& p, double ell) {
  p.validate();
  if (!(ell > 0.0)) throw ConfigError("domain length must be positive");
  TransformedProblem t;
  t.a2 = p.c0 * p.c0;
  t.a1 = p.gamma * p.g;
  t.a0 = t.a1 * t.a1 / (4.0 * t.a2);
  return t;
}

ShockLift::ShockLift(const IsothermalShockParams& p, double ell_tilde)
    : p_(p), tp_(transform_problem(p, 1.0)), basis_(ell_tilde) {}

ShockLift::Coefficients ShockLift::at_phase(double c, double s) const {
  const double w = p_.omega, mu = p_.mu_hat, a0 = tp_.a0, k = 1.0 / (2.0 * tp_.a2);
  const double d0 = c, d1 = -w * s, d2 = -w * w * c, d3 = w * w * w * s, d4 = w * w * w * w * c;
  Coefficients r{};
  r.f0 = d0;
  r.f0_t = d1;
  r.f0_tt = d2;
  r.f2 = (d2 + a0 * d0 + mu * d1) * k;
  r.f2_t = (d3 + a0 * d1 + mu * d2) * k;
  r.f2_tt = (d4 + a0 * d2 + mu * d3) * k;
  return r;
}

ShockLift::Coefficients ShockLift::at(double t) const { return at_phase(std::cos(p_.omega * t), std::sin(p_.omega * t)); }

LiftFields ShockLift::evaluate_coefficients(const Coefficients& c, std::span<const double> z) const {
  const std::size_t n = z.size();
  LiftFields f{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n), std::vector<double>(n),
               std::vector<double>(n)};
  for (std::size_t j = 0; j < n; ++j) {
    const auto v = basis_.at(z[j]);
    f.F[j] = c.f0 * v.A + c.f2 * v.B;
    f.F_t[j] = c.f0_t * v.A + c.f2_t * v.B;
    f.F_tt[j] = c.f0_tt * v.A + c.f2_tt * v.B;
    f.F_zz[j] = c.f0 * v.A_zz + c.f2 * v.B_zz;
    f.G[j] = f.F_tt[j] - tp_.a2 * f.F_zz[j] + tp_.a0 * f.F[j] + p_.mu_hat * f.F_t[j];
  }
  return f;
}

LiftFields ShockLift::evaluate(double t, std::span<const double> z) const { return evaluate_coefficients(at(t), z); }

void ShockLift::harmonic_source(std::span<const double> z, std::vector<double>& gc, std::vector<double>& gs) const {
  gc = evaluate_coefficients(at_phase(1.0, 0.0), z).G;
  gs = evaluate_coefficients(at_phase(0.0, 1.0), z).G;
}

std::string to_string(Laplacian l) { return l == Laplacian::fd2 ? "fd2" : "spectral"; }

Laplacian parse_laplacian(const std::string& s) {
  if (s == "fd2") return Laplacian::fd2;
  if (s == "spectral") return Laplacian::spectral;
  throw ConfigError("unknown laplacian '" + s + "' (expected fd2 or spectral)");
}

std::string to_string(SourceMode m) { return m == SourceMode::frozen ? "frozen" : "exact"; }
std::string to_string(DampingMode m) { return m == DampingMode::frozen ? "frozen" : "exact"; }

SourceMode parse_source_mode(const std::string& s) {
  if (s == "frozen") return SourceMode::frozen;
  if (s == "exact") return SourceMode::exact;
  throw ConfigError("unknown source mode '" + s + "' (expected frozen or exact)");
}

DampingMode parse_damping_mode(const std::string& s) {
  if (s == "frozen") return DampingMode::frozen;
  if (s == "exact") return DampingMode::exact;
  throw ConfigError("unknown damping mode '" + s + "' (expected frozen or exact)");
}

void ShockConfig::validate() const {
  params.validate();
  if (n < 16) throw ConfigError("n must be at least 16");
  if (!(cfl > 0.0) || !std::isfinite(cfl)) throw ConfigError("cfl must be positive");
  if (!(ell >= 0.0)) throw ConfigError("ell must be >= 0 (0 selects 40 c0)");
  if (!(lift_cells >= 2.0) || lift_cells * dz() >= domain_length()) {
    throw ConfigError("lift_cells must be >= 2 and the cutoff must lie inside the domain");
  }
  if (!(t_end >= 0.0)) throw ConfigError("t_end must be >= 0");
  if (snapshots.empty()) throw ConfigError("at least one snapshot time is required");
  for (double t : snapshots) {
    if (!(t >= 0.0) || t > t_end) throw ConfigError("snapshot times must lie in [0, t_end]");
  }
  if (laplacian == Laplacian::spectral && backend != kss::Backend::fourier) {
    throw ConfigError("laplacian = spectral requires backend = fourier");
  }
  for (const auto* pl : {&power_u, &power_ut}) {
    if (!(pl->scale >= 0.0)) throw ConfigError("regularization powers must be >= 0");
  }
}

namespace {

// Exact Duhamel integral of a harmonic source over one step. In the frame
// where damping is removed, the forcing is Re[Z e^{kappa s}] and per mode
//   v  gains [e^{kappa dt} - C - kappa S] / (kappa^2 + lambda) Z,
//   v' gains [kappa e^{kappa dt} + lambda S - kappa C] / (kappa^2 + lambda) Z.
class HarmonicForcing {
 public:
  HarmonicForcing(const kss::Propagator& prop, std::complex<double> kappa, const std::vector<double>& gc,
                  const std::vector<double>& gs)
      : prop_(prop), gc_(gc), gs_(gs) {
    const double dt = prop.dt();
    const kss::PhiMap cm(kss::PhiKind::cosine, dt), sm(kss::PhiKind::sinc, dt);
    const auto i1 = [=](double l) {
      return (std::exp(kappa * dt) - cm(l) - kappa * sm(l)) / (kappa * kappa + l);
    };
    const auto i2 = [=](double l) {
      return (kappa * std::exp(kappa * dt) + l * sm(l) - kappa * cm(l)) / (kappa * kappa + l);
    };
    maps_ = {kss::ScalarMap([=](double l) { return i1(l).real(); }),
             kss::ScalarMap([=](double l) { return -i1(l).imag(); }),
             kss::ScalarMap([=](double l) { return i2(l).real(); }),
             kss::ScalarMap([=](double l) { return -i2(l).imag(); })};
    const bool spectral = prop.backend() == kss::Backend::kss || prop.backend() == kss::Backend::fourier;
    if (spectral) {
      for (const auto& m : maps_) tables_.push_back(kss::tabulate(m, prop.nodes()));
      const bool applied = prop.backend() == kss::Backend::kss;
      sgc_ = kss::analyze(prop.op(), prop.transform(), gc_, applied);
      sgs_ = kss::analyze(prop.op(), prop.transform(), gs_, applied);
    }
  }

  // Adds the contributions for a step starting at phase omega t_n.
  void add(double phase, kss::SpectralState& out, kss::Counters* counters) const {
    const double c = std::cos(phase), s = std::sin(phase);
    const auto backend = prop_.backend();
    if (backend == kss::Backend::kss || backend == kss::Backend::fourier) {
      const auto combine = [&](double wc, double ws) {
        kss::Spectra r;
        r.plain.resize(sgc_.plain.size());
        for (std::size_t k = 0; k < r.plain.size(); ++k) r.plain[k] = wc * sgc_.plain[k] + ws * sgs_.plain[k];
        if (!sgc_.applied.empty()) {
          r.applied.resize(sgc_.applied.size());
          for (std::size_t k = 0; k < r.applied.size(); ++k) {
            r.applied[k] = wc * sgc_.applied[k] + ws * sgs_.applied[k];
          }
        }
        return r;
      };
      const auto zr = combine(-c, -s), zi = combine(-s, c);
      const auto acc = backend == kss::Backend::kss ? kss::accumulate_kss : kss::accumulate_fourier;
      acc(tables_[0], zr, out.u_hat);
      acc(tables_[1], zi, out.u_hat);
      acc(tables_[2], zr, out.ut_hat);
      acc(tables_[3], zi, out.ut_hat);
      return;
    }
    const std::size_t n = gc_.size();
    std::vector<double> zr(n), zi(n);
    for (std::size_t j = 0; j < n; ++j) {
      zr[j] = -(c * gc_[j] + s * gs_[j]);
      zi[j] = -(s * gc_[j] - c * gs_[j]);
    }
    kss::LanczosOptions opt;
    const auto rr = kss::lanczos_apply({maps_[0], maps_[2]}, prop_.op(), zr, opt, counters);
    const auto ri = kss::lanczos_apply({maps_[1], maps_[3]}, prop_.op(), zi, opt, counters);
    std::vector<double> du(n), dv(n), hat(n);
    for (std::size_t j = 0; j < n; ++j) {
      du[j] = rr.results[0][j] + ri.results[0][j];
      dv[j] = rr.results[1][j] + ri.results[1][j];
    }
    prop_.transform().forward(du, hat);
    for (std::size_t k = 0; k < n; ++k) out.u_hat[k] += hat[k];
    prop_.transform().forward(dv, hat);
    for (std::size_t k = 0; k < n; ++k) out.ut_hat[k] += hat[k];
  }

 private:
  const kss::Propagator& prop_;
  const std::vector<double>& gc_;
  const std::vector<double>& gs_;
  std::vector<kss::ScalarMap> maps_;
  std::vector<kss::ModeTable> tables_;
  kss::Spectra sgc_, sgs_;
};

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

ShockRun solve_shock(const ShockConfig& cfg) {
  cfg.validate();
  IsothermalShockParams p = cfg.params;
  const double W0 = p.W0;
  p.W0 = 1.0;
  const std::size_t n = cfg.n;
  const double ell = cfg.domain_length();
  const double dz = cfg.dz();
  const auto tp = transform_problem(p, ell);
  const ShockLift lift(p, cfg.lift_cells * dz);

  kss::Grid1D grid{n, ell};
  const auto z = grid.points();
  std::vector<double> z_out(n + 2), psi(n);
  z_out[0] = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    z_out[j + 1] = z[j];
    psi[j] = tp.psi(z[j]);
  }
  z_out[n + 1] = ell;

  const bool exact_damping = cfg.damping == DampingMode::exact;
  const bool exact_source = cfg.source == SourceMode::exact;
  const double mu = p.mu_hat;
  const auto base = kss::Operator1D::constant(tp.a2, tp.a0, n, dz);
  const auto op = exact_damping ? base.shifted(-0.25 * mu * mu) : base;

  std::vector<double> gc, gs;
  if (exact_source) lift.harmonic_source(z, gc, gs);

  ShockRun run;
  run.dz = dz;
  run.segments = plan_segments(cfg.snapshots, cfg.cfl * dz / p.c0, cfg.t_end);

  // Initial data u = -F, u_t = -F_t.
  kss::WaveState state;
  {
    const auto f = lift.evaluate(0.0, z);
    state.u.resize(n);
    state.ut.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      state.u[j] = -f.F[j];
      state.ut[j] = -f.F_t[j];
    }
  }

  const auto snapshot = [&](double t) {
    const auto f = lift.evaluate(t, z);
    ShockSnapshot s;
    s.t = t;
    s.z = z_out;
    s.w.assign(n + 2, 0.0);
    s.w[0] = W0 * std::cos(p.omega * t);
    for (std::size_t j = 0; j < n; ++j) s.w[j + 1] = W0 * psi[j] * (state.u[j] + f.F[j]);
    return s;
  };

  std::vector<double> sig_u, sig_ut, b(n);
  specfun::SineTransform dst(n);
  double t = 0.0;
  for (const auto& seg : run.segments) {
    if (seg.steps > 0) {
      const kss::Propagator prop = cfg.laplacian == Laplacian::spectral
                                       ? kss::Propagator(op, kss::NodePair::continuous(op), seg.dt)
                                       : kss::Propagator(op, seg.dt, cfg.backend, cfg.lanczos);
      std::optional<HarmonicForcing> forcing;
      if (exact_source) {
        const std::complex<double> kappa(exact_damping ? 0.5 * mu : 0.0, p.omega);
        forcing.emplace(prop, kappa, gc, gs);
      }
      const double decay = exact_damping ? std::exp(-0.5 * mu * seg.dt) : 1.0;
      for (std::size_t k = 0; k < seg.steps; ++k) {
        t = seg.t_begin + static_cast<double>(k) * seg.dt;
        // Local frame: with exact damping step v = e^{mu s/2} u.
        kss::WaveState local = state;
        if (exact_damping) {
          for (std::size_t j = 0; j < n; ++j) local.ut[j] += 0.5 * mu * state.u[j];
        }
        std::fill(b.begin(), b.end(), 0.0);
        if (!exact_source) {
          const auto f = lift.evaluate(t, z);
          for (std::size_t j = 0; j < n; ++j) b[j] = -f.G[j];
        }
        if (!exact_damping) {
          for (std::size_t j = 0; j < n; ++j) b[j] -= mu * state.ut[j];
        }
        auto spec = prop.step_spectral(local, b, &run.counters);
        if (forcing) forcing->add(p.omega * t, spec, &run.counters);
        if (exact_damping) {
          for (std::size_t i = 0; i < n; ++i) {
            const double v = spec.u_hat[i], vt = spec.ut_hat[i];
            spec.u_hat[i] = decay * v;
            spec.ut_hat[i] = decay * (vt - 0.5 * mu * v);
          }
        }
        sig_u = specfun::sigma_factors(n, cfg.power_u(t));
        sig_ut = specfun::sigma_factors(n, cfg.power_ut(t));
        for (std::size_t i = 0; i < n; ++i) {
          spec.u_hat[i] *= sig_u[i];
          spec.ut_hat[i] *= sig_ut[i];
        }
        dst.inverse(spec.u_hat, state.u);
        dst.inverse(spec.ut_hat, state.ut);
        run.counters.transforms += 2;
        ++run.steps;
        if (!all_finite(state.u) || !all_finite(state.ut)) {
          throw SolverFailure("shock solver produced a non-finite value at step " + std::to_string(run.steps) +
                                  ", t = " + io::format_double(seg.t_begin + (k + 1) * seg.dt),
                              run.steps, seg.t_begin + static_cast<double>(k + 1) * seg.dt);
        }
      }
    }
    t = seg.t_end;
    if (seg.output) run.snapshots.push_back(snapshot(t));
  }
  return run;
}

ShockFront measure_shock_front(std::span<const double> z, std::span<const double> w, double threshold,
                               std::size_t search_cells, std::size_t half_window) {
  if (z.size() != w.size() || z.size() < 3) throw UsageError("measure_shock_front: bad profile");
  double wmax = 0.0;
  for (double v : w) wmax = std::max(wmax, std::abs(v));
  ShockFront f;
  if (wmax == 0.0) return f;
  std::size_t lead = w.size() - 1;
  while (lead > 0 && std::abs(w[lead]) <= threshold * wmax) --lead;
  const std::size_t lo = lead > search_cells ? lead - search_cells : 0;
  std::size_t best = lo;
  double drop = -std::numeric_limits<double>::infinity();
  for (std::size_t j = lo; j + 1 < w.size() && j <= lead; ++j) {
    const double d = std::abs(w[j] - w[j + 1]);
    if (d > drop) {
      drop = d;
      best = j;
    }
  }
  f.index = best;
  f.position = 0.5 * (z[best] + z[best + 1]);
  const std::size_t a = best >= half_window ? best + 1 - half_window : 0;
  const std::size_t e = std::min(w.size() - 1, best + half_window);
  double m = w[a];
  for (std::size_t j = a; j <= e; ++j) m = std::max(m, w[j]);
  f.jump = m - w[e];
  return f;
}

}  // namespace shock
}  // namespace singsurf
