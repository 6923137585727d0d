#include "singsurf/lwe_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "singsurf/csv.hpp"
#include "singsurf/errors.hpp"
#include "singsurf/specfun.hpp"

namespace singsurf::lwe {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kReferenceGrid = 262144.0;
constexpr double kFrontTarget = 0.95;

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

// ---- coordinate map --------------------------------------------------------

CoordinateMap::CoordinateMap(double alpha) : alpha_(alpha), K_(-0.5 * alpha) {
  if (!std::isfinite(alpha)) throw ConfigError("alpha must be finite");
  em1_ = std::expm1(-K_);
  C_ = std::abs(K_) < kSeriesThreshold ? 1.0 + K_ / 2.0 + K_ * K_ / 12.0 : -K_ / em1_;
}

double CoordinateMap::phi(double X) const {
  if (std::abs(K_) < kSeriesThreshold) return X * (1.0 + 0.5 * K_ * (1.0 - X));
  return std::expm1(-K_ * X) / em1_;
}

double CoordinateMap::phi_inverse(double Y) const {
  if (std::abs(K_) < kSeriesThreshold) return Y * (1.0 - 0.5 * K_ * (1.0 - Y));
  return -std::log1p(Y * em1_) / K_;
}

double CoordinateMap::dphi(double X) const { return C_ * std::exp(-K_ * X); }

double CoordinateMap::a1(double Y) const { return (K_ + alpha_) * C_ * std::exp(K_ * phi_inverse(Y)); }

double CoordinateMap::a1_prime(double Y) const {
  // d/dY e^{K X} = K e^{K X} / phi'(X) = (K / C) e^{2 K X}.
  return (K_ + alpha_) * K_ * std::exp(2.0 * K_ * phi_inverse(Y));
}

double CoordinateMap::a0_bar(double Y) const {
  const double a = a1(Y);
  return a * a / (4.0 * C_ * C_) - 0.5 * a1_prime(Y);
}

double CoordinateMap::psi(double Y) const { return std::exp(0.25 * alpha_ * phi_inverse(Y)); }

// ---- lift ------------------------------------------------------------------

LweLift::LweLift(const CoordinateMap& map, const LweParams& p, double ell)
    : map_(map), two_eps_beta_(2.0 * p.epsilon * p.beta_hat()), a0_at_0_(map.a0_bar(0.0)), basis_(ell) {}

LweLift::Coefficients LweLift::at(double T) const {
  Coefficients c{};
  if (T < 0.0) return c;
  const double s = std::sin(kPi * T), co = std::cos(kPi * T);
  const double s2 = std::sin(2.0 * kPi * T), c2 = std::cos(2.0 * kPi * T);
  const double pi2 = kPi * kPi;
  c.f0 = s;
  c.f0_t = kPi * co;
  c.f0_tt = -pi2 * s;
  const double f0_ttt = -pi2 * kPi * co;
  const double f0_tttt = pi2 * pi2 * s;
  // h = f0_t^2 + f0 f0_tt = d/dT(f0 f0_t).
  const double h = pi2 * c2;
  const double h_t = -2.0 * pi2 * kPi * s2;
  const double h_tt = -4.0 * pi2 * pi2 * c2;
  const double inv = 1.0 / (2.0 * map_.C() * map_.C());
  c.f2 = (c.f0_tt + a0_at_0_ * c.f0 - two_eps_beta_ * h) * inv;
  c.f2_t = (f0_ttt + a0_at_0_ * c.f0_t - two_eps_beta_ * h_t) * inv;
  c.f2_tt = (f0_tttt + a0_at_0_ * c.f0_tt - two_eps_beta_ * h_tt) * inv;
  return c;
}

LiftFields LweLift::evaluate(double T, std::span<const double> Y) const {
  const auto c = at(T);
  const double c2 = map_.C() * map_.C();
  LiftFields f;
  const std::size_t n = Y.size();
  f.F.assign(n, 0.0);
  f.F_t.assign(n, 0.0);
  f.F_tt.assign(n, 0.0);
  f.F_zz.assign(n, 0.0);
  f.G.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    if (!(Y[j] < basis_.ell())) continue;
    const auto v = basis_.at(Y[j]);
    f.F[j] = c.f0 * v.A + c.f2 * v.B;
    f.F_t[j] = c.f0_t * v.A + c.f2_t * v.B;
    f.F_tt[j] = c.f0_tt * v.A + c.f2_tt * v.B;
    f.F_zz[j] = c.f0 * v.A_zz + c.f2 * v.B_zz;
    const double nl = f.F_t[j] * f.F_t[j] + f.F[j] * f.F_tt[j];
    f.G[j] = -f.F_tt[j] + c2 * f.F_zz[j] - map_.a0_bar(Y[j]) * f.F[j] + two_eps_beta_ * map_.psi(Y[j]) * nl;
  }
  return f;
}

void add_nonlinear_source(double coefficient, std::span<const double> psi, std::span<const double> u,
                          std::span<const double> ut, std::span<const double> utt, const LiftFields& lift,
                          std::span<double> b) {
  for (std::size_t j = 0; j < b.size(); ++j) {
    const double q = ut[j] * ut[j] + u[j] * utt[j] + utt[j] * lift.F[j] + 2.0 * ut[j] * lift.F_t[j] +
                     u[j] * lift.F_tt[j];
    b[j] += coefficient * psi[j] * q;
  }
}

// ---- configuration ---------------------------------------------------------

LweParams LweConfig::resolved_params() const {
  LweParams p = params;
  if (alpha_auto) p.alpha = surface::lwe_critical(p.gamma, p.epsilon).alpha_bullet;
  return p;
}

double LweConfig::resolved_t_end() const {
  if (t_end > 0.0) return t_end;
  return surface::lwe_front_arrival(resolved_params(), kFrontTarget);
}

std::vector<double> LweConfig::resolved_snapshots() const {
  if (!snapshots.empty()) return snapshots;
  return {0.3, 0.6, resolved_t_end()};
}

PowerLaw LweConfig::resolved_power_ut() const {
  if (power_ut) return *power_ut;
  // Smoothing length goes like dY * p / CFL, so the exponent follows n and CFL.
  return {1536.0 * (static_cast<double>(n) / kReferenceGrid) * (cfl / 10.0), PowerLaw::Shape::increasing_linear,
          resolved_t_end()};
}

PowerLaw LweConfig::resolved_power_utt() const {
  if (power_utt) return *power_utt;
  // Not scaled: it damps the lagged U_TT feedback per step, which does not
  // shrink with the grid.
  return {16384.0, PowerLaw::Shape::increasing_square, resolved_t_end()};
}

void LweConfig::validate() const {
  params.validate(false);
  if (!alpha_auto && !std::isfinite(params.alpha)) throw ConfigError("alpha must be finite");
  if (n < 16) throw ConfigError("n must be at least 16");
  if (!(cfl > 0.0) || !std::isfinite(cfl)) throw ConfigError("cfl must be positive");
  if (t_end < 0.0 || !std::isfinite(t_end)) throw ConfigError("t_end must be >= 0");
  if (!(lift_ell > 0.0 && lift_ell < 1.0)) throw ConfigError("lift cutoff must lie in (0, 1)");
  for (double t : snapshots) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("snapshot times must be >= 0");
  }
  for (const auto* pl : {&power_ut, &power_utt}) {
    if (*pl && !((*pl)->scale >= 0.0)) throw ConfigError("regularization powers must be >= 0");
  }
  if (lanczos.k_max < 2) throw ConfigError("lanczos k_max must be at least 2");
  if (!(lanczos.tol > 0.0)) throw ConfigError("lanczos tol must be positive");
}

// ---- reconstruction --------------------------------------------------------

LweSnapshot reconstruct(const CoordinateMap& map, double T, std::span<const double> pbar) {
  const std::size_t m = pbar.size();  // n + 2 samples, Y_i = i dy
  if (m < 4) throw UsageError("reconstruct: too few samples");
  const double dy = 1.0 / static_cast<double>(m - 1);
  LweSnapshot s;
  s.t = T;
  s.x.resize(m);
  s.p.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double X = static_cast<double>(j) * dy;
    const double Y = std::clamp(map.phi(X), 0.0, 1.0);
    const double r = Y / dy;
    const auto cell = static_cast<std::ptrdiff_t>(std::floor(r));
    const std::ptrdiff_t first = std::clamp<std::ptrdiff_t>(cell - 1, 0, static_cast<std::ptrdiff_t>(m) - 4);
    double value = 0.0;
    for (std::ptrdiff_t a = first; a < first + 4; ++a) {
      double w = 1.0;
      for (std::ptrdiff_t c = first; c < first + 4; ++c) {
        if (c != a) w *= (r - static_cast<double>(c)) / static_cast<double>(a - c);
      }
      value += w * pbar[static_cast<std::size_t>(a)];
    }
    s.x[j] = X;
    s.p[j] = map.psi(Y) * value;
  }
  return s;
}

// ---- solver ----------------------------------------------------------------

LweRun solve_lwe(const LweConfig& cfg, const SnapshotCallback& on_snapshot, kss::Counters* external) {
  cfg.validate();
  LweRun run;
  run.params = cfg.resolved_params();
  run.t_end = cfg.resolved_t_end();
  kss::Counters& counters = external ? *external : run.counters;
  const auto& p = run.params;
  const std::size_t n = cfg.n;
  const double dy = cfg.dy();
  const CoordinateMap map(p.alpha);
  const LweLift lift(map, p, cfg.lift_ell);
  const PowerLaw power_ut = cfg.resolved_power_ut();
  const PowerLaw power_utt = cfg.resolved_power_utt();

  std::vector<double> y(n), psi(n), a0(n);
  for (std::size_t j = 0; j < n; ++j) {
    y[j] = static_cast<double>(j + 1) * dy;
    psi[j] = map.psi(y[j]);
    a0[j] = map.a0_bar(y[j]);
  }
  const kss::Operator1D op(map.C() * map.C(), a0, dy);
  specfun::SineTransform dst(n);
  run.segments = plan_segments(cfg.resolved_snapshots(), cfg.cfl * dy, run.t_end);

  kss::WaveState state;
  {
    const auto f = lift.evaluate(0.0, y);
    state.u.resize(n);
    state.ut.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      state.u[j] = -f.F[j];
      state.ut[j] = -f.F_t[j];
    }
  }
  std::vector<double> ut_hat(n), ut_hat_prev(n), utt_hat(n), utt(n, 0.0), b(n), pbar(n + 2);
  dst.forward(state.ut, ut_hat);
  ++counters.transforms;
  bool have_history = false;
  double dt_prev = 0.0;

  const auto snapshot = [&](double T) {
    const auto f = lift.evaluate(T, y);
    pbar[0] = lift.at(T).f0;
    pbar[n + 1] = 0.0;
    for (std::size_t j = 0; j < n; ++j) pbar[j + 1] = state.u[j] + f.F[j];
    auto s = reconstruct(map, T, pbar);
    if (on_snapshot) on_snapshot(s);
    run.snapshots.push_back(std::move(s));
  };

  for (const auto& seg : run.segments) {
    if (seg.steps > 0) {
      const kss::Propagator prop(op, seg.dt, cfg.backend, cfg.lanczos);
      for (std::size_t k = 0; k < seg.steps; ++k) {
        const double T = seg.t_begin + static_cast<double>(k) * seg.dt;
        // U_TT from the difference of consecutive U_T spectra.
        if (have_history) {
          const auto sig = specfun::sigma_factors(n, power_utt(T));
          for (std::size_t i = 0; i < n; ++i) utt_hat[i] = sig[i] * (ut_hat[i] - ut_hat_prev[i]) / dt_prev;
          dst.inverse(utt_hat, utt);
          ++counters.transforms;
        }
        const auto f = lift.evaluate(T, y);
        if (cfg.source == LiftSource::midpoint) {
          // The step holds b fixed; its midpoint value is second order for the lift part.
          const auto g = lift.evaluate(T + 0.5 * seg.dt, y);
          std::copy(g.G.begin(), g.G.end(), b.begin());
        } else {
          std::copy(f.G.begin(), f.G.end(), b.begin());
        }
        add_nonlinear_source(lift.nonlinear_coefficient(), psi, state.u, state.ut, utt, f, b);

        kss::SpectralState spec;
        try {
          spec = prop.step_spectral(state, b, &counters);
        } catch (const LanczosBreakdown& e) {
          throw e.at_time(T, "LWE step at T = " + io::format_double(T));
        } catch (const NumericalError& e) {
          throw SolverFailure("LWE step at T = " + io::format_double(T) + ": " + e.what(), run.steps, T);
        }
        const auto sig = specfun::sigma_factors(n, power_ut(T));
        for (std::size_t i = 0; i < n; ++i) spec.ut_hat[i] *= sig[i];
        dst.inverse(spec.u_hat, state.u);
        dst.inverse(spec.ut_hat, state.ut);
        counters.transforms += 2;
        ut_hat_prev.swap(ut_hat);
        ut_hat = std::move(spec.ut_hat);
        have_history = true;
        dt_prev = seg.dt;
        ++run.steps;
        if (!all_finite(state.u) || !all_finite(state.ut)) {
          const double t_fail = T + seg.dt;
          throw SolverFailure("LWE solution became non-finite at step " + std::to_string(run.steps) +
                                  ", T = " + io::format_double(t_fail) + " (past blow-up?)",
                              run.steps, t_fail);
        }
      }
    }
    if (seg.output) snapshot(seg.t_end);
  }
  return run;
}

// ---- measurements ----------------------------------------------------------

namespace {

struct LineFit {
  double slope = 0, intercept = 0;
  std::size_t count = 0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> p, double lo, double hi) {
  // Two passes about the means keep the fit well conditioned far from X = 0.
  double mx = 0, my = 0;
  std::size_t m = 0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] < lo || x[j] > hi) continue;
    mx += x[j];
    my += p[j];
    ++m;
  }
  LineFit f;
  f.count = m;
  if (m < 2) return f;
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxx = 0, sxy = 0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] < lo || x[j] > hi) continue;
    sxx += (x[j] - mx) * (x[j] - mx);
    sxy += (x[j] - mx) * (p[j] - my);
  }
  if (sxx == 0.0) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  return f;
}

double spacing(std::span<const double> x) {
  if (x.size() < 2 || !(x[1] > x[0])) throw UsageError("profile grid must be increasing");
  return x[1] - x[0];
}

}  // namespace

double measure_front_slope(std::span<const double> x, std::span<const double> p, double front, double far,
                           double near) {
  if (x.size() != p.size()) throw UsageError("measure_front_slope: size mismatch");
  const double dx = spacing(x);
  const double lo = front - far * dx, hi = front - near * dx;
  if (!(far > near) || lo < x.front() || hi > x.back()) throw UsageError("measure_front_slope: window outside domain");
  // Half-cell slack so that window ends that coincide with grid points are kept.
  const auto fit = fit_line(x, p, lo - 1e-9 * dx, hi + 1e-9 * dx);
  if (fit.count < 2) throw UsageError("measure_front_slope: window holds fewer than two samples");
  return fit.slope;
}

LweFront measure_lwe_front(std::span<const double> x, std::span<const double> p, double threshold, double fit_far,
                           double fit_near) {
  if (x.size() != p.size() || x.size() < 3) throw UsageError("measure_lwe_front: bad profile");
  if (!(fit_far > fit_near) || fit_near < 0.0) throw UsageError("measure_lwe_front: bad fit window");
  double pmax = 0.0;
  for (double v : p) pmax = std::max(pmax, std::abs(v));
  LweFront f;
  if (pmax == 0.0) return f;
  std::size_t lead = p.size() - 1;
  while (lead > 0 && std::abs(p[lead]) <= threshold * pmax) --lead;
  f.edge = x[lead];
  f.position = f.edge;
  const double lo = f.edge - fit_far, hi = f.edge - fit_near;
  if (lo < x.front()) return f;
  // Quadratic in d = X - edge, least squares.
  Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
  Eigen::Vector3d atb = Eigen::Vector3d::Zero();
  std::size_t count = 0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] < lo || x[j] > hi) continue;
    const double d = x[j] - f.edge;
    const Eigen::Vector3d row(1.0, d, d * d);
    ata += row * row.transpose();
    atb += row * p[j];
    ++count;
  }
  if (count < 3) return f;
  const Eigen::Vector3d c = ata.ldlt().solve(atb);
  // Root of c0 + c1 d + c2 d^2 closest to the edge, by Newton from the linear root.
  double d = c(1) != 0.0 ? -c(0) / c(1) : 0.0;
  for (int it = 0; it < 20; ++it) {
    const double g = c(0) + d * (c(1) + d * c(2)), dg = c(1) + 2.0 * c(2) * d;
    if (dg == 0.0) break;
    const double step = g / dg;
    d -= step;
    if (std::abs(step) < 1e-15) break;
  }
  f.position = f.edge + d;
  f.slope = c(1) + 2.0 * c(2) * d;
  return f;
}

double local_total_variation(std::span<const double> x, std::span<const double> p, double center,
                             double half_width) {
  if (x.size() != p.size()) throw UsageError("local_total_variation: size mismatch");
  double tv = 0.0;
  for (std::size_t j = 0; j + 1 < x.size(); ++j) {
    if (std::abs(x[j] - center) <= half_width && std::abs(x[j + 1] - center) <= half_width) {
      tv += std::abs(p[j + 1] - p[j]);
    }
  }
  return tv;
}

}  // namespace singsurf::lwe
