#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "singsurf/errors.hpp"
#include "singsurf/fds_reference.hpp"
#include "singsurf/lwe_solver.hpp"

using namespace singsurf;
using namespace singsurf::lwe;

namespace {

constexpr double kPi = std::numbers::pi;

double interp(const std::vector<double>& x, const std::vector<double>& p, double q) {
  const double dx = x[1] - x[0];
  const auto j = std::min<std::size_t>(static_cast<std::size_t>(q / dx), x.size() - 2);
  const double t = (q - x[j]) / dx;
  return p[j] * (1.0 - t) + p[j + 1] * t;
}

}  // namespace

TEST_CASE("coordinate map end points, inverse and C") {
  for (double alpha : {0.156451, -0.200618, 1.5, 1e-9, 0.0}) {
    const CoordinateMap m(alpha);
    CHECK(m.phi(0.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(m.phi(1.0) == doctest::Approx(1.0).epsilon(1e-14));
    for (double X : {0.0, 0.1, 0.37, 0.8, 1.0}) {
      CHECK(std::abs(m.phi_inverse(m.phi(X)) - X) < 1e-12);
    }
    // phi' = C e^{-K X} and phi(1) = 1, so 1/C is the integral of e^{-K X}.
    const double inv_c = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [&](double X) { return std::exp(-m.K() * X); }, 0.0, 1.0);
    CHECK(1.0 / m.C() == doctest::Approx(inv_c).epsilon(1e-12));
    const double h = 1e-6;
    CHECK((m.phi(0.4 + h) - m.phi(0.4 - h)) / (2 * h) == doctest::Approx(m.dphi(0.4)).epsilon(1e-8));
  }
  CHECK(CoordinateMap(0.156451).C() == doctest::Approx(0.9615).epsilon(1e-3));
  CHECK_THROWS_AS(CoordinateMap(std::nan("")), ConfigError);
}

TEST_CASE("series and closed forms agree across the switch") {
  const double k = CoordinateMap::kSeriesThreshold;
  for (double K : {-0.9 * k, -1.1 * k, 0.9 * k}) {
    const CoordinateMap m(-2.0 * K);
    const long double kl = K;
    const long double em1 = std::expm1(-kl);
    for (double X : {0.2, 0.5, 0.9}) {
      const auto phi = static_cast<double>(std::expm1(-kl * X) / em1);
      CHECK(m.phi(X) == doctest::Approx(phi).epsilon(1e-14));
      const auto inv = static_cast<double>(-std::log1p(X * em1) / kl);
      CHECK(m.phi_inverse(X) == doctest::Approx(inv).epsilon(1e-14));
    }
    CHECK(m.C() == doctest::Approx(static_cast<double>(-kl / em1)).epsilon(1e-14));
  }
}

TEST_CASE("a0_bar matches its closed form and the finite-difference definition") {
  for (double alpha : {0.156451, -0.200618, 0.9}) {
    const CoordinateMap m(alpha);
    for (double Y : {0.0, 0.25, 0.6, 0.95}) {
      const double X = m.phi_inverse(Y);
      CHECK(m.a0_bar(Y) == doctest::Approx(3.0 * alpha * alpha / 16.0 * std::exp(-alpha * X)).epsilon(1e-12));
      const double h = 1e-5;
      const double fd = (m.a1(Y + h) - m.a1(Y - h)) / (2.0 * h);
      CHECK(m.a1_prime(Y) == doctest::Approx(fd).epsilon(1e-8));
      // a1~ = (alpha/2) C e^{K X}.
      CHECK(m.a1(Y) == doctest::Approx(0.5 * alpha * m.C() * std::exp(m.K() * X)).epsilon(1e-14));
    }
  }
}

TEST_CASE("psi is the exponential of the a1 antiderivative") {
  const CoordinateMap m(0.156451);
  for (double Y : {0.1, 0.5, 1.0}) {
    const double integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [&](double s) { return m.a1(s) / (2.0 * m.C() * m.C()); }, 0.0, Y);
    CHECK(m.psi(Y) == doctest::Approx(std::exp(integral)).epsilon(1e-10));
  }
  CHECK(m.psi(0.0) == 1.0);
}

TEST_CASE("lift matches the boundary data and the source definition") {
  LweParams p{1.4, 0.35, 0.156451};
  const CoordinateMap m(p.alpha);
  const LweLift lift(m, p, 0.5);
  const std::vector<double> y0{0.0, 0.5, 0.7};
  for (double T : {0.0, 0.2, 0.55, 0.9}) {
    const auto f = lift.evaluate(T, y0);
    CHECK(f.F[0] == doctest::Approx(std::sin(kPi * T)).epsilon(1e-14));
    CHECK(std::abs(f.G[0]) < 1e-11);
    for (std::size_t j = 1; j < y0.size(); ++j) {
      CHECK(f.F[j] == 0.0);
      CHECK(f.G[j] == 0.0);
    }
    // Residual of G = -F_TT + C^2 F_YY - a0 F + 2 eps b psi (F_T^2 + F F_TT) by differences.
    const double Y = 0.21, h = 1e-3;
    const auto field = [&](double t, double yy) { return lift.evaluate(t, std::vector<double>{yy}).F[0]; };
    const double ftt = (field(T + h, Y) - 2 * field(T, Y) + field(T - h, Y)) / (h * h);
    const double fyy = (field(T, Y + h) - 2 * field(T, Y) + field(T, Y - h)) / (h * h);
    const double ft = (field(T + h, Y) - field(T - h, Y)) / (2 * h);
    const double F = field(T, Y);
    const double g = -ftt + m.C() * m.C() * fyy - m.a0_bar(Y) * F +
                     lift.nonlinear_coefficient() * m.psi(Y) * (ft * ft + F * ftt);
    const auto exact = lift.evaluate(T, std::vector<double>{Y});
    if (T > h) {
      CHECK(exact.G[0] == doctest::Approx(g).epsilon(1e-4).scale(1.0));
      CHECK(exact.F_t[0] == doctest::Approx(ft).epsilon(1e-5).scale(1.0));
    }
  }
  CHECK(lift.nonlinear_coefficient() == doctest::Approx(2 * 0.35 * p.beta_hat()));
}

TEST_CASE("nonlinear source is the time derivative of U U_T + U_T F + U F_T") {
  // U = T^2 sin(3), F = cos(T), at T = 0.4, single point.
  const double T = 0.4, s = std::sin(3.0), h = 1e-5;
  const auto inner = [&](double t) {
    const double u = t * t * s, ut = 2 * t * s, F = std::cos(t), Ft = -std::sin(t);
    return u * ut + ut * F + u * Ft;
  };
  LiftFields lift;
  lift.F = {std::cos(T)};
  lift.F_t = {-std::sin(T)};
  lift.F_tt = {-std::cos(T)};
  const std::vector<double> psi{1.3}, u{T * T * s}, ut{2 * T * s}, utt{2 * s};
  std::vector<double> b{0.25};
  add_nonlinear_source(0.7, psi, u, ut, utt, lift, b);
  const double q = (inner(T + h) - inner(T - h)) / (2 * h);
  CHECK(b[0] == doctest::Approx(0.25 + 0.7 * 1.3 * q).epsilon(1e-9));
}

TEST_CASE("reconstruct is exact for cubics in Y") {
  const CoordinateMap m(0.3);
  const std::size_t n = 63;
  std::vector<double> pbar(n + 2);
  const auto cubic = [](double Y) { return 0.3 - Y + 2.0 * Y * Y - 0.7 * Y * Y * Y; };
  for (std::size_t i = 0; i < pbar.size(); ++i) pbar[i] = cubic(static_cast<double>(i) / (n + 1));
  const auto s = reconstruct(m, 0.5, pbar);
  REQUIRE(s.x.size() == n + 2);
  CHECK(s.x.back() == doctest::Approx(1.0));
  for (std::size_t j = 0; j < s.x.size(); ++j) {
    const double Y = m.phi(s.x[j]);
    CHECK(s.p[j] == doctest::Approx(m.psi(Y) * cubic(Y)).epsilon(1e-12).scale(1.0));
  }
  CHECK_THROWS_AS(reconstruct(m, 0.0, std::vector<double>{1, 2, 3}), UsageError);
}

TEST_CASE("front and slope measurement on synthetic profiles") {
  const std::size_t m = 2001;
  std::vector<double> x(m), p(m);
  const double front = 0.6123, slope = -2.5;
  std::mt19937_64 rng(7);
  std::normal_distribution<double> noise(0.0, 1e-4);
  for (std::size_t j = 0; j < m; ++j) {
    x[j] = static_cast<double>(j) / (m - 1);
    p[j] = x[j] < front ? slope * (x[j] - front) + 0.3 * (x[j] - front) * (x[j] - front) : 0.0;
  }
  const double dx = x[1] - x[0];
  const auto f = measure_lwe_front(x, p);
  CHECK(std::abs(f.position - front) < 0.05 * dx);
  CHECK(f.slope == doctest::Approx(slope).epsilon(1e-3));
  CHECK(f.edge < front);
  // Ramp with noise: slope within 1%.
  for (std::size_t j = 0; j < m; ++j) p[j] = (x[j] < front ? slope * (x[j] - front) : 0.0) + noise(rng);
  CHECK(measure_front_slope(x, p, front, 100, 2) == doctest::Approx(slope).epsilon(1e-2));
  CHECK(measure_lwe_front(x, p).slope == doctest::Approx(slope).epsilon(2e-2));
  std::fill(p.begin(), p.end(), 0.4);
  CHECK(std::abs(measure_front_slope(x, p, front)) < 1e-12);
  CHECK_THROWS_AS(measure_front_slope(x, p, 0.001), UsageError);
  std::fill(p.begin(), p.end(), 0.0);
  CHECK(measure_lwe_front(x, p).position == 0.0);
}

TEST_CASE("local total variation counts only the window") {
  const std::vector<double> x{0.0, 0.1, 0.2, 0.3, 0.4}, p{0.0, 1.0, -1.0, 1.0, 5.0};
  CHECK(local_total_variation(x, p, 0.2, 0.1) == doctest::Approx(4.0));
  CHECK(local_total_variation(x, p, 0.2, 0.2) == doctest::Approx(9.0));
}

TEST_CASE("config defaults and validation") {
  LweConfig c;
  const auto p = c.resolved_params();
  CHECK(p.alpha == doctest::Approx(0.156451).epsilon(1e-5));
  CHECK(c.resolved_t_end() > 0.9);
  CHECK(c.resolved_snapshots().size() == 3);
  CHECK(c.resolved_power_ut().scale == doctest::Approx(1536.0 * 8192 / 262144 * 0.5));
  CHECK(c.resolved_power_utt().scale == 16384.0);
  c.n = 3;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = LweConfig{};
  c.cfl = -1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = LweConfig{};
  c.snapshots = {-0.1};
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("small run keeps the boundary data and starts at rest") {
  LweConfig c;
  c.n = 512;
  c.snapshots = {0.0, 0.3};
  c.t_end = 0.3;
  const auto run = solve_lwe(c);
  REQUIRE(run.snapshots.size() == 2);
  for (std::size_t j = 1; j < run.snapshots[0].p.size(); ++j) CHECK(std::abs(run.snapshots[0].p[j]) < 1e-14);
  CHECK(run.snapshots[1].p[0] == doctest::Approx(std::sin(0.3 * kPi)).epsilon(1e-12));
  CHECK(run.snapshots[1].p.back() == 0.0);
  CHECK(run.counters.operator_applications > 0);
  // Ahead of the front the medium is still at rest.
  const double front = surface::lwe_front(run.params, 0.3).position;
  for (std::size_t j = 0; j < run.snapshots[1].x.size(); ++j) {
    if (run.snapshots[1].x[j] > front + 0.05) CHECK(std::abs(run.snapshots[1].p[j]) < 1e-3);
  }
}

TEST_CASE("left-point lift source is first order, midpoint better") {
  LweConfig c;
  c.params = {1.4, 1e-9, 1e-9};
  c.alpha_auto = false;
  c.t_end = 0.6;
  c.snapshots = {0.6};
  c.power_ut = PowerLaw{};
  c.power_utt = PowerLaw{};
  const auto error = [&](std::size_t n, LiftSource src) {
    c.n = n;
    c.source = src;
    const auto s = solve_lwe(c).snapshots[0];
    double err = 0.0;
    for (std::size_t j = 0; j < s.x.size(); ++j) {
      if (s.x[j] < 0.5) err = std::max(err, std::abs(s.p[j] - std::sin(kPi * (0.6 - s.x[j]))));
    }
    return err;
  };
  const double left = error(512, LiftSource::left) / error(1024, LiftSource::left);
  CHECK(left == doctest::Approx(2.0).epsilon(0.1));
  CHECK(error(512, LiftSource::midpoint) / error(2048, LiftSource::midpoint) > 6.0);
}

TEST_CASE("weak homogeneous limit is a travelling sine") {
  LweConfig c;
  c.params = {1.4, 1e-9, 1e-9};
  c.alpha_auto = false;
  c.n = 1024;
  c.t_end = 0.6;
  c.snapshots = {0.6};
  c.power_ut = PowerLaw{};
  c.power_utt = PowerLaw{};
  const auto run = solve_lwe(c);
  const auto& s = run.snapshots[0];
  double err = 0.0;
  for (std::size_t j = 0; j < s.x.size(); ++j) {
    const double exact = s.x[j] < 0.6 ? std::sin(kPi * (0.6 - s.x[j])) : 0.0;
    if (std::abs(s.x[j] - 0.6) > 0.05) err = std::max(err, std::abs(s.p[j] - exact));
  }
  CHECK(err < 1e-3);
}

TEST_CASE("default schedule agrees with the finite-difference reference at T = 0.3") {
  LweConfig c;
  c.snapshots = {0.3};
  // Keep the schedule normalized to the default final time, stop early.
  c.power_ut = c.resolved_power_ut();
  c.power_utt = c.resolved_power_utt();
  c.t_end = 0.3;
  const auto run = solve_lwe(c);
  const auto& s = run.snapshots[0];
  const auto ref = fds::fds_solve(run.params, 4096, surface::lwe_times(run.params).t_f, {0.3});
  const double front = surface::lwe_front(run.params, 0.3).position;
  double err = 0.0;
  for (std::size_t j = 0; j < s.x.size(); ++j) {
    if (front - s.x[j] > 0.01) err = std::max(err, std::abs(s.p[j] - interp(ref.snapshots[0].x, ref.snapshots[0].p, s.x[j])));
  }
  CHECK(err < 2e-2);
  const auto f = measure_lwe_front(s.x, s.p);
  CHECK(std::abs(f.position - front) < 0.005);
  CHECK(f.slope == doctest::Approx(surface::lwe_jumps(run.params, 0.3).jump_px).epsilon(0.1));
}
