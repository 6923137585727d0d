#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "singsurf/analytic_shock.hpp"
#include "singsurf/errors.hpp"

using namespace singsurf;
using namespace singsurf::analytic;
using singsurf::surface::shock_amplitude;

namespace {

IsothermalShockParams default_params() { return IsothermalShockParams{}; }

// Least-squares slope of log(err) against log(tau).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

}  // namespace

TEST_CASE("laplace image boundary and high-precision values") {
  const auto p = default_params();
  for (double s : {0.5, 1.0, 3.0}) {
    CHECK(laplace_image(p, 0.0, s) == doctest::Approx(s / (s * s + p.omega * p.omega)).epsilon(1e-15));
  }
  using mp = boost::multiprecision::cpp_bin_float_50;
  const mp c0 = p.c0, gamma = p.gamma, g = p.g, om = p.omega;
  const mp H = c0 * c0 / (gamma * g);
  const mp mu = 2 * gamma * g / c0;
  const mp chi = sqrt(mu * mu - c0 * c0 / (H * H)) / 2;
  const mp z = c0, s = 1;
  const mp ref = s / (s * s + om * om) * exp(z / (2 * H)) *
                 exp(-(z / c0) * sqrt((s + mu / 2) * (s + mu / 2) - chi * chi));
  CHECK(laplace_image(p, p.c0, 1.0) == doctest::Approx(static_cast<double>(ref)).epsilon(1e-14));
  IsothermalShockParams bad = p;
  bad.mu_hat = 0.5 * p.mu_c();
  CHECK_THROWS_AS(laplace_image(bad, 1.0, 1.0), ConfigError);
}

TEST_CASE("laplace image approaches its large-s expansion") {
  const auto p = default_params();
  const double z = 1e-5 * p.c0, a = z / p.c0, s = 1e6;
  const double d = (p.mu_hat * p.mu_hat - p.mu_c() * p.mu_c()) / 8.0;
  const double lead = std::exp(-s * a) / s * std::exp(-0.5 * (p.mu_hat - p.mu_c()) * a) * (1.0 + d * a / s);
  CHECK(laplace_image(p, z, s) / lead == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("exact solution causality and boundary") {
  const auto p = default_params();
  CHECK(exact_solution(p, 2.0 * p.c0, 1.0) == 0.0);
  for (double t : {0.1, 0.77, 3.3}) CHECK(exact_solution(p, 0.0, t) == doctest::Approx(std::cos(p.omega * t)).epsilon(1e-14));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ut(0.0, 12.0), uz(0.0, 5000.0);
  for (int i = 0; i < 200; ++i) {
    const double t = ut(rng), z = uz(rng);
    if (z > p.c0 * t) CHECK(exact_solution(p, z, t) == 0.0);
  }
  CHECK_THROWS_AS(exact_solution(p, 1.0, 1.0, 0.1), UsageError);
}

TEST_CASE("exact solution jump matches shock amplitude") {
  const auto p = default_params();
  for (double t : {0.1, 0.5, 5.0, 10.0}) {
    const double zf = p.c0 * t;
    const double behind = exact_solution(p, zf * (1.0 - 1e-9), t, 1e-10);
    const double ahead = exact_solution(p, zf * (1.0 + 1e-9), t, 1e-10);
    CHECK(std::abs(behind - ahead - shock_amplitude(p, t)) <= 1e-7);
  }
}

TEST_CASE("exact solution reproduces the Laplace image") {
  const auto p = default_params();
  const double z = p.c0, a = 1.0;
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  for (double s : {1.0, 2.0, 5.0}) {
    const double t_big = a + std::log(1e8) / s + 2.0;
    double acc = 0.0;
    // Integrate period by period so the oscillation is resolved.
    const double h = 0.25;
    for (double lo = a; lo < t_big; lo += h) {
      acc += GK::integrate([&](double t) { return exact_solution(p, z, t, 1e-10) * std::exp(-s * t); }, lo,
                           std::min(lo + h, t_big), 5, 1e-11);
    }
    CHECK(acc / laplace_image(p, z, s) == doctest::Approx(1.0).epsilon(1e-4));
  }
}

TEST_CASE("small-time expansion") {
  const auto p = default_params();
  const double z = 2.0 * p.c0, a = 2.0;
  CHECK(small_time_approx(p, z, a) == doctest::Approx(shock_amplitude(p, a)).epsilon(1e-15));
  CHECK(small_time_approx(p, z, a - 0.1) == 0.0);

  const std::vector<double> taus{1e-1, 1e-2, 1e-3};
  const auto slope_for = [&](const IsothermalShockParams& q, double zz) {
    std::vector<double> errs;
    for (double tau : taus) {
      const double t = zz / q.c0 + tau;
      errs.push_back(std::abs(exact_solution(q, zz, t, 1e-13) - small_time_approx(q, zz, t)));
    }
    return loglog_slope(taus, errs);
  };
  // With omega = 2 pi the cubic coefficient is tiny next to omega^4/24, so the
  // quartic term dominates on this tau range; the error is still O(tau^3).
  CHECK(slope_for(p, z) >= 2.7);
  // Damping-dominated regime where the cubic term leads.
  IsothermalShockParams damped = p;
  damped.omega = 1.0;
  damped.mu_hat = 10.0 * p.mu_c();
  const double slope = slope_for(damped, 10.0 * p.c0);
  CHECK(slope >= 2.7);
  CHECK(slope <= 3.3);

  // omega enters only at second order in tau.
  IsothermalShockParams q = p;
  q.omega = 3.0 * p.omega;
  for (double tau : {1e-2, 1e-3}) {
    const double diff = small_time_approx(q, z, a + tau) - small_time_approx(p, z, a + tau);
    const double expected = -0.5 * (q.omega * q.omega - p.omega * p.omega) * tau * tau * shock_amplitude(p, a);
    CHECK(diff == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("large-time parameters") {
  const auto p = default_params();
  const auto lt = large_time_params(p);
  const double mc = p.mu_c();
  CHECK(lt.sigma * lt.sigma - lt.varkappa * lt.varkappa ==
        doctest::Approx(mc * mc - 4 * p.omega * p.omega).epsilon(1e-12));
  CHECK(lt.sigma * lt.varkappa == doctest::Approx(2 * p.omega * p.mu_hat).epsilon(1e-14));
  // Nested-radical oracle in extended precision.
  using mp = boost::multiprecision::cpp_bin_float_50;
  const mp m = 2 * mp(1.4) * mp(9.81) / mp(347.26), c = mp(1.4) * mp(9.81) / mp(347.26), w = p.omega;
  const mp d = c * c - 4 * w * w;
  const mp root = sqrt(d * d + 16 * m * m * w * w);
  CHECK(lt.sigma == doctest::Approx(static_cast<double>(sqrt((d + root) / 2))).epsilon(1e-12));
  CHECK(lt.varkappa == doctest::Approx(static_cast<double>(sqrt((-d + root) / 2))).epsilon(1e-14));

  for (int i = 0; i < 1000; ++i) {
    IsothermalShockParams q = p;
    q.omega = std::pow(10.0, -4.0 + 8.0 * i / 999.0);
    const auto r = large_time_params(q);
    CHECK(r.sigma > q.mu_c());
    CHECK(r.sigma < q.mu_hat);
  }
  IsothermalShockParams hf = p;
  hf.omega = 1e4;
  const auto rh = large_time_params(hf);
  CHECK(rh.sigma == doctest::Approx(p.mu_hat).epsilon(1e-8));
  CHECK(0.5 * rh.varkappa / hf.omega == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("large-time envelope at 200 periods") {
  const auto p = default_params();
  const auto lt = large_time_params(p);
  const double t0 = 200.0 * 2.0 * std::numbers::pi / p.omega;
  for (double z : {p.c0, 5.0 * p.c0}) {
    // Fit A cos(omega t) + B sin(omega t) over one period.
    double sc = 0, ss = 0;
    const int n = 64;
    for (int k = 0; k < n; ++k) {
      const double t = t0 + k * (2.0 * std::numbers::pi / p.omega) / n;
      const double w = exact_solution(p, z, t, 1e-9);
      sc += w * std::cos(p.omega * t);
      ss += w * std::sin(p.omega * t);
    }
    const double amp = 2.0 * std::hypot(sc, ss) / n;
    const double theory = std::exp(-0.5 * (lt.sigma - p.mu_c()) * z / p.c0);
    CHECK(std::abs(amp / theory - 1.0) <= 0.05);
    CHECK(std::abs(exact_solution(p, z, t0, 1e-9) - large_time_approx(p, z, t0)) <= 0.05 * theory);
  }
}

TEST_CASE("high-frequency phase velocity") {
  const auto p = default_params();
  CHECK(phase_velocity_hf(p, 1e8) == doctest::Approx(p.c0).epsilon(1e-14));
  IsothermalShockParams crit = p;
  crit.mu_hat = p.mu_c();
  CHECK(phase_velocity_hf(crit, 3.0) == p.c0);
  const double v = phase_velocity_hf(p, 2.0 * std::numbers::pi);
  const double mc = p.mu_c();
  CHECK(v == doctest::Approx(p.c0 * (1.0 - 3.0 * mc * mc / (8.0 * 4.0 * std::numbers::pi * std::numbers::pi))).epsilon(1e-12));
  CHECK(v < p.c0);
}

TEST_CASE("analytic profile table") {
  const auto p = default_params();
  const auto t = analytic_profile(p, 1.0, {0.0, 100.0, 340.0, 400.0});
  CHECK(t.header.size() == 4);
  CHECK(t.column("w_exact")[3] == 0.0);
  CHECK(std::isnan(t.column("w_large_t")[1]));
  CHECK_FALSE(std::isnan(t.column("w_small_t")[2]));
}
