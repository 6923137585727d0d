#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "singsurf/errors.hpp"
#include "singsurf/surface_analysis.hpp"

using namespace singsurf;
using namespace singsurf::surface;

namespace {

constexpr double kPi = std::numbers::pi;

LweParams lwe(double eps, double alpha) { return LweParams{1.4, eps, alpha}; }

// Independent root of T1(alpha) = T_infty(alpha) by bisection.
double alpha_bullet_bisection(double eps, double lo, double hi) {
  const auto g = [eps](double a) {
    const double s = 4.0 * kPi * eps * 0.5 * (1.0 + 1.0 / 1.4);
    const double t1 = 2.0 * (std::exp(a / 2.0) - 1.0) / a;
    const double tinf = -(2.0 / a) * (1.0 - std::pow(1.0 + 3.0 * a / s, 2.0 / 3.0));
    return t1 - tinf;
  };
  double ga = g(lo);
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (lo + hi);
    const double gm = g(m);
    if ((gm > 0) == (ga > 0)) {
      lo = m;
      ga = gm;
    } else {
      hi = m;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("isothermal shock parameters") {
  IsothermalShockParams p;
  CHECK(p.mu_c() == doctest::Approx(0.0395).epsilon(2e-3));
  CHECK(p.mu_c() * p.scale_height() == doctest::Approx(p.c0).epsilon(1e-15));
  CHECK(p.mu_hat == doctest::Approx(0.0791).epsilon(1e-3));
  CHECK_NOTHROW(p.validate());
  IsothermalShockParams bad = p;
  bad.gamma = 2.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = p;
  bad.mu_hat = p.mu_c();
  CHECK_THROWS_AS(bad.chi(), ConfigError);
}

TEST_CASE("shock amplitude and front") {
  IsothermalShockParams p;
  CHECK(shock_amplitude(p, 0.0) == p.W0);
  CHECK(shock_amplitude(p, 10.0) == doctest::Approx(std::exp(-0.5 * p.mu_c() * 10.0)).epsilon(1e-14));
  CHECK(shock_amplitude(p, 10.0) == doctest::Approx(std::exp(-0.1977)).epsilon(2e-4));
  IsothermalShockParams crit = p;
  crit.mu_hat = crit.mu_c();
  CHECK(shock_amplitude(crit, 37.0) == doctest::Approx(crit.W0));
  CHECK(shock_front(p, 0.0) == 0.0);
  CHECK(shock_front(p, 1.0 / p.mu_c()) == doctest::Approx(p.scale_height()).epsilon(1e-14));
  CHECK(shock_front(p, 10.0) == doctest::Approx(3472.6).epsilon(1e-14));
  CHECK(shock_front_velocity(p) == p.c0);
  // Strictly decreasing iff mu_hat > mu_c.
  IsothermalShockParams under = p;
  under.mu_hat = 0.5 * p.mu_c();
  CHECK(shock_amplitude(p, 2.0) < shock_amplitude(p, 1.0));
  CHECK(shock_amplitude(under, 2.0) > shock_amplitude(under, 1.0));
}

TEST_CASE("critical alpha values") {
  const auto c1 = lwe_critical(1.4, 0.35);
  CHECK(std::abs(c1.alpha_bullet - 0.156451) < 1e-5);
  CHECK(c1.alpha_bullet == doctest::Approx(alpha_bullet_bisection(0.35, 0.01, 1.0)).epsilon(1e-10));
  const auto c2 = lwe_critical(1.4, 0.4);
  CHECK(std::abs(c2.alpha_bullet + 0.200618) < 1e-5);
  CHECK(c2.alpha_bullet == doctest::Approx(alpha_bullet_bisection(0.4, -1.0, -0.01)).epsilon(1e-10));
  CHECK(c1.epsilon_bullet == doctest::Approx(1.0 / (kPi * 0.5 * (1.0 + 1.0 / 1.4))));
  CHECK_THROWS_AS(lwe_critical(1.4, c1.epsilon_bullet), DomainError);
}

TEST_CASE("critical times") {
  for (double eps : {0.35, 0.4}) {
    const double ab = lwe_critical(1.4, eps).alpha_bullet;
    const auto t = lwe_times(lwe(eps, ab));
    REQUIRE(t.t_infty);
    CHECK(std::abs(t.t1 - *t.t_infty) <= 1e-9 * t.t1);
    CHECK(t.t_f == (eps < 0.36 ? t.t1 : *t.t_infty));
    CHECK(lwe_front(lwe(eps, ab), *t.t_infty).position == doctest::Approx(1.0).epsilon(1e-9));
    if (eps == 0.35) CHECK(std::abs(t.t_f - 1.04015) < 1e-4);
    if (eps == 0.4) {
      CHECK(std::abs(t.t_f - 0.951481) < 1e-4);
      REQUIRE(t.t_bd);
      CHECK(*t.t_infty < *t.t_bd);
    }
  }
  for (double eps : {0.38, 0.4, 0.45, 0.5}) {
    const double ab = lwe_critical(1.4, eps).alpha_bullet;
    CHECK(ab < 0.0);
    const auto t = lwe_times(lwe(eps, ab));
    CHECK(*t.t_infty < *t.t_bd);
  }
  CHECK_THROWS_AS(lwe_times(lwe(0.35, 0.0)), DomainError);
}

TEST_CASE("homogeneous limit") {
  const auto p = lwe(0.35, 1e-8);
  const auto t = lwe_times(p);
  CHECK(t.t1 == doctest::Approx(1.0).epsilon(1e-7));
  const double beta = 0.5 * (1.4 + 1.0);
  CHECK(std::abs(*t.t_infty / (1.4 / (0.35 * beta * kPi)) - 1.0) < 1e-6);
  const auto j = lwe_jumps(p, 0.5);
  const double bh = p.beta_hat();
  CHECK(std::abs(j.jump_pt / (kPi / (1.0 - 0.35 * bh * kPi * 0.5)) - 1.0) < 1e-6);
}

TEST_CASE("piecewise final time rule") {
  // eps < eps_bullet, alpha above alpha_bullet selects the blow-up time.
  const double ab = lwe_critical(1.4, 0.35).alpha_bullet;
  const auto above = lwe_times(lwe(0.35, ab + 0.1));
  CHECK(above.t_f == *above.t_infty);
  const auto below = lwe_times(lwe(0.35, ab - 0.05));
  CHECK(below.t_f == below.t1);
  CHECK(lwe_times(lwe(0.35, -0.3)).t_f == lwe_times(lwe(0.35, -0.3)).t1);
  // eps > eps_bullet.
  const double ab2 = lwe_critical(1.4, 0.4).alpha_bullet;
  const auto far = lwe_times(lwe(0.4, ab2 - 0.1));
  CHECK(far.t_f == far.t1);
  const auto near = lwe_times(lwe(0.4, ab2 + 0.05));
  CHECK(near.t_f == *near.t_infty);
  const auto pos = lwe_times(lwe(0.4, 0.3));
  CHECK(pos.t_f == *pos.t_infty);
  // Exactly critical epsilon.
  const double eb = lwe(0.35, 0.1).epsilon_bullet();
  CHECK(lwe_times(lwe(eb, 0.1)).t_f == *lwe_times(lwe(eb, 0.1)).t_infty);
  CHECK(lwe_times(lwe(eb, -0.1)).t_f == lwe_times(lwe(eb, -0.1)).t1);
  // Complex blow-up time below alpha_crt.
  const auto deep = lwe_times(lwe(0.35, -2.0));
  CHECK_FALSE(deep.t_infty.has_value());
  CHECK(deep.alpha_crt == doctest::Approx(-4.0 * kPi * 0.35 * lwe(0.35, 1).beta_hat() / 3.0));
}

TEST_CASE("front kinematics") {
  const double ab = lwe_critical(1.4, 0.35).alpha_bullet;
  const auto p = lwe(0.35, ab);
  CHECK(lwe_front(p, 0.0).position == 0.0);
  CHECK(lwe_front(p, 0.0).velocity == 1.0);
  CHECK(lwe_front(p, lwe_times(p).t1).position == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lwe_front(p, 0.98617).position == doctest::Approx(0.95).epsilon(1e-4));
  const double h = 1e-6;
  for (double T : {0.1, 0.5, 0.9}) {
    const double fd = (lwe_front(p, T + h).position - lwe_front(p, T - h).position) / (2 * h);
    CHECK(fd == doctest::Approx(lwe_front(p, T).velocity).epsilon(1e-8));
    CHECK(lwe_front_arrival(p, lwe_front(p, T).position) == doctest::Approx(T).epsilon(1e-12));
  }
  CHECK_THROWS_AS(lwe_front(lwe(0.4, -0.5), 4.5), DomainError);
}

TEST_CASE("jump amplitudes and Maxwell compatibility") {
  const auto p = lwe(0.35, lwe_critical(1.4, 0.35).alpha_bullet);
  const auto j0 = lwe_jumps(p, 0.0);
  CHECK(j0.jump_pt == doctest::Approx(kPi).epsilon(1e-14));
  CHECK(j0.jump_px == doctest::Approx(-kPi).epsilon(1e-14));
  const double tinf = *lwe_times(p).t_infty;
  CHECK(std::abs(lwe_jumps(p, tinf * (1 - 1e-9)).jump_pt) > 1e6);
  const auto past = lwe_jumps(p, tinf * 1.01);
  CHECK(past.blown_up);
  CHECK(std::isinf(past.jump_pt));
  CHECK(past.jump_px < 0);

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> ua(-0.8, 0.8), ue(0.05, 0.95), uf(0.0, 0.99);
  int checked = 0;
  while (checked < 1000) {
    const LweParams q{1.4, ue(rng), ua(rng)};
    if (q.alpha == 0.0) continue;
    const auto t = lwe_times(q);
    double tmax = t.t_infty ? *t.t_infty : 10.0;
    if (t.t_bd) tmax = std::min(tmax, *t.t_bd);
    const double T = uf(rng) * tmax;
    const auto j = lwe_jumps(q, T);
    if (j.blown_up) continue;
    const double v = lwe_front(q, T).velocity;
    CHECK(std::abs(v * j.jump_px + j.jump_pt) <= 1e-12 * std::abs(j.jump_pt));
    ++checked;
  }
}

TEST_CASE("jump report csv") {
  const auto p = lwe(0.35, lwe_critical(1.4, 0.35).alpha_bullet);
  const auto r = lwe_report(p, {0.0, 0.3, 0.6});
  CHECK(r.front_position[1] < r.front_position[2]);
  const auto csv = r.to_csv();
  CHECK(csv.rfind("T,front_position,front_velocity,jump_pt,jump_px\n", 0) == 0);
}

TEST_CASE("singular surface identities") {
  OneSidedData d;
  d.F_minus = 0.7;
  d.F_plus = 0.7;
  d.Ft_minus = 2.0;
  d.Ft_plus = 0.0;
  d.velocity = 0.5;
  d.Fxi_minus = -4.0;
  d.Fxi_plus = 0.0;
  auto r = jump_identities(d);
  REQUIRE(r.maxwell);
  CHECK(*r.maxwell == 0.0);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 1000; ++i) {
    OneSidedData e;
    e.F_minus = u(rng);
    e.F_plus = u(rng);
    e.G_minus = u(rng);
    e.G_plus = u(rng);
    CHECK(std::abs(*jump_identities(e).product) <= 1e-14);
    OneSidedData same = e;
    same.G_minus = e.F_minus;
    same.G_plus = e.F_plus;
    const double jf = *e.F_minus - *e.F_plus;
    const double lhs = *e.F_minus * *e.F_minus - *e.F_plus * *e.F_plus;
    CHECK(lhs == doctest::Approx(2 * *e.F_plus * jf + jf * jf).epsilon(1e-12).scale(1.0));
  }
  CHECK_THROWS_AS(jump_identities(OneSidedData{}), UsageError);
}
