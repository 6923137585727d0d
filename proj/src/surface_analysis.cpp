#include "singsurf/surface_analysis.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "singsurf/csv.hpp"
#include "singsurf/errors.hpp"
#include "singsurf/specfun.hpp"

namespace singsurf::surface {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kAlphaLimit = 1e-7;
constexpr double kEpsilonBulletTol = 1e-10;

// 4 pi epsilon beta_hat, the nonlinear strength that appears in every
// acceleration-wave formula.
double nonlinear_strength(const LweParams& p) { return 4.0 * kPi * p.epsilon * p.beta_hat(); }

}  // namespace

double IsothermalShockParams::chi() const {
  const double mc = mu_c();
  if (!(mu_hat > mc)) {
    throw ConfigError("chi requires mu_hat > mu_c (" + std::to_string(mu_hat) +
                      " <= " + std::to_string(mc) + ")");
  }
  return 0.5 * std::sqrt(mu_hat * mu_hat - mc * mc);
}

void IsothermalShockParams::validate() const {
  if (!(c0 > 0.0)) throw ConfigError("c0 must be > 0");
  if (!(g > 0.0)) throw ConfigError("g must be > 0");
  if (!(omega > 0.0)) throw ConfigError("omega must be > 0");
  if (!(W0 > 0.0)) throw ConfigError("W0 must be > 0");
  if (!(gamma > 1.0 && gamma <= 5.0 / 3.0)) throw ConfigError("gamma must lie in (1, 5/3]");
  if (!(mu_hat > 0.0)) throw ConfigError("mu_hat must be > 0");
}

double LweParams::epsilon_bullet() const { return 1.0 / (kPi * beta_hat()); }

void LweParams::validate(bool require_alpha) const {
  if (!(gamma > 1.0 && gamma <= 5.0 / 3.0)) throw ConfigError("gamma must lie in (1, 5/3]");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
  if (require_alpha && (alpha == 0.0 || !std::isfinite(alpha))) {
    throw ConfigError("alpha must be finite and nonzero");
  }
}

double shock_amplitude(const IsothermalShockParams& p, double t) {
  return p.W0 * std::exp(-0.5 * (p.mu_hat - p.mu_c()) * t);
}

double shock_front(const IsothermalShockParams& p, double t) { return p.c0 * t; }

double shock_front_velocity(const IsothermalShockParams& p) { return p.c0; }

LweCritical lwe_critical(double gamma, double epsilon) {
  LweParams p{gamma, epsilon, 0.0};
  p.validate(false);
  const double eb = p.epsilon_bullet();
  if (std::abs(epsilon - eb) <= kEpsilonBulletTol) {
    throw DomainError("critical epsilon: epsilon = 1/(pi beta_hat) = " + io::format_double(eb) +
                      " gives alpha_bullet = 0");
  }
  const double a = epsilon * p.beta_hat() * kPi;
  const auto branch = epsilon < eb ? specfun::RealBranch::negative_one
                                   : specfun::RealBranch::principal;
  const double w = specfun::lambert_w(branch, -a * std::exp(-a));
  return {eb, -(4.0 / 3.0) * (a + w)};
}

LweAlpha0Limit lwe_limit_alpha0(const LweParams& p) {
  p.validate(false);
  return {1.0, 1.0 / (p.epsilon * p.beta_hat() * kPi)};
}

LweTimes lwe_times(const LweParams& p) {
  p.validate(false);
  if (p.alpha == 0.0) throw DomainError("lwe_times: alpha = 0, use lwe_limit_alpha0");
  const double alpha = p.alpha;
  const double s = nonlinear_strength(p);
  LweTimes out{};
  out.alpha_crt = -s / 3.0;
  if (std::abs(alpha) < kAlphaLimit) {
    const auto lim = lwe_limit_alpha0(p);
    out.t1 = lim.t1;
    out.t_infty = lim.t_infty;
  } else {
    out.t1 = 2.0 * std::expm1(0.5 * alpha) / alpha;
    const double y = 3.0 * alpha / s;
    if (y >= -1.0) {
      // (2/alpha) [(1 + y)^(2/3) - 1] without cancellation for small y.
      out.t_infty = 2.0 * std::expm1((2.0 / 3.0) * std::log1p(y)) / alpha;
    }
  }
  if (alpha < 0.0) out.t_bd = 2.0 / std::abs(alpha);

  const double eb = p.epsilon_bullet();
  const auto t_infty_or_throw = [&]() {
    if (!out.t_infty) throw DomainError("lwe_times: blow-up time is complex for this alpha");
    return *out.t_infty;
  };
  if (std::abs(p.epsilon - eb) <= kEpsilonBulletTol) {
    out.t_f = alpha < 0.0 ? out.t1 : t_infty_or_throw();
  } else {
    const double ab = lwe_critical(p.gamma, p.epsilon).alpha_bullet;
    if (p.epsilon < eb) {
      out.t_f = (alpha < 0.0 || alpha <= ab) ? out.t1 : t_infty_or_throw();
    } else {
      out.t_f = alpha < -std::abs(ab) ? out.t1 : t_infty_or_throw();
    }
  }
  return out;
}

FrontKinematics lwe_front(const LweParams& p, double T) {
  const double q = 1.0 + 0.5 * p.alpha * T;
  if (!(q > 0.0)) {
    throw DomainError("lwe_front: 1 + alpha T/2 <= 0 (front breakdown at T = " +
                      io::format_double(2.0 / std::abs(p.alpha)) + ")");
  }
  const double pos = p.alpha == 0.0 ? T : 2.0 * std::log1p(0.5 * p.alpha * T) / p.alpha;
  return {pos, 1.0 / q};
}

double lwe_front_arrival(const LweParams& p, double X) {
  if (p.alpha == 0.0) return X;
  const double T = 2.0 * std::expm1(0.5 * p.alpha * X) / p.alpha;
  if (!(T >= 0.0) || !std::isfinite(T)) throw DomainError("lwe_front_arrival: front never reaches X");
  return T;
}

JumpAmplitudes lwe_jumps(const LweParams& p, double T) {
  const double inf = std::numeric_limits<double>::infinity();
  if (std::abs(p.alpha) < kAlphaLimit) {
    const double d = 1.0 - p.epsilon * p.beta_hat() * kPi * T;
    if (d <= 0.0) return {inf, -inf, true};
    return {kPi / d, -kPi / d, false};
  }
  const double alpha = p.alpha;
  const double half = 0.5 * alpha * T;
  if (!(1.0 + half > 0.0)) throw DomainError("lwe_jumps: T beyond front breakdown");
  const double s = nonlinear_strength(p);
  // (3 alpha + s) - s q^(3/2) written as 3 alpha - s (q^(3/2) - 1).
  const double q32m1 = std::expm1(1.5 * std::log1p(half));
  const double denom = 3.0 * alpha - s * q32m1;
  const double q = 1.0 + half;
  if (const auto t = lwe_times(p).t_infty; t && T >= *t) return {inf, -inf, true};
  if (denom == 0.0 || denom / alpha <= 0.0) return {inf, -inf, true};
  const double jpt = 3.0 * alpha * kPi * std::sqrt(q) / denom;
  const double jpx = -3.0 * alpha * kPi * q * std::sqrt(q) / denom;
  return {jpt, jpx, false};
}

std::string JumpReport::to_csv() const {
  io::Table t;
  t.header = {"T", "front_position", "front_velocity", "jump_pt", "jump_px"};
  t.columns = {times, front_position, front_velocity, jump_pt, jump_px};
  return t.to_csv();
}

JumpReport lwe_report(const LweParams& p, const std::vector<double>& times) {
  JumpReport r;
  const auto tt = lwe_times(p);
  r.t1 = tt.t1;
  r.t_infty = tt.t_infty;
  r.t_f = tt.t_f;
  r.t_bd = tt.t_bd;
  r.alpha_crt = tt.alpha_crt;
  for (double T : times) {
    const auto front = lwe_front(p, T);
    const auto j = lwe_jumps(p, T);
    r.times.push_back(T);
    r.front_position.push_back(front.position);
    r.front_velocity.push_back(front.velocity);
    r.jump_pt.push_back(j.jump_pt);
    r.jump_px.push_back(j.jump_px);
  }
  return r;
}

IdentityResiduals jump_identities(const OneSidedData& d) {
  IdentityResiduals r;
  const bool have_f = d.F_minus && d.F_plus;
  const bool have_rates = d.Ft_minus && d.Ft_plus && d.Fxi_minus && d.Fxi_plus && d.velocity;
  if (have_rates) {
    const double kinematic =
        (*d.Ft_minus - *d.Ft_plus) + *d.velocity * (*d.Fxi_minus - *d.Fxi_plus);
    if (d.jump_F_rate) r.hadamard = *d.jump_F_rate - kinematic;
    if (have_f && *d.F_minus == *d.F_plus) r.maxwell = kinematic;
  }
  if (have_f && d.G_minus && d.G_plus) {
    const double jf = *d.F_minus - *d.F_plus;
    const double jg = *d.G_minus - *d.G_plus;
    const double jfg = *d.F_minus * *d.G_minus - *d.F_plus * *d.G_plus;
    r.product = jfg - (*d.F_plus * jg + *d.G_plus * jf + jf * jg);
  }
  if (!r.hadamard && !r.maxwell && !r.product) {
    throw UsageError("jump_identities: one-sided data insufficient for any identity");
  }
  return r;
}

}  // namespace singsurf::surface
