#include "singsurf/analytic_shock.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "singsurf/errors.hpp"
#include "singsurf/specfun.hpp"

namespace singsurf::analytic {

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 31>;
constexpr unsigned kMaxDepth = 18;
constexpr std::size_t kMaxChunks = 20000;

struct Piece {
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;
};

template <class F>
void accumulate(Piece& acc, F f, double lo, double hi, double tol) {
  if (!(hi > lo)) return;
  double err = 0.0, l1 = 0.0;
  acc.value += Kronrod::integrate(f, lo, hi, kMaxDepth, tol, &err, &l1);
  acc.error += err;
  acc.l1 += l1;
}

}  // namespace

double laplace_image(const IsothermalShockParams& p, double z, double s) {
  p.validate();
  if (!(s > 0.0)) throw UsageError("laplace_image: s must be > 0");
  if (!(z >= 0.0)) throw UsageError("laplace_image: z must be >= 0");
  const double chi = p.chi();
  const double a = z / p.c0;
  const double sh = s + 0.5 * p.mu_hat;
  const double root = std::sqrt((sh - chi) * (sh + chi));
  return p.W0 * s / (s * s + p.omega * p.omega) * std::exp(0.5 * a * p.mu_c() - a * root);
}

double exact_solution(const IsothermalShockParams& p, double z, double t, double quad_tol) {
  p.validate();
  if (!(quad_tol > 0.0 && quad_tol <= 1e-3)) throw UsageError("exact_solution: quad_tol must lie in (0, 1e-3]");
  if (!(z >= 0.0) || !(t >= 0.0)) throw UsageError("exact_solution: z and t must be >= 0");
  const double a = z / p.c0;
  if (t < a) return 0.0;
  const double mu = p.mu_hat;
  const double mc = p.mu_c();
  const double w = p.omega;
  const double chi = p.chi();
  const double head_decay = std::exp(-0.5 * (mu - mc) * a);
  const double head = head_decay * std::cos(w * (t - a));
  if (a == 0.0 || t == a) return p.W0 * head;

  // Kernel exp(-mu s/2) I1(chi r) with r = sqrt(s^2 - a^2), written through the
  // scaled Bessel function so large arguments never overflow.
  const auto kernel = [&](double s, double r) {
    const double x = chi * r;
    return specfun::bessel_i1_scaled(x) * std::exp(x - 0.5 * mu * s);
  };

  Piece acc;
  // Near the front use s = a cosh(theta); the 1/r singularity cancels against
  // the Jacobian a sinh(theta).
  const double s_split = std::min(t, 2.0 * a);
  const double theta_max = std::acosh(s_split / a);
  accumulate(
      acc,
      [&](double th) {
        const double s = a * std::cosh(th);
        const double r = a * std::sinh(th);
        return kernel(s, r) * std::cos(w * (t - s));
      },
      0.0, theta_max, quad_tol);

  if (t > s_split) {
    const double period = 2.0 * std::numbers::pi / w;
    const double span = t - s_split;
    const auto chunks = static_cast<std::size_t>(
        std::clamp(std::ceil(span / period), 1.0, static_cast<double>(kMaxChunks)));
    const double h = span / static_cast<double>(chunks);
    const auto integrand = [&](double s) {
      const double r = std::sqrt((s - a) * (s + a));
      return kernel(s, r) / r * std::cos(w * (t - s));
    };
    for (std::size_t k = 0; k < chunks; ++k) {
      const double lo = s_split + h * static_cast<double>(k);
      const double hi = (k + 1 == chunks) ? t : lo + h;
      accumulate(acc, integrand, lo, hi, quad_tol);
    }
  }

  const double scale = a * chi * std::exp(0.5 * a * mc);
  const double tail = scale * acc.value;
  const double err = scale * acc.error;
  const double ref = std::max(head_decay, scale * acc.l1);
  if (!(err <= quad_tol * ref) || !std::isfinite(tail)) {
    throw QuadratureFailure("exact_solution: quadrature did not reach tolerance at z = " +
                                io::format_double(z) + ", t = " + io::format_double(t),
                            p.W0 * (head + tail), p.W0 * err);
  }
  return p.W0 * (head + tail);
}

double small_time_approx(const IsothermalShockParams& p, double z, double t) {
  const double a = z / p.c0;
  const double tau = t - a;
  if (tau < 0.0) return 0.0;
  const double mu = p.mu_hat;
  const double mc = p.mu_c();
  const double d = (mu * mu - mc * mc) / 8.0;
  const double second = 0.5 * d * d * a * a - 0.5 * mu * d * a - p.omega * p.omega;
  return p.W0 * std::exp(-0.5 * (mu - mc) * a) * (1.0 + d * a * tau + 0.5 * second * tau * tau);
}

LargeTimeParams large_time_params(const IsothermalShockParams& p) {
  p.validate();
  const double mc = p.mu_c();
  if (!(p.mu_hat > mc)) throw ConfigError("large_time_params: requires mu_hat > mu_c");
  const double d = mc * mc - 4.0 * p.omega * p.omega;
  const double root = std::hypot(d, 4.0 * p.mu_hat * p.omega);
  // sigma^2 = (d + root)/2 cancels badly for large omega; use sigma * varkappa = 2 omega mu_hat.
  const double big = std::sqrt(0.5 * (std::abs(d) + root));
  const double small = 2.0 * p.omega * p.mu_hat / big;
  return d >= 0.0 ? LargeTimeParams{big, small} : LargeTimeParams{small, big};
}

double large_time_approx(const IsothermalShockParams& p, double z, double t) {
  const auto lt = large_time_params(p);
  return p.W0 * std::exp(-0.5 * (lt.sigma - p.mu_c()) * z / p.c0) *
         std::cos(p.omega * t - 0.5 * lt.varkappa * z / p.c0);
}

double phase_velocity_hf(const IsothermalShockParams& p, double omega) {
  if (!(omega > 0.0)) throw UsageError("phase_velocity_hf: omega must be > 0");
  const double mc = p.mu_c();
  return p.c0 * (1.0 - (p.mu_hat * p.mu_hat - mc * mc) / (8.0 * omega * omega));
}

bool small_time_valid(const IsothermalShockParams& p, double z, double t) {
  const double tau = t - z / p.c0;
  return tau * std::max(p.omega, p.mu_hat) <= 1.0;
}

bool large_time_valid(const IsothermalShockParams& p, double z, double t) {
  const double tau = t - z / p.c0;
  return tau >= 20.0 * 2.0 * std::numbers::pi / p.omega;
}

io::Table analytic_profile(const IsothermalShockParams& p, double t, const std::vector<double>& z,
                           double quad_tol) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  io::Table out;
  out.header = {"z", "w_exact", "w_small_t", "w_large_t"};
  out.columns.assign(4, {});
  for (double zi : z) {
    out.columns[0].push_back(zi);
    out.columns[1].push_back(exact_solution(p, zi, t, quad_tol));
    out.columns[2].push_back(small_time_valid(p, zi, t) ? small_time_approx(p, zi, t) : nan);
    out.columns[3].push_back(large_time_valid(p, zi, t) ? large_time_approx(p, zi, t) : nan);
  }
  return out;
}

}  // namespace singsurf::analytic
