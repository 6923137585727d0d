#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "singsurf/kss_engine.hpp"
#include "singsurf/shock_solver.hpp"
#include "singsurf/surface_analysis.hpp"

namespace singsurf::lwe {

using surface::LweParams;

// Y = phi(X) = (1 - e^{-K X}) / (1 - e^{-K}) with K = -alpha/2 makes the
// coefficient of U_YY the constant C^2. Small |K| switches to series forms.
class CoordinateMap {
 public:
  explicit CoordinateMap(double alpha);

  double alpha() const { return alpha_; }
  double K() const { return K_; }
  double C() const { return C_; }

  double phi(double X) const;
  double phi_inverse(double Y) const;
  double dphi(double X) const;  // C e^{-K X}

  // a1~(Y) = (K + alpha) C e^{K X(Y)} and its Y-derivative (closed form).
  double a1(double Y) const;
  double a1_prime(double Y) const;
  // a1~^2/(4 C^2) - a1~'/2, which simplifies to (3 alpha^2/16) e^{-alpha X}.
  double a0_bar(double Y) const;
  // exp of the antiderivative of a1~/(2 C^2) with psi(0) = 1; equals e^{alpha X/4}.
  double psi(double Y) const;

  static constexpr double kSeriesThreshold = 1e-7;

 private:
  double alpha_, K_, C_;
  double em1_;  // expm1(-K)
};

// Lift with F(0,T) = sin(pi T) and G(0,T) = 0, supported on [0, ell), where
//   G = -F_TT + C^2 F_YY - a0_bar F + 2 eps beta_hat psi d/dT(F F_T).
class LweLift {
 public:
  LweLift(const CoordinateMap& map, const LweParams& p, double ell = 0.5);

  struct Coefficients {
    double f0, f0_t, f0_tt, f2, f2_t, f2_tt;
  };
  Coefficients at(double T) const;

  LiftFields evaluate(double T, std::span<const double> Y) const;

  const QuarticBasis& basis() const { return basis_; }
  double nonlinear_coefficient() const { return two_eps_beta_; }

 private:
  CoordinateMap map_;
  double two_eps_beta_;
  double a0_at_0_;
  QuarticBasis basis_;
};

// Nonlinear part of the source, 2 eps beta_hat psi Q with
// Q = d/dT(U U_T + U_T F + U F_T).
void add_nonlinear_source(double coefficient, std::span<const double> psi, std::span<const double> u,
                          std::span<const double> ut, std::span<const double> utt, const LiftFields& lift,
                          std::span<double> b);

// Time at which the lift source is sampled for a step: its start (the
// plain frozen scheme) or its midpoint.
enum class LiftSource { left, midpoint };

struct LweConfig {
  LweParams params{1.4, 0.35, 0.0};
  bool alpha_auto = true;  // use alpha_bullet(gamma, epsilon)
  std::size_t n = 8192;
  double cfl = 5.0;        // dT / dY
  double t_end = 0.0;      // 0 selects the time the front reaches X = 0.95
  std::vector<double> snapshots;  // empty selects {0.3, 0.6, t_end}
  kss::Backend backend = kss::Backend::kss;
  // Unset schedules default to 1536 (n/262144)(cfl/10) (T/T_end) for U_T and
  // 16384 (T/T_end)^2 for U_TT.
  std::optional<PowerLaw> power_ut;
  std::optional<PowerLaw> power_utt;
  double lift_ell = 0.5;
  LiftSource source = LiftSource::midpoint;
  kss::LanczosOptions lanczos;

  LweParams resolved_params() const;
  double resolved_t_end() const;
  std::vector<double> resolved_snapshots() const;
  PowerLaw resolved_power_ut() const;
  PowerLaw resolved_power_utt() const;
  double dy() const { return 1.0 / static_cast<double>(n + 1); }
  void validate() const;  // throws ConfigError
};

struct LweSnapshot {
  double t = 0;
  std::vector<double> x;  // uniform, both end points included
  std::vector<double> p;
};

struct LweRun {
  LweParams params;
  double t_end = 0;
  std::vector<LweSnapshot> snapshots;
  std::vector<TimeSegment> segments;
  kss::Counters counters;
  std::size_t steps = 0;
};

using SnapshotCallback = std::function<void(const LweSnapshot&)>;

// Snapshots are also passed to on_snapshot as they are produced, so callers
// keep them when a later step throws. counters, when given, is updated in
// place instead of the run's own copy.
LweRun solve_lwe(const LweConfig& config, const SnapshotCallback& on_snapshot = {},
                 kss::Counters* counters = nullptr);

// Samples (U + F) on the uniform Y grid at X_j = j/(n+1) by 4-point Lagrange
// interpolation and multiplies by psi.
LweSnapshot reconstruct(const CoordinateMap& map, double T, std::span<const double> pbar_with_ends);

struct LweFront {
  double edge = 0;      // last X (right to left) with |P| > threshold max|P|
  double position = 0;  // root of the quadratic fitted just behind the edge
  double slope = 0;     // derivative of that quadratic at the root
};

// Front of an acceleration wave. P vanishes linearly at the kink, so the
// threshold edge trails it by about threshold max|P| / |P_X|. The position is
// refined by a least-squares quadratic over [edge - fit_far, edge - fit_near]
// (X units) extrapolated to its root. Without room for the fit the edge is
// returned as the position.
LweFront measure_lwe_front(std::span<const double> x, std::span<const double> p, double threshold = 1e-2,
                           double fit_far = 0.02, double fit_near = 0.001);

// Least-squares slope of P over [front - far dx, front - near dx].
double measure_front_slope(std::span<const double> x, std::span<const double> p, double front, double far = 12.0,
                           double near = 2.0);

// Sum of |P_{j+1} - P_j| over samples with |X - center| <= half_width.
double local_total_variation(std::span<const double> x, std::span<const double> p, double center,
                             double half_width);

}  // namespace singsurf::lwe
