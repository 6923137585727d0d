#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "singsurf/kss_engine.hpp"
#include "singsurf/surface_analysis.hpp"

namespace singsurf {

// Quartic C2 cutoff pieces on [0, ell], zero beyond, in s = z/ell:
//   A(s) = 1 + a1 s + a3 s^3 + a4 s^4,   B(s) = s^2 + b1 s + b3 s^3 + b4 s^4,
// each with value, first and second derivative vanishing at s = 1. A lift is
// F = f0(t) A + f2(t) ell^2 B, so that F(0) = f0 and F_zz(0) = 2 f2.
class QuarticBasis {
 public:
  explicit QuarticBasis(double ell);

  double ell() const { return ell_; }
  const std::array<double, 5>& a() const { return a_; }
  const std::array<double, 5>& b() const { return b_; }

  struct Values {
    double A = 0, A_z = 0, A_zz = 0;
    double B = 0, B_z = 0, B_zz = 0;  // already multiplied by ell^2
  };
  Values at(double z) const;

 private:
  double ell_;
  std::array<double, 5> a_{}, b_{};
};

// Output of a sampled lift at one time.
struct LiftFields {
  std::vector<double> F, F_t, F_tt, F_zz, G;
};

// Power of the sigma factors as a function of time.
struct PowerLaw {
  enum class Shape { constant, decreasing_square, increasing_linear, increasing_square };
  double scale = 0.0;
  Shape shape = Shape::constant;
  double t_end = 1.0;

  double operator()(double t) const;
};

std::string to_string(PowerLaw::Shape shape);
PowerLaw::Shape parse_power_shape(const std::string& name);  // throws ConfigError

// Splits [0, t_stop] into segments ending at each requested time, each with
// equal steps no longer than dt_max. Returns per-segment (steps, dt).
struct TimeSegment {
  double t_begin, t_end;
  std::size_t steps;
  double dt;
  bool output = true;  // false for the closing stretch after the last stop
};
std::vector<TimeSegment> plan_segments(const std::vector<double>& stops, double dt_max);
// As above, then continues to t_final when it lies past every stop.
std::vector<TimeSegment> plan_segments(const std::vector<double>& stops, double dt_max, double t_final);

namespace shock {

using surface::IsothermalShockParams;

// u = w exp(-z/(2H)) turns the damped, stratified equation into
// u_tt + mu_hat u_t - a2 u_zz + a0 u = 0.
struct TransformedProblem {
  double a2 = 0, a1 = 0, a0 = 0;

  double psi(double z) const;
};

TransformedProblem transform_problem(const IsothermalShockParams& p, double ell);

// Lift with F(0, t) = cos(omega t) and G(0, t) = 0, where
// G = F_tt - a2 F_zz + a0 F + mu_hat F_t.
class ShockLift {
 public:
  ShockLift(const IsothermalShockParams& p, double ell_tilde);

  struct Coefficients {
    double f0, f0_t, f0_tt, f2, f2_t, f2_tt;
  };
  // Coefficients for cos(omega t) = c and sin(omega t) = s; linear in (c, s).
  Coefficients at_phase(double c, double s) const;
  Coefficients at(double t) const;

  LiftFields evaluate(double t, std::span<const double> z) const;
  // G = Gc cos(omega t) + Gs sin(omega t).
  void harmonic_source(std::span<const double> z, std::vector<double>& gc, std::vector<double>& gs) const;

  const QuarticBasis& basis() const { return basis_; }

 private:
  LiftFields evaluate_coefficients(const Coefficients& c, std::span<const double> z) const;

  IsothermalShockParams p_;
  TransformedProblem tp_;
  QuarticBasis basis_;
};

// fd2: centered second difference (dispersive at the grid scale).
// spectral: continuous-Laplacian eigenvalues with Fourier stepping.
enum class Laplacian { fd2, spectral };
std::string to_string(Laplacian l);
Laplacian parse_laplacian(const std::string& s);

enum class SourceMode { frozen, exact };
enum class DampingMode { frozen, exact };
std::string to_string(SourceMode m);
std::string to_string(DampingMode m);
SourceMode parse_source_mode(const std::string& s);
DampingMode parse_damping_mode(const std::string& s);

struct ShockConfig {
  IsothermalShockParams params;
  std::size_t n = 8192;
  double cfl = 16.3841;
  double ell = 0.0;  // 0 selects 40 c0
  double lift_cells = 80.0;
  double t_end = 11.0;
  std::vector<double> snapshots{0.5, 5.0, 10.0};
  kss::Backend backend = kss::Backend::kss;
  PowerLaw power_u{1.0, PowerLaw::Shape::decreasing_square, 11.0};
  PowerLaw power_ut{3.0, PowerLaw::Shape::decreasing_square, 11.0};
  SourceMode source = SourceMode::exact;
  DampingMode damping = DampingMode::exact;
  Laplacian laplacian = Laplacian::fd2;
  kss::LanczosOptions lanczos;

  double domain_length() const { return ell > 0.0 ? ell : 40.0 * params.c0; }
  double dz() const { return domain_length() / static_cast<double>(n + 1); }
  void validate() const;  // throws ConfigError
};

struct ShockSnapshot {
  double t = 0;
  std::vector<double> z;  // including both end points
  std::vector<double> w;
};

struct ShockRun {
  std::vector<ShockSnapshot> snapshots;
  std::vector<TimeSegment> segments;
  kss::Counters counters;
  std::size_t steps = 0;
  double dz = 0;
};

// Throws SolverFailure on non-finite state, ConfigError on bad input.
ShockRun solve_shock(const ShockConfig& config);

struct ShockFront {
  double position = 0;
  double jump = 0;
  std::size_t index = 0;
};

// Leading edge: last sample (scanning right to left) with |w| above
// threshold * max|w|. The front is the steepest drop within search_cells
// behind it; the jump is the maximum over a window of +-half_window cells
// minus the value at the window's right end.
ShockFront measure_shock_front(std::span<const double> z, std::span<const double> w, double threshold = 1e-2,
                               std::size_t search_cells = 40, std::size_t half_window = 5);

}  // namespace shock
}  // namespace singsurf
