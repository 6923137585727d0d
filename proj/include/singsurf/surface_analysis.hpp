#pragma once

#include <optional>
#include <string>
#include <vector>

namespace singsurf::surface {

// Linear shock in an isothermal atmosphere with Rayleigh resistance (SI units).
struct IsothermalShockParams {
  double c0 = 347.26;      // sound speed, m/s
  double gamma = 1.40;     // adiabatic index
  double g = 9.81;         // gravity, m/s^2
  double mu_hat = 2.0 * 1.40 * 9.81 / 347.26;  // Rayleigh coefficient, 1/s
  double omega = 6.283185307179586;  // signal angular frequency, rad/s
  double W0 = 1.0;         // signal amplitude, m/s

  double mu_c() const { return gamma * g / c0; }
  double scale_height() const { return c0 * c0 / (gamma * g); }
  // chi = sqrt(mu_hat^2 - mu_c^2) / 2; real only above critical damping.
  double chi() const;

  // Throws ConfigError naming the first violated constraint.
  void validate() const;
};

// Dimensionless inhomogeneous Lighthill-Westervelt configuration.
struct LweParams {
  double gamma = 1.40;
  double epsilon = 0.35;  // p_pk / p0
  double alpha = 0.0;     // density exponent, nonzero for the inhomogeneous problem

  double beta_hat() const { return 0.5 * (1.0 + 1.0 / gamma); }
  double epsilon_bullet() const;

  void validate(bool require_alpha = true) const;
};

// ---- isothermal shock ----------------------------------------------------

double shock_amplitude(const IsothermalShockParams& p, double t);
double shock_front(const IsothermalShockParams& p, double t);
double shock_front_velocity(const IsothermalShockParams& p);

// ---- acceleration waves --------------------------------------------------

struct LweCritical {
  double epsilon_bullet;
  double alpha_bullet;
};

// Alpha for which the acceleration wave blows up exactly as its front reaches
// X = 1. Throws DomainError when epsilon equals epsilon_bullet (within 1e-10).
LweCritical lwe_critical(double gamma, double epsilon);

struct LweTimes {
  double t1;                      // first arrival of the front at X = 1
  std::optional<double> t_infty;  // blow-up time, empty when complex
  double t_f;                     // final time from the piecewise rule
  std::optional<double> t_bd;     // front breakdown time, alpha < 0 only
  double alpha_crt;
};

// Throws DomainError for alpha == 0 (use lwe_limit_alpha0).
LweTimes lwe_times(const LweParams& p);

// Homogeneous (alpha -> 0) limits of the acceleration-wave results.
struct LweAlpha0Limit {
  double t1;       // 1
  double t_infty;  // 1 / (epsilon beta_hat pi)
};
LweAlpha0Limit lwe_limit_alpha0(const LweParams& p);

struct FrontKinematics {
  double position;
  double velocity;
};

// Throws DomainError when 1 + alpha T / 2 <= 0.
FrontKinematics lwe_front(const LweParams& p, double T);

// Inverse of the front position: time at which the front reaches X.
double lwe_front_arrival(const LweParams& p, double X);

struct JumpAmplitudes {
  double jump_pt;
  double jump_px;
  bool blown_up;  // T at or past the blow-up time; amplitudes are signed infinities
};

JumpAmplitudes lwe_jumps(const LweParams& p, double T);

struct JumpReport {
  std::vector<double> times;
  std::vector<double> front_position;
  std::vector<double> front_velocity;
  std::vector<double> jump_pt;
  std::vector<double> jump_px;
  double t1 = 0.0;
  std::optional<double> t_infty;
  double t_f = 0.0;
  std::optional<double> t_bd;
  double alpha_crt = 0.0;

  // Columns: T, front_position, front_velocity, jump_pt, jump_px.
  std::string to_csv() const;
};

JumpReport lwe_report(const LweParams& p, const std::vector<double>& times);

// ---- singular-surface identities ------------------------------------------

// One-sided data at a front. "minus" is behind the front, "plus" ahead of it;
// the jump of F is F_minus - F_plus.
struct OneSidedData {
  std::optional<double> F_minus, F_plus;
  std::optional<double> G_minus, G_plus;
  std::optional<double> Ft_minus, Ft_plus;
  std::optional<double> Fxi_minus, Fxi_plus;
  std::optional<double> jump_F_rate;  // d[[F]]/dt seen by an observer on the front
  std::optional<double> velocity;
};

struct IdentityResiduals {
  std::optional<double> hadamard;  // d[[F]]/dt - ([[F_t]] + V [[F_xi]])
  std::optional<double> maxwell;   // [[F_t]] + V [[F_xi]], only when [[F]] = 0
  std::optional<double> product;   // [[FG]] - (F+ [[G]] + G+ [[F]] + [[F]][[G]])
};

// Evaluates every identity whose inputs are present. Throws UsageError when
// no identity can be evaluated.
IdentityResiduals jump_identities(const OneSidedData& d);

}  // namespace singsurf::surface
