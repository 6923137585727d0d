#pragma once

#include <vector>

#include "singsurf/csv.hpp"
#include "singsurf/surface_analysis.hpp"

namespace singsurf::analytic {

using surface::IsothermalShockParams;

// Laplace image of w(z, t) for s > 0. Throws ConfigError when mu_hat <= mu_c.
double laplace_image(const IsothermalShockParams& p, double z, double s);

// Exact time-domain signalling solution. Zero ahead of the front (z > c0 t);
// the front point itself belongs to the region behind it. The convolution
// integral is evaluated by adaptive Gauss-Kronrod quadrature to the relative
// tolerance quad_tol in (0, 1e-3]; throws QuadratureFailure when the budget is
// exhausted first.
double exact_solution(const IsothermalShockParams& p, double z, double t, double quad_tol = 1e-8);

// Three-term expansion about the front, zero ahead of it. Error is
// O((t - z/c0)^3).
double small_time_approx(const IsothermalShockParams& p, double z, double t);

struct LargeTimeParams {
  double sigma;
  double varkappa;
};

LargeTimeParams large_time_params(const IsothermalShockParams& p);

// Lowest-order large-t waveform, W0 exp(-(sigma - mu_c) z / (2 c0)) cos(omega t - varkappa z / (2 c0)).
double large_time_approx(const IsothermalShockParams& p, double z, double t);

// High-frequency phase velocity c0 [1 - (mu_hat^2 - mu_c^2) / (8 omega^2)].
double phase_velocity_hf(const IsothermalShockParams& p, double omega);

// Regimes in which the two approximations are reported in profiles. Outside
// them the profile cell is left empty.
bool small_time_valid(const IsothermalShockParams& p, double z, double t);
bool large_time_valid(const IsothermalShockParams& p, double z, double t);

// Columns: z, w_exact, w_small_t, w_large_t (NaN where out of regime).
io::Table analytic_profile(const IsothermalShockParams& p, double t, const std::vector<double>& z,
                           double quad_tol = 1e-8);

}  // namespace singsurf::analytic
