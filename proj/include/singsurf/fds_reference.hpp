#pragma once

#include <cstddef>
#include <vector>

#include "singsurf/surface_analysis.hpp"

namespace singsurf::fds {

using surface::LweParams;

// dX = 1/M, dT = t_f/(2M), so the CFL number dT/dX = t_f/2 must stay below 1.
struct FdsGrid {
  std::size_t m = 4096;
  double t_f = 1.0;

  double dx() const { return 1.0 / static_cast<double>(m); }
  double dt() const { return t_f / (2.0 * static_cast<double>(m)); }
  double cfl() const { return 0.5 * t_f; }
  std::size_t steps() const { return 2 * m; }
  void validate() const;  // throws ConfigError
};

struct FdsSnapshot {
  double requested = 0;
  double t = 0;       // grid time actually used
  double offset = 0;  // t - requested
  std::size_t k = 0;
  std::vector<double> x;  // m + 1 points, both ends included
  std::vector<double> p;
};

struct FdsRun {
  FdsGrid grid;
  std::vector<FdsSnapshot> snapshots;
  double min_denominator = 1.0;  // smallest 1 - 2 eps beta_hat P seen
};

// Explicit three-level scheme for
//   (1 - 2 eps b P) P_TT - e^{-alpha X} P_XX + alpha e^{-alpha X} P_X = 2 eps b P_T^2.
// Snapshots snap to the nearest grid time. Throws ConfigError for bad input
// and SolverFailure when 1 - 2 eps beta_hat P falls to min_denominator or below.
FdsRun fds_solve(const LweParams& p, std::size_t m, double t_f, const std::vector<double>& snapshots,
                 double min_denominator = 1e-6);

}  // namespace singsurf::fds
