#include "singsurf/fds_reference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "singsurf/csv.hpp"
#include "singsurf/errors.hpp"

namespace singsurf::fds {

void FdsGrid::validate() const {
  if (m < 4) throw ConfigError("FDS grid needs m >= 4");
  if (!(t_f > 0.0) || !std::isfinite(t_f)) throw ConfigError("FDS final time must be positive");
  if (!(cfl() < 1.0)) {
    throw ConfigError("FDS CFL number t_f/2 = " + io::format_double(cfl()) + " must be below 1");
  }
}

FdsRun fds_solve(const LweParams& p, std::size_t m, double t_f, const std::vector<double>& snapshots,
                 double min_denominator) {
  p.validate(false);
  FdsRun run;
  run.grid = {m, t_f};
  run.grid.validate();
  const double dx = run.grid.dx(), dt = run.grid.dt(), r = run.grid.cfl();
  const std::size_t kmax = run.grid.steps();

  struct Request {
    std::size_t order;
    double t;
    std::size_t k;
  };
  std::vector<Request> requests;
  for (std::size_t i = 0; i < snapshots.size(); ++i) {
    const double t = snapshots[i];
    if (!(t >= 0.0) || t > t_f * (1.0 + 1e-12)) {
      throw ConfigError("FDS snapshot " + io::format_double(t) + " lies outside [0, t_f]");
    }
    requests.push_back({i, t, static_cast<std::size_t>(std::llround(t / dt))});
  }
  std::stable_sort(requests.begin(), requests.end(), [](const Request& a, const Request& b) { return a.k < b.k; });
  run.snapshots.resize(snapshots.size());

  const double c = 2.0 * p.epsilon * p.beta_hat();
  std::vector<double> x(m + 1), decay(m + 1);
  for (std::size_t j = 0; j <= m; ++j) {
    x[j] = static_cast<double>(j) * dx;
    decay[j] = std::exp(-p.alpha * x[j]);
  }
  const auto boundary = [&](std::size_t k) { return std::sin(std::numbers::pi * static_cast<double>(k) * dt); };

  // Levels k-1, k, k+1. P^0 = 0 and P^1 = P^0 in the interior.
  std::vector<double> prev(m + 1, 0.0), cur(m + 1, 0.0), next(m + 1, 0.0);
  prev[0] = boundary(0);
  cur[0] = boundary(1);

  std::size_t req = 0;
  const auto emit = [&](std::size_t k, const std::vector<double>& level) {
    while (req < requests.size() && requests[req].k == k) {
      auto& s = run.snapshots[requests[req].order];
      s.requested = requests[req].t;
      s.k = k;
      s.t = static_cast<double>(k) * dt;
      s.offset = s.t - s.requested;
      s.x = x;
      s.p = level;
      ++req;
    }
  };
  emit(0, prev);
  emit(1, cur);

  for (std::size_t k = 1; k < kmax && req < requests.size(); ++k) {
    for (std::size_t j = 1; j < m; ++j) {
      const double den = 1.0 - c * cur[j];
      run.min_denominator = std::min(run.min_denominator, den);
      if (!(den > min_denominator)) {
        throw SolverFailure("FDS degenerates (1 - 2 eps beta_hat P = " + io::format_double(den) + ") at step " +
                                std::to_string(k) + ", T = " + io::format_double(static_cast<double>(k) * dt) +
                                ", X = " + io::format_double(x[j]),
                            k, static_cast<double>(k) * dt);
      }
      const double lap = cur[j + 1] - 2.0 * cur[j] + cur[j - 1];
      const double adv = cur[j + 1] - cur[j - 1];
      const double dp = cur[j] - prev[j];
      next[j] = 2.0 * cur[j] - prev[j] +
                (r * r * decay[j] * lap - p.alpha * r * dt * decay[j] * adv / 2.0 + c * dp * dp) / den;
    }
    next[0] = boundary(k + 1);
    next[m] = 0.0;
    for (std::size_t j = 1; j < m; ++j) {
      if (!std::isfinite(next[j])) {
        throw SolverFailure("FDS produced a non-finite value at step " + std::to_string(k + 1), k + 1,
                            static_cast<double>(k + 1) * dt);
      }
    }
    std::swap(prev, cur);
    std::swap(cur, next);
    emit(k + 1, cur);
  }
  return run;
}

}  // namespace singsurf::fds
