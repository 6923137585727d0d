#include "singsurf/specfun.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

#include "singsurf/errors.hpp"

namespace singsurf::specfun {

namespace {

constexpr double kInvE = 0.36787944117144232159552377016146;
constexpr int kMaxHalleyIterations = 50;

// e * x + 1 with e split into hi + lo parts, so the distance to the branch
// point survives when x is the double nearest -1/e.
double branch_distance(double x) {
  constexpr double kEHi = 2.718281828459045;
  constexpr double kELo = 1.4456468917292502e-16;
  return std::fma(kEHi, x, 1.0) + kELo * x;
}

// Series about the branch point in p = +-sqrt(2(e x + 1)).
double branch_point_series(double p) {
  return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0))));
}

double initial_guess(RealBranch branch, double x) {
  const double d = branch_distance(x);
  if (branch == RealBranch::principal) {
    if (x < -0.25) return branch_point_series(std::sqrt(std::max(0.0, 2.0 * d)));
    if (x < 3.0) return std::log1p(x) * (1.0 - std::log1p(std::log1p(x)) / (2.0 + std::log1p(x)));
    const double l1 = std::log(x);
    const double l2 = std::log(l1);
    return l1 - l2 + l2 / l1;
  }
  if (x < -0.25) return branch_point_series(-std::sqrt(std::max(0.0, 2.0 * d)));
  const double l1 = std::log(-x);
  const double l2 = std::log(-l1);
  return l1 - l2 + l2 / l1;
}

}  // namespace

double lambert_w(RealBranch branch, double x) {
  if (!std::isfinite(x)) throw DomainError("lambert_w: non-finite argument");
  const double d = branch_distance(x);
  if (x < -kInvE && d < -1e-15) {
    throw DomainError("lambert_w: argument " + std::to_string(x) + " below -1/e");
  }
  if (branch == RealBranch::negative_one && x >= 0.0) {
    throw DomainError("lambert_w: W-1 requires -1/e <= x < 0, got " + std::to_string(x));
  }
  if (d <= 0.0) return -1.0;
  if (x == 0.0) return 0.0;

  double w = initial_guess(branch, x);
  double prev_step = INFINITY;
  for (int it = 0; it < kMaxHalleyIterations; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    // Near the branch point the residual hits round-off before the step does.
    if (std::abs(f) <= 2e-16 * std::abs(x)) return w;
    const double wp1 = w + 1.0;
    const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    if (denom == 0.0 || !std::isfinite(denom)) return w;
    const double step = f / denom;
    if (it > 3 && std::abs(step) >= prev_step) return w;
    w -= step;
    if (std::abs(step) <= 4e-16 * (1.0 + std::abs(w))) return w;
    prev_step = std::abs(step);
  }
  throw NumericalError("lambert_w: Halley iteration did not converge for x = " +
                       std::to_string(x));
}

double bessel_i1_scaled(double x) {
  if (!(x >= 0.0)) throw DomainError("bessel_i1: argument must be >= 0");
  if (x <= 15.0) {
    const double h = 0.5 * x;
    const double h2 = h * h;
    double term = h;
    double sum = h;
    for (int k = 1; k < 200; ++k) {
      term *= h2 / (static_cast<double>(k) * static_cast<double>(k + 1));
      sum += term;
      if (term <= 1e-17 * sum) break;
    }
    return sum * std::exp(-x);
  }
  // Hankel expansion: e^x / sqrt(2 pi x) * sum_k (-1)^k a_k(1) / x^k.
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = -term * (4.0 - odd * odd) / (8.0 * k * x);
    if (std::abs(next) >= std::abs(term)) break;
    term = next;
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

double bessel_i1(double x) {
  if (x <= 15.0) return bessel_i1_scaled(x) * std::exp(x);
  // Split the exponential so the scaled value is never multiplied by inf early.
  const double half = std::exp(0.5 * x);
  return (bessel_i1_scaled(x) * half) * half;
}

namespace {

struct PlanCache {
  std::mutex mutex;
  std::map<std::size_t, fftw_plan> plans;

  ~PlanCache() {
    for (auto& [n, plan] : plans) fftw_destroy_plan(plan);
  }

  fftw_plan get(std::size_t n) {
    std::lock_guard lock(mutex);
    auto it = plans.find(n);
    if (it != plans.end()) return it->second;
    std::vector<double> scratch_in(n), scratch_out(n);
    fftw_plan plan =
        fftw_plan_r2r_1d(static_cast<int>(n), scratch_in.data(), scratch_out.data(), FFTW_RODFT00,
                         FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) throw NumericalError("dst: FFTW could not plan size " + std::to_string(n));
    plans.emplace(n, plan);
    return plan;
  }
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

}  // namespace

SineTransform::SineTransform(std::size_t n) : n_(n), plan_(nullptr), scale_(0.0) {
  if (n < 2) throw UsageError("dst: transform length must be >= 2");
  plan_ = plan_cache().get(n);
  scale_ = 1.0 / std::sqrt(2.0 * static_cast<double>(n + 1));
}

void SineTransform::execute(std::span<const double> in, std::span<double> out) const {
  if (in.size() != n_ || out.size() != n_) {
    throw UsageError("dst: length " + std::to_string(in.size()) + " does not match plan length " +
                     std::to_string(n_));
  }
  // RODFT00 with FFTW_UNALIGNED supports the new-array execute interface
  // from any thread; the input is not modified for 1-D r2r transforms.
  fftw_execute_r2r(static_cast<fftw_plan>(plan_), const_cast<double*>(in.data()), out.data());
  for (double& v : out) v *= scale_;
}

void SineTransform::forward(std::span<const double> values, std::span<double> coefficients) const {
  execute(values, coefficients);
}

void SineTransform::inverse(std::span<const double> coefficients, std::span<double> values) const {
  execute(coefficients, values);
}

SineSpectrum SineTransform::forward(std::span<const double> values) const {
  SineSpectrum s{std::vector<double>(n_)};
  execute(values, s.coefficients);
  return s;
}

std::vector<double> SineTransform::inverse(const SineSpectrum& spectrum) const {
  std::vector<double> out(n_);
  execute(spectrum.coefficients, out);
  return out;
}

SineSpectrum dst_forward(std::span<const double> values) {
  return SineTransform(values.size()).forward(values);
}

std::vector<double> dst_inverse(const SineSpectrum& spectrum) {
  return SineTransform(spectrum.size()).inverse(spectrum);
}

std::vector<double> sigma_factors(std::size_t n_modes, double power) {
  if (n_modes < 1) throw UsageError("sigma_factors: n_modes must be >= 1");
  if (!(power >= 0.0)) throw UsageError("sigma_factors: power must be >= 0");
  std::vector<double> out(n_modes, 1.0);
  if (power == 0.0) return out;
  const double denom = static_cast<double>(n_modes + 1);
  for (std::size_t k = 1; k <= n_modes; ++k) {
    const double arg = std::numbers::pi * static_cast<double>(k) / denom;
    out[k - 1] = std::exp(power * std::log(std::sin(arg) / arg));
  }
  return out;
}

}  // namespace singsurf::specfun
