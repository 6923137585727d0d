#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace singsurf::specfun {

// Real branches of the Lambert W function.
enum class RealBranch {
  principal,     // W0: x >= -1/e, returns w >= -1
  negative_one,  // W-1: -1/e <= x < 0, returns w <= -1
};

// Solves w * exp(w) = x on the requested branch by Halley iteration.
// Throws DomainError outside the branch's domain.
double lambert_w(RealBranch branch, double x);

// Modified Bessel function of the first kind, order one, x >= 0.
double bessel_i1(double x);

// exp(-x) * I1(x); finite for every finite x >= 0.
double bessel_i1_scaled(double x);

// Coefficients of the orthonormal DST-I: c_k = sqrt(2/(N+1)) sum_j v_j sin(pi j k/(N+1)),
// j, k = 1..N. Coefficient k multiplies the mode sin(pi k x / l) sampled on the
// interior grid x_j = j l/(N+1). The transform is its own inverse.
struct SineSpectrum {
  std::vector<double> coefficients;

  std::size_t size() const noexcept { return coefficients.size(); }
};

// Reusable N-point transform. Construction plans the transform; forward and
// inverse are const and may be called concurrently.
class SineTransform {
 public:
  explicit SineTransform(std::size_t n);

  std::size_t size() const noexcept { return n_; }

  void forward(std::span<const double> values, std::span<double> coefficients) const;
  void inverse(std::span<const double> coefficients, std::span<double> values) const;

  SineSpectrum forward(std::span<const double> values) const;
  std::vector<double> inverse(const SineSpectrum& spectrum) const;

 private:
  void execute(std::span<const double> in, std::span<double> out) const;

  std::size_t n_;
  void* plan_;  // fftw_plan, owned by the process-wide plan cache
  double scale_;
};

SineSpectrum dst_forward(std::span<const double> values);
std::vector<double> dst_inverse(const SineSpectrum& spectrum);

// sigma_k^power for k = 1..n_modes with sigma_k = sinc(k/(n_modes+1)).
std::vector<double> sigma_factors(std::size_t n_modes, double power);

}  // namespace singsurf::specfun
