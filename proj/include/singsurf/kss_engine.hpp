#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "singsurf/specfun.hpp"

namespace singsurf::kss {

// Uniform mesh on [0, length] with n interior points x_j = j dx, dx = length/(n+1).
struct Grid1D {
  std::size_t n = 0;
  double length = 1.0;

  double dx() const { return length / static_cast<double>(n + 1); }
  double x(std::size_t j) const { return static_cast<double>(j + 1) * dx(); }
  std::vector<double> points() const;
};

struct WaveState {
  std::vector<double> u;
  std::vector<double> ut;
};

// Instrumentation. Owned by whoever drives the stepping; not thread-safe.
struct Counters {
  std::uint64_t operator_applications = 0;
  std::uint64_t transforms = 0;
  std::uint64_t matrix_function_products = 0;
  std::uint64_t lanczos_runs = 0;
  std::uint64_t lanczos_iterations = 0;
  int lanczos_min_iterations = 0;
  int lanczos_max_iterations = 0;

  void record_lanczos(int iterations);
};

// -a2 D2 + diag(a0) with homogeneous Dirichlet ends, D2 the centered second
// difference. Immutable after construction.
class Operator1D {
 public:
  Operator1D(double a2, std::vector<double> a0, double dx);
  static Operator1D constant(double a2, double a0, std::size_t n, double dx);

  std::size_t size() const { return a0_.size(); }
  double a2() const { return a2_; }
  double dx() const { return dx_; }
  const std::vector<double>& a0() const { return a0_; }
  double avg_a0() const { return avg_a0_; }
  bool constant_coefficients() const { return constant_; }

  void apply(std::span<const double> u, std::span<double> out, Counters* counters = nullptr) const;
  std::vector<double> apply(std::span<const double> u, Counters* counters = nullptr) const;

  // Same operator with a0 replaced by a0 + delta.
  Operator1D shifted(double delta) const;
  Eigen::MatrixXd dense() const;

 private:
  double a2_;
  std::vector<double> a0_;
  double dx_;
  double avg_a0_;
  bool constant_;
};

// Interpolation nodes lambda1 = 0 and lambda2_k = a2 (2 - 2 cos(pi k/(n+1)))/dx^2 + avg(a0).
class NodePair {
 public:
  explicit NodePair(const Operator1D& op);
  // Continuous-Laplacian eigenvalues a2 (pi k/((n+1) dx))^2 + avg(a0), i.e. the
  // nodes of a dispersion-free spectral operator on the same grid.
  static NodePair continuous(const Operator1D& op);

  double lambda1() const { return 0.0; }
  const std::vector<double>& lambda2() const { return lambda2_; }
  std::size_t size() const { return lambda2_.size(); }

 private:
  NodePair() = default;
  void check() const;

  std::vector<double> lambda2_;
};

// The scalar maps of the cosine/sine block propagator at time t. Negative
// lambda continues analytically (cosh/sinh).
enum class PhiKind {
  cosine,              // cos(sqrt(l) t)
  sinc,                // sin(sqrt(l) t) / sqrt(l)
  neg_sqrt_sine,       // -sqrt(l) sin(sqrt(l) t)
  one_minus_cos_over,  // (1 - cos(sqrt(l) t)) / l
  cos_minus_one,       // cos(sqrt(l) t) - 1
  identity,            // 1
};

class PhiMap {
 public:
  PhiMap(PhiKind kind, double t) : kind_(kind), t_(t) {}

  PhiKind kind() const { return kind_; }
  double t() const { return t_; }
  double operator()(double lambda) const;
  // (f(lambda) - f(0)) / lambda, cancellation-free near 0.
  double secant(double lambda) const;

  // Below this value of lambda t^2 the maps use a 4-term Taylor series.
  static constexpr double kSeriesThreshold = 1e-4;

 private:
  PhiKind kind_;
  double t_;
};

// A scalar function f(lambda) together with its secant through the origin.
// If secant is empty, (f(l) - f(0))/l is formed directly.
struct ScalarMap {
  std::function<double(double)> value;
  std::function<double(double)> secant;

  ScalarMap() = default;
  ScalarMap(std::function<double(double)> v, std::function<double(double)> s = {})
      : value(std::move(v)), secant(std::move(s)) {}
  ScalarMap(const PhiMap& phi);  // NOLINT: implicit by design

  double slope_through_origin(double lambda) const;
};

// Per-mode coefficients of one map: intercept B_k = f(0), slope
// M_k = (f(lambda2_k) - f(0))/lambda2_k and nodal value f(lambda2_k).
struct ModeTable {
  std::vector<double> intercept;
  std::vector<double> slope;
  std::vector<double> nodal;
};

ModeTable tabulate(const ScalarMap& f, const NodePair& nodes);

// Sine spectra of a vector and of the operator applied to it.
struct Spectra {
  std::vector<double> plain;    // S v
  std::vector<double> applied;  // S L v, empty when not requested
};

// One operator application (when with_applied) and one or two transforms.
Spectra analyze(const Operator1D& op, const specfun::SineTransform& dst, std::span<const double> v,
                bool with_applied, Counters* counters = nullptr);

// out_hat += B .* S v + M .* S L v.
void accumulate_kss(const ModeTable& table, const Spectra& spectra, std::span<double> out_hat);
// out_hat += f(Lambda2) .* S v.
void accumulate_fourier(const ModeTable& table, const Spectra& spectra, std::span<double> out_hat);

// Two-point KSS approximation of f(L) u: one operator application, three transforms.
std::vector<double> kss_apply(const ScalarMap& f, const Operator1D& op, const NodePair& nodes,
                              std::span<const double> u, Counters* counters = nullptr);
// Diagonal Fourier-spectral approximation S^-1 f(Lambda2) S u.
std::vector<double> fourier_apply(const ScalarMap& f, const NodePair& nodes, std::span<const double> u,
                                  Counters* counters = nullptr);

struct LanczosOptions {
  double tol = 1e-4;
  int k_max = 40;
};

struct LanczosResult {
  std::vector<std::vector<double>> results;  // one per requested map
  int iterations = 0;
};

// ||u|| Q_K f(T_K) e1 for every map from a single Krylov basis, full
// reorthogonalization. Stops when ||w_{K+1} - w_K|| / ||w_{K+1}|| < tol for
// every map. Throws LanczosBreakdown at k_max. A zero u returns zeros.
LanczosResult lanczos_apply(const std::vector<ScalarMap>& fs, const Operator1D& op, std::span<const double> u,
                            const LanczosOptions& options = {}, Counters* counters = nullptr);
LanczosResult lanczos_apply(const ScalarMap& f, const Operator1D& op, std::span<const double> u,
                            const LanczosOptions& options = {}, Counters* counters = nullptr);

enum class Backend { kss, fourier, lanczos, expeuler };

Backend parse_backend(const std::string& name);  // throws ConfigError
std::string to_string(Backend backend);

struct SpectralState {
  std::vector<double> u_hat;
  std::vector<double> ut_hat;
};

// Block cosine/sine propagator for u_tt = -L u + b with b frozen over the step:
//   u+  = C u + S u' + (1 - C) L^-1 b
//   u'+ = -L S u + C u' + S b
// with C = cos(sqrt(L) dt), S = L^-1/2 sin(sqrt(L) dt). The kss and fourier
// backends combine all six products in the sine domain (three operator
// applications and eight transforms per step). The lanczos backend evaluates
// the products by Krylov iteration; expeuler uses the exponential Euler form
// r+ = r + dt phi1(J dt)(J r + c) with Lanczos products.
class Propagator {
 public:
  Propagator(Operator1D op, double dt, Backend backend, LanczosOptions lanczos = {});
  // Fourier stepping with caller-supplied nodes.
  Propagator(Operator1D op, NodePair nodes, double dt);

  const Operator1D& op() const { return op_; }
  const NodePair& nodes() const { return nodes_; }
  const specfun::SineTransform& transform() const { return dst_; }
  double dt() const { return dt_; }
  Backend backend() const { return backend_; }

  // Sine spectra of the advanced state; caller regularizes and inverts.
  SpectralState step_spectral(const WaveState& state, std::span<const double> source,
                              Counters* counters = nullptr) const;
  WaveState step(const WaveState& state, std::span<const double> source, Counters* counters = nullptr) const;

 private:
  void physical_step(const WaveState& state, std::span<const double> source, WaveState& out,
                     Counters* counters) const;

  Operator1D op_;
  NodePair nodes_;
  specfun::SineTransform dst_;
  double dt_;
  Backend backend_;
  LanczosOptions lanczos_;
  ModeTable cos_, sinc_, neg_sqrt_sine_, one_minus_cos_;
};

// One step of the block propagator. nodes drive the fourier backend; kss
// always interpolates at NodePair(op), and the Krylov backends need none.
WaveState step_wave(const Operator1D& op, const NodePair& nodes, const WaveState& state,
                    std::span<const double> source, double dt, Backend backend = Backend::kss,
                    Counters* counters = nullptr);

WaveState exp_euler_step(const Operator1D& op, const WaveState& state, std::span<const double> source, double dt,
                         const LanczosOptions& options = {}, Counters* counters = nullptr);

// Discrete energy ||u'||^2 + <u, L u>.
double wave_energy(const Operator1D& op, const WaveState& state);

}  // namespace singsurf::kss
