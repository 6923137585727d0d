#include "singsurf/kss_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "singsurf/errors.hpp"

namespace singsurf::kss {

namespace {

// sum_j (-x)^j / (2j + m)!, j = 0..terms-1.
double series(int m, double x, int terms) {
  double fact = 1.0;
  for (int i = 2; i <= m; ++i) fact *= i;
  double term = 1.0 / fact;
  double sum = term;
  for (int j = 1; j < terms; ++j) {
    term *= -x / static_cast<double>((2 * j + m - 1) * (2 * j + m));
    sum += term;
  }
  return sum;
}

constexpr double kSecantSeriesThreshold = 0.1;
constexpr int kSecantTerms = 12;

void check_size(std::size_t got, std::size_t want, const char* what) {
  if (got != want) throw UsageError(std::string(what) + ": size mismatch");
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace

std::vector<double> Grid1D::points() const {
  std::vector<double> x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = this->x(j);
  return x;
}

void Counters::record_lanczos(int iterations) {
  lanczos_min_iterations = lanczos_runs == 0 ? iterations : std::min(lanczos_min_iterations, iterations);
  lanczos_max_iterations = std::max(lanczos_max_iterations, iterations);
  ++lanczos_runs;
  lanczos_iterations += static_cast<std::uint64_t>(iterations);
}

// ---------------------------------------------------------------------------

Operator1D::Operator1D(double a2, std::vector<double> a0, double dx) : a2_(a2), a0_(std::move(a0)), dx_(dx) {
  if (a0_.empty()) throw UsageError("Operator1D: empty grid");
  if (!(a2_ > 0.0) || !std::isfinite(a2_)) throw ConfigError("Operator1D: a2 must be positive");
  if (!(dx_ > 0.0) || !std::isfinite(dx_)) throw ConfigError("Operator1D: dx must be positive");
  double sum = 0.0;
  constant_ = true;
  for (double v : a0_) {
    if (!std::isfinite(v)) throw ConfigError("Operator1D: non-finite a0");
    sum += v;
    constant_ = constant_ && v == a0_.front();
  }
  avg_a0_ = sum / static_cast<double>(a0_.size());
}

Operator1D Operator1D::constant(double a2, double a0, std::size_t n, double dx) {
  return Operator1D(a2, std::vector<double>(n, a0), dx);
}

void Operator1D::apply(std::span<const double> u, std::span<double> out, Counters* counters) const {
  const std::size_t n = size();
  check_size(u.size(), n, "Operator1D::apply");
  check_size(out.size(), n, "Operator1D::apply");
  const double c = a2_ / (dx_ * dx_);
  if (n == 1) {
    out[0] = 2.0 * c * u[0] + a0_[0] * u[0];
  } else {
    out[0] = c * (2.0 * u[0] - u[1]) + a0_[0] * u[0];
    for (std::size_t j = 1; j + 1 < n; ++j) out[j] = c * (2.0 * u[j] - u[j - 1] - u[j + 1]) + a0_[j] * u[j];
    out[n - 1] = c * (2.0 * u[n - 1] - u[n - 2]) + a0_[n - 1] * u[n - 1];
  }
  if (counters) ++counters->operator_applications;
}

std::vector<double> Operator1D::apply(std::span<const double> u, Counters* counters) const {
  std::vector<double> out(size());
  apply(u, out, counters);
  return out;
}

Operator1D Operator1D::shifted(double delta) const {
  std::vector<double> a0 = a0_;
  for (double& v : a0) v += delta;
  return Operator1D(a2_, std::move(a0), dx_);
}

Eigen::MatrixXd Operator1D::dense() const {
  const auto n = static_cast<Eigen::Index>(size());
  const double c = a2_ / (dx_ * dx_);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    m(j, j) = 2.0 * c + a0_[static_cast<std::size_t>(j)];
    if (j > 0) m(j, j - 1) = -c;
    if (j + 1 < n) m(j, j + 1) = -c;
  }
  return m;
}

NodePair::NodePair(const Operator1D& op) : lambda2_(op.size()) {
  const double n1 = static_cast<double>(op.size() + 1);
  const double c = op.a2() / (op.dx() * op.dx());
  for (std::size_t k = 0; k < lambda2_.size(); ++k) {
    const double s = std::sin(0.5 * std::numbers::pi * static_cast<double>(k + 1) / n1);
    lambda2_[k] = 4.0 * c * s * s + op.avg_a0();
  }
  check();
}

NodePair NodePair::continuous(const Operator1D& op) {
  NodePair p;
  p.lambda2_.resize(op.size());
  const double n1 = static_cast<double>(op.size() + 1);
  const double c = op.a2() / (op.dx() * op.dx());
  for (std::size_t k = 0; k < p.lambda2_.size(); ++k) {
    const double th = std::numbers::pi * static_cast<double>(k + 1) / n1;
    p.lambda2_[k] = c * th * th + op.avg_a0();
  }
  p.check();
  return p;
}

void NodePair::check() const {
  for (std::size_t k = 0; k < lambda2_.size(); ++k) {
    if (!(lambda2_[k] > 0.0)) {
      throw ConfigError("NodePair: interpolation node lambda2 must be positive (mode " + std::to_string(k + 1) +
                        ")");
    }
  }
}

// ---------------------------------------------------------------------------

double PhiMap::operator()(double lambda) const {
  const double t = t_;
  const double x = lambda * t * t;
  if (kind_ == PhiKind::identity) return 1.0;
  if (std::abs(x) < kSeriesThreshold) {
    switch (kind_) {
      case PhiKind::cosine: return series(0, x, 4);
      case PhiKind::sinc: return t * series(1, x, 4);
      case PhiKind::neg_sqrt_sine: return -lambda * t * series(1, x, 4);
      case PhiKind::one_minus_cos_over: return t * t * series(2, x, 4);
      case PhiKind::cos_minus_one: return -x * series(2, x, 4);
      case PhiKind::identity: break;
    }
    return 1.0;
  }
  if (lambda > 0.0) {
    const double r = std::sqrt(lambda);
    const double th = r * t;
    const double h = std::sin(0.5 * th);
    switch (kind_) {
      case PhiKind::cosine: return std::cos(th);
      case PhiKind::sinc: return std::sin(th) / r;
      case PhiKind::neg_sqrt_sine: return -r * std::sin(th);
      case PhiKind::one_minus_cos_over: return 2.0 * h * h / lambda;
      case PhiKind::cos_minus_one: return -2.0 * h * h;
      case PhiKind::identity: break;
    }
  } else {
    const double r = std::sqrt(-lambda);
    const double th = r * t;
    const double h = std::sinh(0.5 * th);
    switch (kind_) {
      case PhiKind::cosine: return std::cosh(th);
      case PhiKind::sinc: return std::sinh(th) / r;
      case PhiKind::neg_sqrt_sine: return r * std::sinh(th);
      case PhiKind::one_minus_cos_over: return 2.0 * h * h / (-lambda);
      case PhiKind::cos_minus_one: return 2.0 * h * h;
      case PhiKind::identity: break;
    }
  }
  return 1.0;
}

double PhiMap::secant(double lambda) const {
  const double t = t_;
  const double x = lambda * t * t;
  switch (kind_) {
    case PhiKind::cosine:
    case PhiKind::cos_minus_one:
      return -PhiMap(PhiKind::one_minus_cos_over, t)(lambda);
    case PhiKind::neg_sqrt_sine:
      return -PhiMap(PhiKind::sinc, t)(lambda);
    case PhiKind::sinc:
      if (std::abs(x) < kSecantSeriesThreshold) return -t * t * t * series(3, x, kSecantTerms);
      return ((*this)(lambda) - t) / lambda;
    case PhiKind::one_minus_cos_over:
      if (std::abs(x) < kSecantSeriesThreshold) return -t * t * t * t * series(4, x, kSecantTerms);
      return ((*this)(lambda) - 0.5 * t * t) / lambda;
    case PhiKind::identity:
      return 0.0;
  }
  return 0.0;
}

ScalarMap::ScalarMap(const PhiMap& phi)
    : value([phi](double l) { return phi(l); }), secant([phi](double l) { return phi.secant(l); }) {}

double ScalarMap::slope_through_origin(double lambda) const {
  if (secant) return secant(lambda);
  return (value(lambda) - value(0.0)) / lambda;
}

ModeTable tabulate(const ScalarMap& f, const NodePair& nodes) {
  const std::size_t n = nodes.size();
  ModeTable t;
  t.intercept.assign(n, f.value(0.0));
  t.slope.resize(n);
  t.nodal.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double l = nodes.lambda2()[k];
    t.nodal[k] = f.value(l);
    t.slope[k] = f.slope_through_origin(l);
  }
  return t;
}

// ---------------------------------------------------------------------------

Spectra analyze(const Operator1D& op, const specfun::SineTransform& dst, std::span<const double> v,
                bool with_applied, Counters* counters) {
  check_size(v.size(), op.size(), "analyze");
  Spectra s;
  s.plain.resize(v.size());
  dst.forward(v, s.plain);
  if (counters) ++counters->transforms;
  if (with_applied) {
    const auto lv = op.apply(v, counters);
    s.applied.resize(v.size());
    dst.forward(lv, s.applied);
    if (counters) ++counters->transforms;
  }
  return s;
}

void accumulate_kss(const ModeTable& table, const Spectra& spectra, std::span<double> out_hat) {
  const std::size_t n = out_hat.size();
  check_size(spectra.plain.size(), n, "accumulate_kss");
  check_size(spectra.applied.size(), n, "accumulate_kss");
  for (std::size_t k = 0; k < n; ++k) {
    out_hat[k] += table.intercept[k] * spectra.plain[k] + table.slope[k] * spectra.applied[k];
  }
}

void accumulate_fourier(const ModeTable& table, const Spectra& spectra, std::span<double> out_hat) {
  const std::size_t n = out_hat.size();
  check_size(spectra.plain.size(), n, "accumulate_fourier");
  for (std::size_t k = 0; k < n; ++k) out_hat[k] += table.nodal[k] * spectra.plain[k];
}

std::vector<double> kss_apply(const ScalarMap& f, const Operator1D& op, const NodePair& nodes,
                              std::span<const double> u, Counters* counters) {
  const specfun::SineTransform dst(op.size());
  const auto spectra = analyze(op, dst, u, true, counters);
  std::vector<double> hat(u.size(), 0.0), out(u.size());
  accumulate_kss(tabulate(f, nodes), spectra, hat);
  dst.inverse(hat, out);
  if (counters) {
    ++counters->transforms;
    ++counters->matrix_function_products;
  }
  return out;
}

std::vector<double> fourier_apply(const ScalarMap& f, const NodePair& nodes, std::span<const double> u,
                                  Counters* counters) {
  check_size(u.size(), nodes.size(), "fourier_apply");
  const specfun::SineTransform dst(u.size());
  std::vector<double> hat(u.size()), out(u.size());
  dst.forward(u, hat);
  const auto table = tabulate(f, nodes);
  for (std::size_t k = 0; k < hat.size(); ++k) hat[k] *= table.nodal[k];
  dst.inverse(hat, out);
  if (counters) {
    counters->transforms += 2;
    ++counters->matrix_function_products;
  }
  return out;
}

// ---------------------------------------------------------------------------

LanczosResult lanczos_apply(const std::vector<ScalarMap>& fs, const Operator1D& op, std::span<const double> u,
                            const LanczosOptions& options, Counters* counters) {
  const std::size_t n = op.size();
  check_size(u.size(), n, "lanczos_apply");
  if (fs.empty()) throw UsageError("lanczos_apply: no maps requested");
  if (!(options.tol > 0.0) || options.k_max < 1) throw UsageError("lanczos_apply: invalid options");

  LanczosResult res;
  res.results.assign(fs.size(), std::vector<double>(n, 0.0));
  const double unorm = norm(u);
  if (unorm == 0.0) return res;
  if (!std::isfinite(unorm)) throw NumericalError("lanczos_apply: non-finite input vector");

  const int k_cap = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(options.k_max), n));
  Eigen::MatrixXd q(static_cast<Eigen::Index>(n), k_cap + 1);
  for (std::size_t i = 0; i < n; ++i) q(static_cast<Eigen::Index>(i), 0) = u[i] / unorm;
  std::vector<double> alpha, beta;
  std::vector<Eigen::VectorXd> prev(fs.size());
  Eigen::VectorXd w(static_cast<Eigen::Index>(n));
  double change = std::numeric_limits<double>::infinity();

  for (int j = 0; j < k_cap; ++j) {
    op.apply(std::span<const double>(q.col(j).data(), n), std::span<double>(w.data(), n), counters);
    const double a = q.col(j).dot(w);
    alpha.push_back(a);
    w -= a * q.col(j);
    if (j > 0) w -= beta.back() * q.col(j - 1);
    for (int pass = 0; pass < 2; ++pass) {
      const Eigen::VectorXd c = q.leftCols(j + 1).transpose() * w;
      w -= q.leftCols(j + 1) * c;
    }
    const double b = w.norm();
    const int kk = j + 1;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
    Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), kk);
    Eigen::VectorXd sub = kk > 1 ? Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(beta.data(), kk - 1))
                                 : Eigen::VectorXd(0);
    eig.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (eig.info() != Eigen::Success) throw NumericalError("lanczos_apply: tridiagonal eigensolve failed");
    const Eigen::MatrixXd& v = eig.eigenvectors();
    const Eigen::VectorXd& d = eig.eigenvalues();

    change = 0.0;
    std::vector<Eigen::VectorXd> cur(fs.size());
    for (std::size_t m = 0; m < fs.size(); ++m) {
      Eigen::VectorXd fy(kk);
      for (int i = 0; i < kk; ++i) fy(i) = fs[m].value(d(i)) * v(0, i);
      cur[m] = unorm * (q.leftCols(kk) * (v * fy));
      if (j > 0) {
        const double den = cur[m].norm();
        const double diff = (cur[m] - prev[m]).norm();
        change = std::max(change, den > 0.0 ? diff / den : (diff > 0.0 ? 1.0 : 0.0));
      } else {
        change = std::numeric_limits<double>::infinity();
      }
    }
    prev = std::move(cur);

    const double scale = std::abs(a) + (j > 0 ? beta.back() : 0.0);
    const bool invariant = b <= 1e-13 * std::max(scale, 1e-300) || kk == static_cast<int>(n);
    if (change < options.tol || invariant) {
      for (std::size_t m = 0; m < fs.size(); ++m) {
        std::copy(prev[m].data(), prev[m].data() + n, res.results[m].begin());
      }
      res.iterations = kk;
      if (counters) {
        counters->record_lanczos(kk);
        counters->matrix_function_products += fs.size();
      }
      return res;
    }
    beta.push_back(b);
    q.col(j + 1) = w / b;
  }
  if (counters) counters->record_lanczos(k_cap);
  throw LanczosBreakdown("lanczos_apply: no convergence within " + std::to_string(k_cap) + " iterations",
                         std::vector<double>(prev[0].data(), prev[0].data() + n), k_cap, change);
}

LanczosResult lanczos_apply(const ScalarMap& f, const Operator1D& op, std::span<const double> u,
                            const LanczosOptions& options, Counters* counters) {
  return lanczos_apply(std::vector<ScalarMap>{f}, op, u, options, counters);
}

// ---------------------------------------------------------------------------

Backend parse_backend(const std::string& name) {
  if (name == "kss") return Backend::kss;
  if (name == "fourier") return Backend::fourier;
  if (name == "lanczos") return Backend::lanczos;
  if (name == "expeuler") return Backend::expeuler;
  throw ConfigError("unknown backend '" + name + "' (expected kss, fourier, lanczos or expeuler)");
}

std::string to_string(Backend backend) {
  switch (backend) {
    case Backend::kss: return "kss";
    case Backend::fourier: return "fourier";
    case Backend::lanczos: return "lanczos";
    case Backend::expeuler: return "expeuler";
  }
  return "kss";
}

Propagator::Propagator(Operator1D op, double dt, Backend backend, LanczosOptions lanczos)
    : op_(std::move(op)), nodes_(op_), dst_(op_.size()), dt_(dt), backend_(backend), lanczos_(lanczos) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("Propagator: dt must be positive");
  cos_ = tabulate(PhiMap(PhiKind::cosine, dt), nodes_);
  sinc_ = tabulate(PhiMap(PhiKind::sinc, dt), nodes_);
  neg_sqrt_sine_ = tabulate(PhiMap(PhiKind::neg_sqrt_sine, dt), nodes_);
  one_minus_cos_ = tabulate(PhiMap(PhiKind::one_minus_cos_over, dt), nodes_);
}

Propagator::Propagator(Operator1D op, NodePair nodes, double dt)
    : op_(std::move(op)), nodes_(std::move(nodes)), dst_(op_.size()), dt_(dt), backend_(Backend::fourier) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("Propagator: dt must be positive");
  if (nodes_.size() != op_.size()) throw UsageError("Propagator: node count mismatch");
  cos_ = tabulate(PhiMap(PhiKind::cosine, dt), nodes_);
  sinc_ = tabulate(PhiMap(PhiKind::sinc, dt), nodes_);
  neg_sqrt_sine_ = tabulate(PhiMap(PhiKind::neg_sqrt_sine, dt), nodes_);
  one_minus_cos_ = tabulate(PhiMap(PhiKind::one_minus_cos_over, dt), nodes_);
}

SpectralState Propagator::step_spectral(const WaveState& state, std::span<const double> source,
                                        Counters* counters) const {
  const std::size_t n = op_.size();
  check_size(state.u.size(), n, "Propagator::step");
  check_size(state.ut.size(), n, "Propagator::step");
  if (!source.empty()) check_size(source.size(), n, "Propagator::step");
  SpectralState out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};

  if (backend_ == Backend::kss || backend_ == Backend::fourier) {
    const bool kss = backend_ == Backend::kss;
    const auto acc = kss ? accumulate_kss : accumulate_fourier;
    const auto su = analyze(op_, dst_, state.u, kss, counters);
    const auto sut = analyze(op_, dst_, state.ut, kss, counters);
    acc(cos_, su, out.u_hat);
    acc(sinc_, sut, out.u_hat);
    acc(neg_sqrt_sine_, su, out.ut_hat);
    acc(cos_, sut, out.ut_hat);
    if (!source.empty()) {
      const auto sb = analyze(op_, dst_, source, kss, counters);
      acc(one_minus_cos_, sb, out.u_hat);
      acc(sinc_, sb, out.ut_hat);
    }
    if (counters) counters->matrix_function_products += source.empty() ? 4 : 6;
    return out;
  }

  WaveState next;
  physical_step(state, source, next, counters);
  dst_.forward(next.u, out.u_hat);
  dst_.forward(next.ut, out.ut_hat);
  if (counters) counters->transforms += 2;
  return out;
}

WaveState Propagator::step(const WaveState& state, std::span<const double> source, Counters* counters) const {
  if (backend_ == Backend::lanczos || backend_ == Backend::expeuler) {
    WaveState next;
    physical_step(state, source, next, counters);
    return next;
  }
  const auto spec = step_spectral(state, source, counters);
  WaveState next{std::vector<double>(op_.size()), std::vector<double>(op_.size())};
  dst_.inverse(spec.u_hat, next.u);
  dst_.inverse(spec.ut_hat, next.ut);
  if (counters) counters->transforms += 2;
  return next;
}

void Propagator::physical_step(const WaveState& state, std::span<const double> source, WaveState& out,
                               Counters* counters) const {
  const std::size_t n = op_.size();
  check_size(state.u.size(), n, "Propagator::step");
  check_size(state.ut.size(), n, "Propagator::step");
  const PhiMap c(PhiKind::cosine, dt_), s(PhiKind::sinc, dt_), ls(PhiKind::neg_sqrt_sine, dt_),
      phi(PhiKind::one_minus_cos_over, dt_), cm1(PhiKind::cos_minus_one, dt_);
  std::vector<double> b(n, 0.0);
  if (!source.empty()) {
    check_size(source.size(), n, "Propagator::step");
    std::copy(source.begin(), source.end(), b.begin());
  }

  if (backend_ == Backend::expeuler) {
    // v = J r + c = [u'; -L u + b]
    std::vector<double> v2 = op_.apply(state.u, counters);
    for (std::size_t i = 0; i < n; ++i) v2[i] = b[i] - v2[i];
    const auto r1 = lanczos_apply({ScalarMap(s), ScalarMap(cm1)}, op_, state.ut, lanczos_, counters);
    const auto r2 = lanczos_apply({ScalarMap(phi), ScalarMap(s)}, op_, v2, lanczos_, counters);
    out.u.resize(n);
    out.ut.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      out.u[i] = state.u[i] + r1.results[0][i] + r2.results[0][i];
      out.ut[i] = state.ut[i] + r1.results[1][i] + r2.results[1][i];
    }
    return;
  }

  const auto ru = lanczos_apply({ScalarMap(c), ScalarMap(ls)}, op_, state.u, lanczos_, counters);
  const auto rv = lanczos_apply({ScalarMap(s), ScalarMap(c)}, op_, state.ut, lanczos_, counters);
  const auto rb = lanczos_apply({ScalarMap(phi), ScalarMap(s)}, op_, b, lanczos_, counters);
  out.u.resize(n);
  out.ut.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.u[i] = ru.results[0][i] + rv.results[0][i] + rb.results[0][i];
    out.ut[i] = ru.results[1][i] + rv.results[1][i] + rb.results[1][i];
  }
}

WaveState step_wave(const Operator1D& op, const NodePair& nodes, const WaveState& state,
                    std::span<const double> source, double dt, Backend backend, Counters* counters) {
  if (backend == Backend::fourier) return Propagator(op, nodes, dt).step(state, source, counters);
  return Propagator(op, dt, backend).step(state, source, counters);
}

WaveState exp_euler_step(const Operator1D& op, const WaveState& state, std::span<const double> source, double dt,
                         const LanczosOptions& options, Counters* counters) {
  return Propagator(op, dt, Backend::expeuler, options).step(state, source, counters);
}

double wave_energy(const Operator1D& op, const WaveState& state) {
  const auto lu = op.apply(state.u);
  return dot(state.ut, state.ut) + dot(state.u, lu);
}

}  // namespace singsurf::kss
