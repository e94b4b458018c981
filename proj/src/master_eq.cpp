#include "statmech/master_eq.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Sparse>
#include <unsupported/Eigen/KroneckerProduct>

#include "statmech/error.hpp"

namespace statmech::master_eq {

namespace {

using cd = std::complex<double>;
constexpr cd kI{0.0, 1.0};

Matrix identity(long n) { return Matrix::Identity(n, n); }

// Superoperators for ρ ↦ Aρ, ρ ↦ ρA, [A,ρ] and {A,ρ}.
Matrix left(const Matrix& a) { return Eigen::kroneckerProduct(identity(a.rows()), a).eval(); }
Matrix right(const Matrix& a) { return Eigen::kroneckerProduct(a.transpose(), identity(a.rows())).eval(); }
Matrix commutator(const Matrix& a) { return left(a) - right(a); }
Matrix anticommutator(const Matrix& a) { return left(a) + right(a); }

Vector vec(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }
Matrix unvec(const Vector& v, long n) { return Eigen::Map<const Matrix>(v.data(), n, n); }

void require_square(const Matrix& m, const char* what) {
  require(m.rows() == m.cols() && m.rows() > 0, ErrorKind::Domain, std::string(what) + " must be square");
}

void require_hermitian(const Matrix& m, const char* what) {
  require_square(m, what);
  const double scale = std::max(1.0, m.norm());
  require((m - m.adjoint()).norm() <= 1e-10 * scale, ErrorKind::Domain, std::string(what) + " must be Hermitian");
}

double cutoff_factor(double omega, double cutoff) {
  return std::isinf(cutoff) ? 1.0 : std::exp(-std::abs(omega) / cutoff);
}

double min_eigenvalue(const Matrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

void validate_density(const Matrix& rho) {
  require_square(rho, "density matrix");
  require((rho - rho.adjoint()).norm() <= 1e-12 * std::max(1.0, rho.norm()), ErrorKind::Domain,
          "density matrix must be Hermitian");
  require(std::abs(rho.trace() - 1.0) <= 1e-12, ErrorKind::Domain, "density matrix must have unit trace");
  require(min_eigenvalue(rho) >= -1e-10, ErrorKind::Domain, "density matrix must be positive semidefinite");
}

// ---------------------------------------------------------------------------

double BathSpectrum::spectral_density(double omega) const {
  const double c = cutoff_factor(omega, cutoff);
  switch (kind) {
    case BathKind::OhmicHarmonic: return intensity * omega * c;
    case BathKind::OhmicSpin: return intensity * c;
    case BathKind::WhiteNoise: return intensity;
    case BathKind::Custom: return 0.5 * (eval(omega).full - eval(-omega).full);
  }
  return 0.0;
}

BathSpectrum::Values BathSpectrum::eval(double omega) const {
  require(temperature > 0.0, ErrorKind::Domain, "bath temperature must be positive");
  require(intensity >= 0.0, ErrorKind::Domain, "bath intensity must be nonnegative");
  require(cutoff > 0.0, ErrorKind::Domain, "bath cutoff must be positive");
  const double beta = 1.0 / temperature;
  auto full = [&](double w) -> double {
    switch (kind) {
      case BathKind::OhmicHarmonic: {
        require(std::isfinite(temperature), ErrorKind::Domain, "harmonic bath needs a finite temperature");
        if (w == 0.0) return 2.0 * intensity * temperature;
        return 2.0 * intensity * w * cutoff_factor(w, cutoff) / (-std::expm1(-beta * w));
      }
      case BathKind::OhmicSpin:
        return 2.0 * intensity * cutoff_factor(w, cutoff) / (1.0 + std::exp(-beta * w));
      case BathKind::WhiteNoise: return intensity;
      case BathKind::Custom:
        require(static_cast<bool>(custom), ErrorKind::Domain, "custom bath needs a spectrum");
        return custom(w);
    }
    return 0.0;
  };
  const double plus = full(omega);
  const double minus = full(-omega);
  return {plus, 0.5 * (plus + minus), 0.5 * (plus - minus)};
}

// ---------------------------------------------------------------------------

Matrix Generator::apply(const Matrix& rho) const { return unvec(L * vec(rho), dim); }

double Generator::norm() const { return L.cwiseAbs().colwise().sum().maxCoeff(); }

Generator hamiltonian_generator(const Matrix& H) {
  require_hermitian(H, "Hamiltonian");
  return {-kI * commutator(H), H.rows()};
}

Generator lindblad_generator(const Matrix& H, const std::vector<Matrix>& jumps) {
  Generator g = hamiltonian_generator(H);
  const long n = H.rows();
  for (const auto& w : jumps) {
    require(w.rows() == n && w.cols() == n, ErrorKind::Domain, "jump operator dimension mismatch");
    const Matrix gamma = w.adjoint() * w;
    g.L += Eigen::kroneckerProduct(w.conjugate(), w).eval() - 0.5 * anticommutator(gamma);
  }
  return g;
}

Generator white_noise_generator(const Matrix& H, const Matrix& W, double noise) {
  require(noise >= 0.0, ErrorKind::Domain, "noise intensity must be nonnegative");
  require_hermitian(W, "coupling operator");
  require(W.rows() == H.rows(), ErrorKind::Domain, "coupling operator dimension mismatch");
  Generator g = hamiltonian_generator(H);
  const Matrix c = commutator(W);
  g.L -= 0.5 * noise * c * c;
  return g;
}

FokkerPlanckGenerator quantum_fokker_planck_generator(const Matrix& H, const Matrix& W, double noise,
                                                      double friction, long keep) {
  require(friction >= 0.0, ErrorKind::Domain, "friction must be nonnegative");
  require(keep >= 0 && keep <= H.rows(), ErrorKind::Domain, "kept levels exceed the dimension");
  FokkerPlanckGenerator out;
  out.generator = white_noise_generator(H, W, noise);
  const Matrix p = kI * (H * W - W * H);
  const Matrix cx = commutator(W);
  const Matrix drag = 0.5 * friction * cx * anticommutator(p);
  out.generator.L -= kI * drag;
  if (friction > 0.0) {
    require(noise > 0.0, ErrorKind::Domain, "friction without noise has no temperature");
    const double temperature = noise / (2.0 * friction);
    const Matrix cp = commutator(p);
    out.deviation = friction / (16.0 * temperature) * (cp * cp).norm();
    const double drag_norm = drag.norm();
    out.relative_deviation = drag_norm > 0.0 ? out.deviation / drag_norm : 0.0;
  }
  const long n = H.rows();
  if (keep > 0 && keep < n) {
    std::vector<long> index;
    for (long j = 0; j < keep; ++j)
      for (long i = 0; i < keep; ++i) index.push_back(i + j * n);
    const Matrix full = std::move(out.generator.L);
    out.generator.L = full(index, index);
    out.generator.dim = keep;
  }
  return out;
}

// ---------------------------------------------------------------------------

Propagation propagate(const Generator& gen, const Matrix& rho0, double t, const PropagationOptions& opts) {
  validate_density(rho0);
  require(rho0.rows() == gen.dim, ErrorKind::Domain, "initial state dimension mismatch");
  require(t >= 0.0 && std::isfinite(t), ErrorKind::Domain, "propagation time must be finite and nonnegative");
  require(opts.samples >= 0, ErrorKind::Domain, "sample count must be nonnegative");

  const double lnorm = gen.norm();
  double h = opts.step > 0.0 ? opts.step : (lnorm > 0.0 ? 0.01 / lnorm : t);
  const long steps = t > 0.0 ? std::max(1L, static_cast<long>(std::ceil(t / h - 1e-9))) : 0;
  if (steps > 0) h = t / static_cast<double>(steps);

  const long n = gen.dim;
  const long stride = std::max(1L, opts.monitor_every);
  const long sections = opts.samples + 1;
  Propagation out;
  out.steps = steps;
  out.min_eigenvalue = min_eigenvalue(rho0);

  auto record = [&](const Matrix& rho) {
    out.max_trace_drift = std::max(out.max_trace_drift, std::abs(rho.trace() - 1.0));
    out.min_eigenvalue = std::min(out.min_eigenvalue, min_eigenvalue(rho));
  };

  Vector y = vec(rho0);
  long next_sample = 1;
  if (opts.samples > 0) {
    out.times.push_back(0.0);
    out.states.push_back(rho0);
  }
  const long nonzeros = (gen.L.array() != cd(0.0)).count();
  const bool sparse = nonzeros * 10 < gen.L.size();
  const Eigen::SparseMatrix<cd> sparse_l = sparse ? gen.L.sparseView() : Eigen::SparseMatrix<cd>();
  auto act = [&](const Vector& v) -> Vector { return sparse ? Vector(sparse_l * v) : Vector(gen.L * v); };
  for (long s = 1; s <= steps; ++s) {
    const Vector k1 = act(y);
    const Vector k2 = act(y + 0.5 * h * k1);
    const Vector k3 = act(y + 0.5 * h * k2);
    const Vector k4 = act(y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    Matrix rho = unvec(y, n);
    out.max_hermiticity_error = std::max(out.max_hermiticity_error, (rho - rho.adjoint()).norm());
    rho = 0.5 * (rho + rho.adjoint()).eval();
    y = vec(rho);
    if (!y.allFinite()) throw Error(ErrorKind::Step, "master equation produced a non-finite state");
    if (s % stride == 0 || s == steps) record(rho);

    while (next_sample < sections && s * sections >= next_sample * steps) {
      out.times.push_back(static_cast<double>(s) * h);
      out.states.push_back(rho);
      ++next_sample;
    }
  }
  out.times.push_back(t);
  out.states.push_back(unvec(y, n));
  out.positivity_warning = out.min_eigenvalue < -1e-8;
  return out;
}

Propagation lindblad_propagate(const Matrix& H, const std::vector<Matrix>& jumps, const Matrix& rho0, double t,
                               double step) {
  PropagationOptions opts;
  opts.step = step;
  return propagate(lindblad_generator(H, jumps), rho0, t, opts);
}

Matrix generator_steady_state(const Generator& gen) {
  const long n = gen.dim;
  const long m = n * n;
  Matrix a(m + 1, m);
  a.topRows(m) = gen.L;
  a.row(m) = vec(identity(n)).transpose();
  Vector b = Vector::Zero(m + 1);
  b(m) = 1.0;
  Vector x = a.colPivHouseholderQr().solve(b);
  if ((a * x - b).norm() > 1e-8) {
    // No exact null vector, as for a projected generator: take the slowest
    // mode by inverse iteration and accept it only if it barely decays.
    const Eigen::PartialPivLU<Matrix> lu(gen.L);
    Vector v = vec(identity(n)) / static_cast<double>(n);
    cd lambda = 0.0;
    for (int it = 0; it < 50; ++it) {
      const Vector next = lu.solve(v);
      lambda = v.squaredNorm() / v.dot(next);
      v = next / next.norm();
    }
    if (!v.allFinite() || std::abs(lambda) > 1e-6 * gen.norm())
      throw Error(ErrorKind::SingularRates, "generator has no unique steady state");
    x = v;
  }
  Matrix rho = unvec(x, n);
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return rho / rho.trace();
}

// ---------------------------------------------------------------------------

Eigenbasis diagonalise(const Matrix& H) {
  require_hermitian(H, "Hamiltonian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(H);
  return {es.eigenvalues(), es.eigenvectors()};
}

SecularModel secular_generator(const Matrix& H, const Matrix& W, const BathSpectrum& bath, bool group_degenerate) {
  require_hermitian(W, "coupling operator");
  require(W.rows() == H.rows(), ErrorKind::Domain, "coupling operator dimension mismatch");
  SecularModel out;
  out.basis = diagonalise(H);
  const long n = H.rows();
  const auto& e = out.basis.energies;
  const Matrix& u = out.basis.vectors;
  const Matrix w = u.adjoint() * W * u;
  const double tol = 1e-9 * std::max(1.0, e.cwiseAbs().maxCoeff());

  // Level pairs (n, m) with Ω = E_m − E_n, grouped by frequency.
  struct Pair {
    long to, from;
    double omega;
  };
  std::vector<Pair> pairs;
  for (long a = 0; a < n; ++a)
    for (long b = 0; b < n; ++b) pairs.push_back({a, b, a == b ? 0.0 : e(b) - e(a)});
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) { return x.omega < y.omega; });

  Eigen::MatrixXd rates = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < pairs.size();) {
    std::size_t j = i + 1;
    while (j < pairs.size() && pairs[j].omega - pairs[i].omega <= tol) ++j;
    const double omega = pairs[i].omega;
    bool dephasing = true;
    for (std::size_t k = i; k < j; ++k) dephasing = dephasing && pairs[k].to == pairs[k].from;
    if (!dephasing && j - i > 1 && !group_degenerate) {
      throw Error(ErrorKind::Degeneracy, "Bohr frequency " + std::to_string(omega) + " is shared by " +
                                             std::to_string(j - i) + " level pairs");
    }
    Matrix a = Matrix::Zero(n, n);
    for (std::size_t k = i; k < j; ++k) {
      a(pairs[k].to, pairs[k].from) = w(pairs[k].to, pairs[k].from);
    }
    const double s = bath(omega);
    require(s >= 0.0, ErrorKind::Domain, "bath spectrum must be nonnegative");
    for (std::size_t k = i; k < j; ++k) {
      const auto& p = pairs[k];
      if (p.to != p.from) rates(p.to, p.from) += s * std::norm(w(p.to, p.from));
    }
    if (s > 0.0 && a.norm() > 0.0) {
      out.jumps.push_back(std::sqrt(s) * u * a * u.adjoint());
      out.bohr.push_back(omega);
    }
    i = j;
  }

  out.generator = lindblad_generator(H, out.jumps);
  out.rates = stochastic::RateMatrix::from_rates(rates);
  double spacing = numerics::kInf;
  for (long a = 1; a < n; ++a) spacing = std::min(spacing, e(a) - e(a - 1));
  double biggest = 0.0;
  for (long a = 0; a < n; ++a) biggest = std::max(biggest, -out.rates.matrix()(a, a));
  out.validity = spacing > 0.0 ? biggest / spacing : numerics::kInf;
  return out;
}

PauliModel pauli_master(const Matrix& H, const Matrix& W, const BathSpectrum& bath) {
  require_hermitian(W, "coupling operator");
  require(W.rows() == H.rows(), ErrorKind::Domain, "coupling operator dimension mismatch");
  PauliModel out;
  out.basis = diagonalise(H);
  const long n = H.rows();
  const auto& e = out.basis.energies;
  const Matrix w = out.basis.vectors.adjoint() * W * out.basis.vectors;
  Eigen::MatrixXd rates = Eigen::MatrixXd::Zero(n, n);
  for (long a = 0; a < n; ++a)
    for (long b = 0; b < n; ++b)
      if (a != b) rates(a, b) = bath(e(b) - e(a)) * std::norm(w(a, b));
  require(rates.minCoeff() >= 0.0, ErrorKind::Domain, "bath spectrum must be nonnegative");
  out.rates = stochastic::RateMatrix::from_rates(rates);

  const Eigen::VectorXd escape = -out.rates.matrix().diagonal();
  const double s0 = bath(0.0);
  out.dephasing = Eigen::MatrixXd::Zero(n, n);
  for (long a = 0; a < n; ++a)
    for (long b = 0; b < n; ++b)
      if (a != b) out.dephasing(a, b) = 0.5 * (escape(a) + escape(b)) + 0.5 * s0 * std::norm(w(a, a) - w(b, b));
  return out;
}

Eigen::VectorXd populations(const Matrix& rho, const Eigenbasis& basis) {
  const Matrix r = basis.vectors.adjoint() * rho * basis.vectors;
  return r.diagonal().real();
}

// ---------------------------------------------------------------------------

double damped_frequency(double splitting, double gamma) {
  const double d = splitting * splitting - 0.25 * gamma * gamma;
  return d > 0.0 ? std::sqrt(d) : 0.0;
}

BlochState bloch_evolve(const BlochParams& p, const std::array<double, 3>& s0, double t, TransverseModel model) {
  require(p.t1 > 0.0 && p.t2 > 0.0, ErrorKind::Domain, "relaxation times must be positive");
  require(t >= 0.0, ErrorKind::Domain, "time must be nonnegative");
  BlochState out;
  out.unphysical = p.t2 > 2.0 * p.t1 * (1.0 + 1e-12);
  out.s[2] = p.s_eq + (s0[2] - p.s_eq) * std::exp(-t / p.t1);
  const double gamma = 1.0 / p.t2;
  const double omega = p.splitting;
  if (model == TransverseModel::Precession) {
    const cd s = cd(s0[0], s0[1]) * std::exp(cd(-gamma * t, -omega * t));
    out.s[0] = s.real();
    out.s[1] = s.imag();
    return out;
  }
  // Each transverse component starts with the slope of the precession equations.
  const double rate[2] = {omega * s0[1] - gamma * s0[0], -omega * s0[0] - gamma * s0[1]};
  const double half = 0.5 * gamma;
  const double disc = omega * omega - half * half;
  const double decay = std::exp(-half * t);
  for (int k = 0; k < 2; ++k) {
    const double x0 = s0[k];
    const double v0 = rate[k] + half * x0;
    if (disc > 0.0) {
      const double f = std::sqrt(disc);
      out.s[k] = decay * (x0 * std::cos(f * t) + v0 / f * std::sin(f * t));
    } else if (disc < 0.0) {
      const double f = std::sqrt(-disc);
      out.s[k] = decay * (x0 * std::cosh(f * t) + v0 / f * std::sinh(f * t));
    } else {
      out.s[k] = decay * (x0 + v0 * t);
    }
  }
  return out;
}

BlochParams bloch_from_pauli(const PauliModel& m) {
  require(m.rates.size() == 2, ErrorKind::Domain, "Bloch equations need two levels");
  const auto& w = m.rates.matrix();
  const double up = w(1, 0);
  const double down = w(0, 1);
  BlochParams p;
  p.splitting = m.basis.energies(1) - m.basis.energies(0);
  require(up + down > 0.0, ErrorKind::Domain, "two-level model has no population relaxation");
  p.t1 = 1.0 / (up + down);
  require(m.dephasing(0, 1) > 0.0, ErrorKind::Domain, "two-level model has no dephasing");
  p.t2 = 1.0 / m.dephasing(0, 1);
  p.s_eq = (up - down) / (up + down);
  return p;
}

std::array<double, 3> bloch_vector(const Matrix& rho, const Eigenbasis& basis) {
  require(rho.rows() == 2, ErrorKind::Domain, "Bloch vector needs a two-level state");
  const Matrix r = basis.vectors.adjoint() * rho * basis.vectors;
  const cd coherence = 2.0 * r(1, 0);
  return {coherence.real(), coherence.imag(), (r(1, 1) - r(0, 0)).real()};
}

}  // namespace statmech::master_eq
