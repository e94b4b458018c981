#include "statmech/response.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "statmech/error.hpp"

namespace statmech::response {

namespace {

using cd = std::complex<double>;
constexpr cd kI{0.0, 1.0};

double gaussian(double x, double sigma) {
  return std::exp(-0.5 * x * x / (sigma * sigma)) / (std::sqrt(2.0 * numerics::kPi) * sigma);
}

std::vector<double> uniform_grid(long points, double half_width) {
  require(points >= 3 && points % 2 == 1, ErrorKind::Grid, "frequency grid needs an odd number of points ≥ 3");
  std::vector<double> w(static_cast<std::size_t>(points));
  const long mid = points / 2;
  for (long i = 0; i < points; ++i)
    w[static_cast<std::size_t>(i)] = half_width * static_cast<double>(i - mid) / static_cast<double>(mid);
  w[static_cast<std::size_t>(mid)] = 0.0;
  return w;
}

// Spacing of a symmetric uniform grid; throws Grid otherwise.
double grid_spacing(const std::vector<double>& w) {
  require(w.size() >= 9, ErrorKind::Grid, "frequency grid needs at least 9 points");
  const double h = (w.back() - w.front()) / static_cast<double>(w.size() - 1);
  require(h > 0.0, ErrorKind::Grid, "frequency grid must increase");
  for (std::size_t i = 0; i < w.size(); ++i) {
    require(std::abs(w[i] - (w.front() + h * static_cast<double>(i))) <= 1e-9 * h, ErrorKind::Grid,
            "frequency grid must be uniform");
    require(std::abs(w[i] + w[w.size() - 1 - i]) <= 1e-9 * h, ErrorKind::Grid,
            "frequency grid must be symmetric about zero");
  }
  return h;
}

}  // namespace

Preparation Preparation::canonical(double T) {
  Preparation p;
  p.kind = Kind::Canonical;
  p.temperature = T;
  return p;
}

Preparation Preparation::microcanonical(double E, double width) {
  Preparation p;
  p.kind = Kind::Microcanonical;
  p.energy = E;
  p.width = width;
  return p;
}

Preparation Preparation::custom(Eigen::VectorXd w) {
  Preparation p;
  p.kind = Kind::Custom;
  p.weights = std::move(w);
  return p;
}

PreparedSystem prepare(const Matrix& H, const Preparation& prep, double broadening) {
  PreparedSystem sys;
  sys.basis = master_eq::diagonalise(H);
  const auto& e = sys.basis.energies;
  const long n = e.size();
  sys.mean_spacing = n > 1 ? (e(n - 1) - e(0)) / static_cast<double>(n - 1) : 1.0;
  if (sys.mean_spacing <= 0.0) sys.mean_spacing = 1.0;
  require(broadening >= 0.0, ErrorKind::Domain, "broadening must be nonnegative");
  sys.broadening = broadening > 0.0 ? broadening : 5.0 * sys.mean_spacing;
  sys.temperature = std::numeric_limits<double>::quiet_NaN();

  Eigen::VectorXd p(n);
  switch (prep.kind) {
    case Preparation::Kind::Canonical:
      require(prep.temperature > 0.0, ErrorKind::Domain, "temperature must be positive");
      sys.temperature = prep.temperature;
      for (long k = 0; k < n; ++k) p(k) = std::exp(-(e(k) - e(0)) / prep.temperature);
      break;
    case Preparation::Kind::Microcanonical: {
      const double width = prep.width > 0.0 ? prep.width : sys.broadening;
      for (long k = 0; k < n; ++k) p(k) = std::exp(-0.5 * std::pow((e(k) - prep.energy) / width, 2));
      break;
    }
    case Preparation::Kind::Custom:
      require(prep.weights.size() == n, ErrorKind::Domain, "custom occupation size mismatch");
      require(prep.weights.minCoeff() >= 0.0, ErrorKind::Domain, "occupations must be nonnegative");
      p = prep.weights;
      break;
  }
  const double total = p.sum();
  require(total > 0.0 && std::isfinite(total), ErrorKind::Domain, "preparation occupies no level");
  sys.occupation = p / total;
  return sys;
}

// ---------------------------------------------------------------------------

Spectrum::Spectrum(const PreparedSystem& sys, const Matrix& A, const Matrix& B, bool include_diagonal) {
  const long n = sys.basis.energies.size();
  require(A.rows() == n && A.cols() == n && B.rows() == n && B.cols() == n, ErrorKind::Domain,
          "observable dimension mismatch");
  require(sys.broadening > 0.0, ErrorKind::Domain, "broadening must be positive");
  const Matrix& u = sys.basis.vectors;
  const Matrix a = u.adjoint() * A * u;
  const Matrix b = u.adjoint() * B * u;
  const auto& e = sys.basis.energies;
  const auto& p = sys.occupation;
  sigma_ = sys.broadening;
  range_ = n > 1 ? e(n - 1) - e(0) : 0.0;
  smooth_ = sys.smooth();
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) {
      if (i == j && !include_diagonal) continue;
      const cd ab = a(i, j) * b(j, i);
      if (ab == 0.0) continue;
      lines_.push_back({e(j) - e(i), p(i) * ab, 0.5 * (p(i) + p(j)) * ab, kI * (p(i) - p(j)) * ab});
    }
}

template <class Pick>
cd Spectrum::sum(double omega, Pick pick) const {
  cd total = 0.0;
  const double reach = 9.0 * sigma_;
  for (const auto& l : lines_) {
    const double x = omega - l.omega;
    if (std::abs(x) > reach) continue;
    total += pick(l) * gaussian(x, sigma_);
  }
  return 2.0 * numerics::kPi * total;
}

cd Spectrum::power(double omega) const { return sum(omega, [](const Line& l) { return l.s; }); }
cd Spectrum::symmetric(double omega) const { return sum(omega, [](const Line& l) { return l.c; }); }
cd Spectrum::response(double omega) const { return sum(omega, [](const Line& l) { return l.k; }); }

cd Spectrum::dissipation(double omega) const {
  const double small = 1e-4 * sigma_;
  if (std::abs(omega) < small) return (response(small) - response(-small)) / (4.0 * kI * small);
  return response(omega) / (2.0 * kI * omega);
}

cd Spectrum::response_kernel(double tau) const {
  cd total = 0.0;
  for (const auto& l : lines_) total += l.k * std::exp(-kI * l.omega * tau);
  return total * std::exp(-0.5 * sigma_ * sigma_ * tau * tau);
}

SpectralTriple Spectrum::on_grid(const SpectralOptions& opts) const {
  const double half = opts.range > 0.0 ? opts.range : (range_ > 0.0 ? 1.2 * range_ : 1.0);
  SpectralTriple out;
  out.frequency = uniform_grid(opts.points, half);
  out.smooth = smooth_;
  for (double w : out.frequency) {
    out.power.push_back(power(w));
    out.symmetric.push_back(symmetric(w));
    out.response.push_back(response(w));
  }
  return out;
}

SpectralTriple spectral_functions(const PreparedSystem& sys, const Matrix& A, const SpectralOptions& opts) {
  return Spectrum(sys, A, opts.include_diagonal).on_grid(opts);
}

SpectralTriple spectral_functions(const PreparedSystem& sys, const Matrix& A, const Matrix& B,
                                  const SpectralOptions& opts) {
  return Spectrum(sys, A, B, opts.include_diagonal).on_grid(opts);
}

double detailed_balance_residual(const SpectralTriple& s, double T, double floor) {
  require(T > 0.0, ErrorKind::Domain, "temperature must be positive");
  grid_spacing(s.frequency);
  double peak = 0.0;
  for (const auto& v : s.power) peak = std::max(peak, std::abs(v));
  const std::size_t n = s.frequency.size();
  double worst = 0.0;
  for (std::size_t i = n / 2 + 1; i < n; ++i) {
    const double w = s.frequency[i];
    const cd up = s.power[i];
    const cd down = s.power[n - 1 - i];
    if (std::abs(up) < floor * peak || std::abs(down) < floor * peak) continue;
    worst = std::max(worst, std::abs(down - std::exp(-w / T) * up) / std::abs(up));
  }
  return worst;
}

// ---------------------------------------------------------------------------

KuboResult kubo_susceptibility(const SpectralTriple& s) {
  const auto& w = s.frequency;
  const double h = grid_spacing(w);
  require(s.response.size() == w.size() && s.power.size() == w.size(), ErrorKind::Grid,
          "spectral arrays do not match the grid");
  const long n = static_cast<long>(w.size());
  const auto& k = s.response;

  KuboResult out;
  out.frequency = w;
  double peak = 0.0;
  for (const auto& v : k) peak = std::max(peak, std::abs(v));
  out.truncated = std::max(std::abs(k.front()), std::abs(k.back())) > 1e-3 * peak;

  for (long i = 0; i < n; ++i) {
    // PV∫ K̃(ω′)/(ω′ − ω) dω′: the symmetric window around the pole pairs
    // K̃(ω+s) − K̃(ω−s); the rest of the grid has no singularity.
    const long m = std::min(i, n - 1 - i);
    cd pv = 0.0;
    if (m > 0) {
      const cd slope = (k[i + 1] - k[i - 1]) / h;  // limit of [K̃(ω+s) − K̃(ω−s)]/s at s = 0
      pv += 0.5 * h * slope;
      for (long j = 1; j <= m; ++j) {
        const cd g = (k[i + j] - k[i - j]) / (static_cast<double>(j) * h);
        pv += (j == m ? 0.5 : 1.0) * h * g;
      }
    }
    const long lo = i - m, hi = i + m;
    auto tail = [&](long from, long to) {
      for (long j = from; j <= to; ++j) {
        if (j == i) continue;
        const double weight = (j == from || j == to) ? 0.5 : 1.0;
        pv += weight * h * k[j] / (w[j] - w[i]);
      }
    };
    if (lo > 0) tail(0, lo);
    if (hi < n - 1) tail(hi, n - 1);
    out.susceptibility.push_back(0.5 * k[i] - kI * pv / (2.0 * numerics::kPi));
  }

  const long mid = n / 2;
  for (long i = 0; i < n; ++i) {
    if (i == mid) {
      out.dissipation.push_back(0.0);
      out.dissipation_fgr.push_back(0.0);
      continue;
    }
    out.dissipation.push_back(out.susceptibility[i].imag() / w[i]);
    out.dissipation_fgr.push_back((s.power[i] - s.power[n - 1 - i]).real() / (2.0 * w[i]));
  }
  out.dissipation[mid] = 0.5 * (out.dissipation[mid - 1] + out.dissipation[mid + 1]);
  out.dissipation_fgr[mid] = 0.5 * (out.dissipation_fgr[mid - 1] + out.dissipation_fgr[mid + 1]);
  return out;
}

// ---------------------------------------------------------------------------

ResponseMatrix response_matrix(const PreparedSystem& sys, const std::vector<Matrix>& forces) {
  require(!forces.empty(), ErrorKind::EmptyInput, "no generalised forces given");
  const long n = sys.basis.energies.size();
  const auto d = static_cast<long>(forces.size());
  std::vector<Matrix> f;
  for (const auto& F : forces) {
    require(F.rows() == n && F.cols() == n, ErrorKind::Domain, "force dimension mismatch");
    f.push_back(sys.basis.vectors.adjoint() * F * sys.basis.vectors);
  }
  const auto& e = sys.basis.energies;
  const auto& p = sys.occupation;
  const double tiny = 1e-12 * std::max(1.0, e.cwiseAbs().maxCoeff());

  ResponseMatrix out;
  out.friction = Eigen::MatrixXd::Zero(d, d);
  out.curvature = Eigen::MatrixXd::Zero(d, d);
  for (long a = 0; a < n; ++a)
    for (long b = 0; b < n; ++b) {
      if (a == b) continue;
      const double gap = e(b) - e(a);
      double slope;  // (f_a − f_b)/(E_b − E_a)
      if (std::abs(gap) > tiny) {
        slope = (p(a) - p(b)) / gap;
      } else {
        slope = std::isfinite(sys.temperature) ? p(a) / sys.temperature : 0.0;
      }
      const double delta = gaussian(gap, sys.broadening);
      for (long k = 0; k < d; ++k)
        for (long j = 0; j < d; ++j) {
          const cd prod = f[k](a, b) * f[j](b, a);
          out.friction(k, j) += numerics::kPi * slope * prod.real() * delta;
          if (std::abs(gap) > tiny) out.curvature(k, j) += p(a) * 2.0 * prod.imag() / (gap * gap);
        }
    }
  return out;
}

FluctuationDissipation fd_check(const PreparedSystem& sys, const Matrix& F) {
  require(std::isfinite(sys.temperature), ErrorKind::Domain, "fd_check needs a canonical preparation");
  FluctuationDissipation out;
  out.temperature = sys.temperature;
  out.friction = response_matrix(sys, {F}).friction(0, 0);
  out.intensity = Spectrum(sys, F, false).symmetric(0.0).real();
  out.ratio = out.intensity > 0.0 ? 2.0 * sys.temperature * out.friction / out.intensity : 0.0;
  return out;
}

std::vector<double> microcanonical_friction(const std::vector<double>& energies, const std::vector<double>& dos,
                                            const std::vector<double>& intensity) {
  const std::size_t n = energies.size();
  require(n >= 3, ErrorKind::Grid, "microcanonical friction needs at least 3 energies");
  require(dos.size() == n && intensity.size() == n, ErrorKind::Domain, "energy grid size mismatch");
  std::vector<double> flux(n);
  for (std::size_t i = 0; i < n; ++i) {
    require(dos[i] > 0.0, ErrorKind::Domain, "density of states must be positive");
    if (i > 0) require(energies[i] > energies[i - 1], ErrorKind::Grid, "energies must increase");
    flux[i] = dos[i] * intensity[i];
  }
  // Three-point derivative on a nonuniform grid.
  auto derivative = [&](std::size_t a, std::size_t b, std::size_t c, double x) {
    const double xa = energies[a], xb = energies[b], xc = energies[c];
    return flux[a] * (2.0 * x - xb - xc) / ((xa - xb) * (xa - xc)) +
           flux[b] * (2.0 * x - xa - xc) / ((xb - xa) * (xb - xc)) +
           flux[c] * (2.0 * x - xa - xb) / ((xc - xa) * (xc - xb));
  };
  std::vector<double> eta(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t mid = std::clamp<std::size_t>(i, 1, n - 2);
    eta[i] = 0.5 * derivative(mid - 1, mid, mid + 1, energies[i]) / dos[i];
  }
  return eta;
}

Eigen::MatrixXd adiabatic_curvature(const std::function<Matrix(const Eigen::VectorXd&)>& H, long level,
                                    const Eigen::VectorXd& x0, double step) {
  require(step > 0.0, ErrorKind::Domain, "finite-difference step must be positive");
  const long d = x0.size();
  require(d > 0, ErrorKind::EmptyInput, "no parameters given");
  const auto basis = master_eq::diagonalise(H(x0));
  const auto& e = basis.energies;
  const long n = e.size();
  require(level >= 0 && level < n, ErrorKind::Domain, "level index out of range");
  const double tol = 1e-9 * std::max(1.0, e.cwiseAbs().maxCoeff());
  for (long m = 0; m < n; ++m)
    if (m != level && std::abs(e(m) - e(level)) < tol)
      throw Error(ErrorKind::Degeneracy, "level " + std::to_string(level) + " is degenerate at X0");

  std::vector<Matrix> f;
  for (long k = 0; k < d; ++k) {
    Eigen::VectorXd xp = x0, xm = x0;
    xp(k) += step;
    xm(k) -= step;
    const Matrix force = -(H(xp) - H(xm)) / (2.0 * step);
    f.push_back(basis.vectors.adjoint() * force * basis.vectors);
  }
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(d, d);
  for (long m = 0; m < n; ++m) {
    if (m == level) continue;
    const double gap = e(m) - e(level);
    for (long k = 0; k < d; ++k)
      for (long j = 0; j < d; ++j) b(k, j) += 2.0 * (f[k](level, m) * f[j](m, level)).imag() / (gap * gap);
  }
  return b;
}

// ---------------------------------------------------------------------------

double drude_conductance(double open_modes, double mean_free_path, double length) {
  require(open_modes >= 0.0 && mean_free_path >= 0.0 && length > 0.0, ErrorKind::Domain,
          "Drude conductance needs nonnegative modes and mean free path and a positive length");
  return open_modes * mean_free_path / length;
}

double scatterer_ring(double transmission) {
  require(transmission > 0.0 && transmission < 1.0, ErrorKind::Domain, "transmission must lie in (0, 1)");
  return transmission / (1.0 - transmission);
}

double scatterer_correlation_sum(double transmission, long terms) {
  require(transmission > 0.0 && transmission < 1.0, ErrorKind::Domain, "transmission must lie in (0, 1)");
  require(terms >= 0, ErrorKind::Domain, "term count must be nonnegative");
  const double r = 2.0 * transmission - 1.0;
  double total = 1.0, power = 1.0;
  for (long k = 1; k <= terms; ++k) {
    power *= r;
    total += 2.0 * power;
  }
  return total;
}

double drude_velocity_correlation(double speed, double scattering_time, double t) {
  require(scattering_time > 0.0, ErrorKind::Domain, "scattering time must be positive");
  return speed * speed * std::exp(-std::abs(t) / scattering_time);
}

double fgr_scattering_rate(double density_of_states, double coupling_squared) {
  require(density_of_states >= 0.0 && coupling_squared >= 0.0, ErrorKind::Domain,
          "density of states and coupling must be nonnegative");
  return 2.0 * numerics::kPi * density_of_states * coupling_squared;
}

double wall_friction(double mass_density, double thermal_speed, double area) {
  require(mass_density >= 0.0 && thermal_speed >= 0.0 && area >= 0.0, ErrorKind::Domain,
          "wall formula inputs must be nonnegative");
  return mass_density * thermal_speed * area;
}

double wall_noise_intensity(double mass, double temperature, double number_density, double area) {
  require(mass > 0.0 && temperature > 0.0, ErrorKind::Domain, "mass and temperature must be positive");
  require(number_density >= 0.0 && area >= 0.0, ErrorKind::Domain, "density and area must be nonnegative");
  const double vt = std::sqrt(2.0 * temperature / mass);
  return mass * mass * vt * vt * vt * number_density * area;
}

std::complex<double> ForcedOscillator::susceptibility(double omega) const {
  return 1.0 / cd(mass * (frequency * frequency - omega * omega), -friction * omega);
}

double ForcedOscillator::position_spectrum(double omega) const {
  require(mass > 0.0 && friction > 0.0 && temperature > 0.0, ErrorKind::Domain,
          "oscillator needs positive mass, friction and temperature");
  // ω·coth(ω/2T) and Im χ/ω stay finite at ω = 0.
  const double x = 0.5 * omega / temperature;
  const double occupation = (classical || std::abs(x) < 1e-8) ? 2.0 * temperature : omega / std::tanh(x);
  const double stiffness = mass * (frequency * frequency - omega * omega);
  const double loss = friction / (stiffness * stiffness + friction * friction * omega * omega);
  return occupation * loss;
}

double ForcedOscillator::velocity_spectrum(double omega) const {
  if (frequency == 0.0) {
    const double x = 0.5 * omega / temperature;
    const double occupation = (classical || std::abs(x) < 1e-8) ? 2.0 * temperature : omega / std::tanh(x);
    return occupation * friction / (mass * mass * omega * omega + friction * friction);
  }
  return omega * omega * position_spectrum(omega);
}

double fermion_many_body_noise(double single_particle, double spacing, double T, double omega) {
  require(spacing > 0.0, ErrorKind::Domain, "level spacing must be positive");
  require(T >= 0.0, ErrorKind::Domain, "temperature must be nonnegative");
  if (T == 0.0) return omega > 0.0 ? omega / spacing * single_particle : 0.0;
  if (omega == 0.0) return T / spacing * single_particle;
  return omega / spacing / (-std::expm1(-omega / T)) * single_particle;
}

std::vector<double> fermion_many_body_noise(const std::function<double(double)>& single_particle, double spacing,
                                            double T, const std::vector<double>& omega) {
  std::vector<double> out;
  out.reserve(omega.size());
  for (double w : omega) out.push_back(fermion_many_body_noise(single_particle(w), spacing, T, w));
  return out;
}

}  // namespace statmech::response
