#include "statmech/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <sstream>

namespace statmech::ensembles {

LevelSpectrum::LevelSpectrum(std::vector<Level> levels, std::string label)
    : levels_(std::move(levels)), label_(std::move(label)) {
  require(!levels_.empty(), ErrorKind::Domain, "LevelSpectrum: no levels");
  for (const Level& l : levels_) {
    require(std::isfinite(l.energy), ErrorKind::Domain, "LevelSpectrum: non-finite energy");
    require(std::isfinite(l.degeneracy) && l.degeneracy >= 1.0, ErrorKind::Domain,
            "LevelSpectrum: degeneracy must be >= 1");
  }
}

LevelSpectrum LevelSpectrum::from_energies(const std::vector<double>& energies, std::string label) {
  std::vector<Level> levels;
  levels.reserve(energies.size());
  for (double e : energies) levels.push_back({e, 1.0});
  return LevelSpectrum(std::move(levels), std::move(label));
}

double LevelSpectrum::min_energy() const {
  return std::min_element(levels_.begin(), levels_.end(),
                          [](const Level& a, const Level& b) { return a.energy < b.energy; })
      ->energy;
}

double LevelSpectrum::max_energy() const {
  return std::max_element(levels_.begin(), levels_.end(),
                          [](const Level& a, const Level& b) { return a.energy < b.energy; })
      ->energy;
}

double LevelSpectrum::state_count() const {
  double n = 0.0;
  for (const Level& l : levels_) n += l.degeneracy;
  return n;
}

LevelSpectrum read_spectrum_csv(std::istream& in) {
  std::string line;
  bool header_seen = false;
  std::vector<Level> levels;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      std::string compact;
      for (char c : line) {
        if (c != ' ') compact.push_back(c);
      }
      if (compact != "energy,degeneracy") {
        throw Error(ErrorKind::Config, "spectrum CSV: expected header 'energy,degeneracy'");
      }
      header_seen = true;
      continue;
    }
    std::istringstream row(line);
    std::string e_str, g_str;
    if (!std::getline(row, e_str, ',') || !std::getline(row, g_str)) {
      throw Error(ErrorKind::Config, "spectrum CSV: malformed row at line " + std::to_string(line_no));
    }
    try {
      std::size_t pos_e = 0, pos_g = 0;
      const double e = std::stod(e_str, &pos_e);
      const double g = std::stod(g_str, &pos_g);
      levels.push_back({e, g});
    } catch (const std::exception&) {
      throw Error(ErrorKind::Config, "spectrum CSV: bad number at line " + std::to_string(line_no));
    }
  }
  if (!header_seen) throw Error(ErrorKind::Config, "spectrum CSV: missing header");
  return LevelSpectrum(std::move(levels));
}

void PowerLawDos::validate() const {
  require(c > 0.0, ErrorKind::Domain, "PowerLawDos: c must be positive");
  require(alpha > 0.0, ErrorKind::Domain, "PowerLawDos: alpha must be positive");
  require(volume > 0.0, ErrorKind::Domain, "PowerLawDos: volume must be positive");
}

double PowerLawDos::density(double eps) const {
  return eps < 0.0 ? 0.0 : c * volume * std::pow(eps, alpha - 1.0);
}

double PowerLawDos::counting(double energy) const {
  return energy <= 0.0 ? 0.0 : c * volume * std::pow(energy, alpha) / alpha;
}

namespace {

constexpr double kUnderflowExponent = 700.0;

struct Moments {
  double log_sum = 0.0;  // ln Σ g e^{−β(E−E0)}
  double mean = 0.0;     // relative to E0
  double var = 0.0;
};

Moments shifted_moments(const LevelSpectrum& spec, double beta) {
  require(beta > 0.0, ErrorKind::Domain, "partition: beta must be positive");
  const double e0 = spec.min_energy();
  double sum = 0.0, m1 = 0.0;
  for (const Level& l : spec.levels()) {
    const double x = beta * (l.energy - e0);
    if (x > kUnderflowExponent && std::log(l.degeneracy) - x > std::log(1e-16)) {
      throw Error(ErrorKind::Overflow, "partition: truncated tail would exceed tolerance");
    }
    const double w = l.degeneracy * std::exp(-x);
    sum += w;
    m1 += w * (l.energy - e0);
  }
  const double mean = m1 / sum;
  double var = 0.0;
  for (const Level& l : spec.levels()) {
    const double w = l.degeneracy * std::exp(-beta * (l.energy - e0));
    const double d = l.energy - e0 - mean;
    var += w * d * d;
  }
  return {std::log(sum), mean, var / sum};
}

ThermoObservables assemble(double lnZ, double E, double varE, double beta) {
  ThermoObservables o;
  o.lnZ = lnZ;
  o.E = E;
  o.VarE = varE;
  o.C = beta * beta * varE;
  o.F = -lnZ / beta;
  o.S = beta * E + lnZ;
  return o;
}

}  // namespace

ThermoObservables partition(const LevelSpectrum& spec, const ThermoPoint& pt) {
  const Moments m = shifted_moments(spec, pt.beta);
  const double e0 = spec.min_energy();
  return assemble(m.log_sum - pt.beta * e0, e0 + m.mean, m.var, pt.beta);
}

std::vector<double> probabilities(const LevelSpectrum& spec, const ThermoPoint& pt) {
  const Moments m = shifted_moments(spec, pt.beta);
  const double e0 = spec.min_energy();
  std::vector<double> p;
  p.reserve(spec.levels().size());
  for (const Level& l : spec.levels()) {
    p.push_back(l.degeneracy * std::exp(-pt.beta * (l.energy - e0) - m.log_sum));
  }
  return p;
}

ThermoObservables oscillator_observables(double omega, const ThermoPoint& pt) {
  require(omega > 0.0, ErrorKind::Domain, "oscillator: omega must be positive");
  require(pt.beta > 0.0, ErrorKind::Domain, "oscillator: beta must be positive");
  const double x = pt.beta * omega;
  const double q = std::exp(-x);
  // ln Z = −x/2 − ln(1 − e^{−x}); E = ω/2 + ω/(eˣ − 1).
  const double lnZ = -0.5 * x - std::log1p(-q);
  const double n = q / (-std::expm1(-x));
  const double E = omega * (0.5 + n);
  const double varE = omega * omega * n * (1.0 + n);
  return assemble(lnZ, E, varE, pt.beta);
}

ThermoObservables spin_observables(double omega, const ThermoPoint& pt) {
  require(omega > 0.0, ErrorKind::Domain, "spin: omega must be positive");
  require(pt.beta > 0.0, ErrorKind::Domain, "spin: beta must be positive");
  const double x = pt.beta * omega;
  const double q = std::exp(-x);
  const double lnZ = std::log1p(q);
  const double n = q / (1.0 + q);
  const double E = omega * n;
  const double varE = omega * omega * n * (1.0 - n);
  return assemble(lnZ, E, varE, pt.beta);
}

OccupationStats occupation_stats(Statistics kind, double x) {
  OccupationStats s;
  if (kind == Statistics::Bose) {
    require(x > 0.0, ErrorKind::Domain, "occupation_stats: Bose mode requires x > 0");
    s.mean = 1.0 / std::expm1(x);
    s.variance = (1.0 + s.mean) * s.mean;
  } else {
    s.mean = 1.0 / (std::exp(x) + 1.0);
    s.variance = (1.0 - s.mean) * s.mean;
  }
  // Second factorial moment ⟨n(n−1)⟩ = Var + ⟨n⟩² − ⟨n⟩, evaluated without
  // the cancellation: 2⟨n⟩² for a thermal boson mode, 0 for a fermion.
  const double factorial2 = kind == Statistics::Bose ? 2.0 * s.mean * s.mean : 0.0;
  s.g2 = s.mean > 0.0 ? factorial2 / (s.mean * s.mean) : 0.0;
  return s;
}

double debye_heat_capacity(double alpha, double omega_c, double T, const numerics::Tolerance& tol) {
  require(alpha > 0.0 && omega_c > 0.0 && T > 0.0, ErrorKind::Domain,
          "debye_heat_capacity: alpha, omega_c and T must be positive");
  const double nu = omega_c / T;
  const auto integrand = [alpha](double x) {
    const double s = std::sinh(0.5 * x);
    if (!std::isfinite(s)) return 0.0;
    return std::pow(x, 1.0 + alpha) / (4.0 * s * s);
  };
  return std::pow(T, alpha) * numerics::integrate(integrand, 0.0, nu, tol);
}

double classical_quadratic_energy(int n_dof, double T) {
  require(n_dof >= 0, ErrorKind::Domain, "classical_quadratic_energy: n_dof must be >= 0");
  return 0.5 * static_cast<double>(n_dof) * T;
}

EquipartitionReport generalized_equipartition_check(
    const std::function<double(const Eigen::VectorXd&)>& hamiltonian,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& gradient, int dim, double T,
    long n_samples, numerics::RandomStream& rng, double proposal_width) {
  require(dim >= 1 && T > 0.0 && n_samples > 0, ErrorKind::Domain,
          "equipartition check: need dim >= 1, T > 0, n_samples > 0");
  Eigen::VectorXd q = Eigen::VectorXd::Zero(dim);
  double h = hamiltonian(q);
  EquipartitionReport rep;
  rep.moments = Eigen::MatrixXd::Zero(dim, dim);
  const long burn_in = n_samples / 10;
  for (long s = 0; s < burn_in + n_samples; ++s) {
    Eigen::VectorXd trial = q;
    for (int i = 0; i < dim; ++i) trial(i) += proposal_width * rng.gaussian();
    const double h_trial = hamiltonian(trial);
    ++rep.proposed;
    if (h_trial <= h || rng.uniform() < std::exp(-(h_trial - h) / T)) {
      q = trial;
      h = h_trial;
      ++rep.accepted;
    }
    if (s >= burn_in) rep.moments += q * gradient(q).transpose();
  }
  rep.moments /= static_cast<double>(n_samples);
  rep.max_residual = (rep.moments - T * Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff();
  return rep;
}

double generalized_force(const std::function<double(double)>& lnZ_of_X, double beta, double X,
                         double rel_step) {
  require(beta > 0.0, ErrorKind::Domain, "generalized_force: beta must be positive");
  const double h = rel_step * std::max(std::abs(X), 1.0);
  const auto d = numerics::richardson_derivative(lnZ_of_X, X, h);
  const double noise_floor =
      1e3 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(lnZ_of_X(X))) / h;
  if (!std::isfinite(d.value) || d.error > 1e-3 * std::abs(d.value) + noise_floor) {
    throw Error(ErrorKind::Step, "generalized_force: finite-difference noise dominates");
  }
  return d.value / beta;
}

double generalized_force(const std::function<LevelSpectrum(double)>& spectrum_of_X,
                         const ThermoPoint& pt, double X, double rel_step) {
  return generalized_force([&](double x) { return partition(spectrum_of_X(x), pt).lnZ; }, pt.beta,
                           X, rel_step);
}

}  // namespace statmech::ensembles
