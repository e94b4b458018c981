#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "statmech/numerics.hpp"

// Canonical-ensemble engine. Units: hbar = k_B = 1, temperatures are energies.
namespace statmech::ensembles {

struct Level {
  double energy = 0.0;
  double degeneracy = 1.0;
};

class LevelSpectrum {
 public:
  explicit LevelSpectrum(std::vector<Level> levels, std::string label = {});

  /// Non-degenerate spectrum from bare energies.
  static LevelSpectrum from_energies(const std::vector<double>& energies, std::string label = {});

  const std::vector<Level>& levels() const { return levels_; }
  const std::string& label() const { return label_; }
  double min_energy() const;
  double max_energy() const;
  /// Total number of states, Σ g_r.
  double state_count() const;

 private:
  std::vector<Level> levels_;
  std::string label_;
};

/// Reads the `energy,degeneracy` CSV format. Blank lines and lines starting
/// with '#' are skipped.
LevelSpectrum read_spectrum_csv(std::istream& in);

/// Density of one-particle states g(ε) = c·V·ε^{α−1}, ε ≥ 0.
struct PowerLawDos {
  double c = 1.0;
  double alpha = 1.5;
  double volume = 1.0;

  void validate() const;
  double density(double eps) const;
  /// Number of states below E: c·V·E^α/α.
  double counting(double energy) const;
};

struct ThermoPoint {
  double beta = 1.0;
  std::vector<double> params;

  double temperature() const { return 1.0 / beta; }
  static ThermoPoint at_temperature(double T) { return ThermoPoint{1.0 / T, {}}; }
};

struct ThermoObservables {
  double lnZ = 0.0;
  double F = 0.0;     ///< free energy −T ln Z
  double E = 0.0;     ///< mean energy
  double S = 0.0;     ///< entropy βE + ln Z
  double C = 0.0;     ///< heat capacity dE/dT
  double VarE = 0.0;  ///< energy variance T²C
};

/// Canonical sums over a discrete spectrum. Energies are shifted by the
/// ground-state energy before exponentiation; E and C come from weighted
/// moments, not from differentiating ln Z.
ThermoObservables partition(const LevelSpectrum& spec, const ThermoPoint& pt);

/// Canonical occupation probabilities p_r (per level, degeneracy included).
std::vector<double> probabilities(const LevelSpectrum& spec, const ThermoPoint& pt);

/// Harmonic oscillator with zero-point energy, Z = 1/(2 sinh(βω/2)).
ThermoObservables oscillator_observables(double omega, const ThermoPoint& pt);
/// Two-level "spin" with levels {0, ω}, Z = 1 + e^{−βω}.
ThermoObservables spin_observables(double omega, const ThermoPoint& pt);

enum class Statistics { Fermi, Bose };

struct OccupationStats {
  double mean = 0.0;
  double variance = 0.0;
  double g2 = 0.0;
};

/// Occupation of a single mode at x = βω: ⟨n⟩ = 1/(eˣ ± 1),
/// Var n = (1 ∓ ⟨n⟩)⟨n⟩ and g2 = (⟨n²⟩ − ⟨n⟩)/⟨n⟩².
OccupationStats occupation_stats(Statistics kind, double x);

/// Debye-type heat capacity T^α F(ωc/T) with
/// F(ν) = ∫₀^ν eˣ x^{1+α}/(eˣ−1)² dx, in units of the mode-density constant.
double debye_heat_capacity(double alpha, double omega_c, double T, const numerics::Tolerance& tol = {});

/// (n_dof/2)·T.
double classical_quadratic_energy(int n_dof, double T);

struct EquipartitionReport {
  Eigen::MatrixXd moments;  ///< ⟨q_i ∂H/∂q_j⟩
  double max_residual = 0.0;
  long accepted = 0;
  long proposed = 0;
};

/// Samples exp(−H/T) with random-walk Metropolis and compares
/// ⟨q_i ∂H/∂q_j⟩ against T δ_ij.
EquipartitionReport generalized_equipartition_check(
    const std::function<double(const Eigen::VectorXd&)>& hamiltonian,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& gradient, int dim, double T,
    long n_samples, numerics::RandomStream& rng, double proposal_width = 1.0);

/// y = (1/β) ∂ ln Z/∂X by Richardson-extrapolated central differences.
/// Throws StepError when the difference estimate is dominated by noise.
double generalized_force(const std::function<double(double)>& lnZ_of_X, double beta, double X,
                         double rel_step = 1e-3);

/// Same, for a spectrum that depends on the parameter.
double generalized_force(const std::function<LevelSpectrum(double)>& spectrum_of_X,
                         const ThermoPoint& pt, double X, double rel_step = 1e-3);

}  // namespace statmech::ensembles
