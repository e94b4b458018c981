#pragma once

#include <array>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "statmech/stochastic.hpp"

// Markovian quantum master equations for finite-dimensional systems.
// Density matrices are vectorised column by column, vec(AρB) = (Bᵀ ⊗ A) vec(ρ).
namespace statmech::master_eq {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Hermitian to 1e-12, unit trace to 1e-12, eigenvalues ≥ −1e-10.
void validate_density(const Matrix& rho);

// ---------------------------------------------------------------------------
// Bath spectra

enum class BathKind { OhmicHarmonic, OhmicSpin, WhiteNoise, Custom };

struct BathSpectrum {
  BathKind kind = BathKind::WhiteNoise;
  double temperature = numerics::kInf;
  double cutoff = numerics::kInf;  ///< smooth factor e^{−|ω|/ω_c}
  /// η for the harmonic bath (J = ηω), ν for the spin bath (J = ν) and white noise.
  double intensity = 1.0;
  std::function<double(double)> custom;  ///< S̃(ω) for Custom

  struct Values {
    double full = 0.0;           ///< S̃(ω), the Fourier transform of ⟨F(t)F(0)⟩
    double symmetric = 0.0;      ///< ½[S̃(ω) + S̃(−ω)]
    double antisymmetric = 0.0;  ///< ½[S̃(ω) − S̃(−ω)]
  };
  Values eval(double omega) const;
  double operator()(double omega) const { return eval(omega).full; }
  /// Spectral density J(ω) with its continuation (odd for the harmonic bath).
  double spectral_density(double omega) const;
};

// ---------------------------------------------------------------------------
// Generators

struct Generator {
  Matrix L;  ///< n² × n² superoperator
  long dim = 0;

  Matrix apply(const Matrix& rho) const;
  /// Largest absolute column sum.
  double norm() const;
};

Generator hamiltonian_generator(const Matrix& H);

/// dρ/dt = −i[H,ρ] + Σ WρW† − ½{Γ,ρ}, Γ = Σ W†W.
Generator lindblad_generator(const Matrix& H, const std::vector<Matrix>& jumps);

/// dρ/dt = −i[H,ρ] − ½ν[W,[W,ρ]].
Generator white_noise_generator(const Matrix& H, const Matrix& W, double noise);

struct FokkerPlanckGenerator {
  Generator generator;
  double deviation = 0.0;           ///< ‖(η/16T)[P,[P,·]]‖ with T = ν/(2η), Frobenius
  double relative_deviation = 0.0;  ///< deviation over ‖(η/2)[X,{P,·}]‖
};

/// dρ/dt = −i[H,ρ] − (ν/2)[X,[X,ρ]] − i(η/2)[X,{P,ρ}], X = W, P = i[H,W].
/// With 0 < keep < dim the generator is projected onto operators supported on
/// the first `keep` basis states; truncated oscillators given on a few extra
/// levels then lose the spurious growing modes of the outermost level.
FokkerPlanckGenerator quantum_fokker_planck_generator(const Matrix& H, const Matrix& W, double noise,
                                                      double friction, long keep = 0);

// ---------------------------------------------------------------------------
// Propagation

struct PropagationOptions {
  double step = 0.0;  ///< 0 uses 0.01/‖L‖
  long samples = 0;   ///< extra equally spaced snapshots besides the final state
  long monitor_every = 10;
};

struct Propagation {
  std::vector<double> times;
  std::vector<Matrix> states;  ///< snapshots, the last one at the final time
  double min_eigenvalue = 0.0;
  bool positivity_warning = false;  ///< min eigenvalue below −1e-8
  double max_trace_drift = 0.0;
  double max_hermiticity_error = 0.0;
  long steps = 0;

  const Matrix& final_state() const { return states.back(); }
};

/// RK4 on the vectorised state; ρ is re-symmetrised after every step and its
/// positivity is monitored but not enforced.
Propagation propagate(const Generator& gen, const Matrix& rho0, double t, const PropagationOptions& opts = {});

Propagation lindblad_propagate(const Matrix& H, const std::vector<Matrix>& jumps, const Matrix& rho0, double t,
                               double step = 0.0);

/// Trace-one null vector of the generator, Hermitised.
Matrix generator_steady_state(const Generator& gen);

// ---------------------------------------------------------------------------
// Secular approximation and Pauli reduction

struct Eigenbasis {
  Eigen::VectorXd energies;  ///< ascending
  Matrix vectors;            ///< columns are eigenvectors
};
Eigenbasis diagonalise(const Matrix& H);

struct SecularModel {
  Generator generator;           ///< in the original basis
  Eigenbasis basis;
  std::vector<Matrix> jumps;     ///< √S̃(Ω)·A_Ω, original basis
  std::vector<double> bohr;      ///< Ω for each jump
  stochastic::RateMatrix rates;  ///< population block
  double validity = 0.0;         ///< largest rate over smallest level spacing
};

/// Lindblad generator from A_Ω = Σ |n⟩W_{nm}⟨m| over E_m − E_n = Ω, weighted by S̃(Ω).
/// Distinct level pairs sharing a nonzero Bohr frequency within
/// 1e-9·‖H‖ throw Degeneracy unless `group_degenerate` merges them.
SecularModel secular_generator(const Matrix& H, const Matrix& W, const BathSpectrum& bath,
                               bool group_degenerate = false);

struct PauliModel {
  Eigenbasis basis;
  stochastic::RateMatrix rates;  ///< w_{nm} = S̃(E_m − E_n)|W_{nm}|²
  Eigen::MatrixXd dephasing;     ///< γ_{nm} = ½(Γₙ + Γ_m) + ½S̃(0)|W_{nn} − W_{mm}|²
};

PauliModel pauli_master(const Matrix& H, const Matrix& W, const BathSpectrum& bath);

/// Populations of ρ in the energy eigenbasis.
Eigen::VectorXd populations(const Matrix& rho, const Eigenbasis& basis);

// ---------------------------------------------------------------------------
// Bloch equations

struct BlochParams {
  double splitting = 1.0;  ///< Ω
  double t1 = 1.0;
  double t2 = 1.0;
  double s_eq = 0.0;
};

enum class TransverseModel {
  Precession,       ///< Ṡ = −Ω×S − S/T₂: rotation at Ω, decay 1/T₂
  DampedOscillator  ///< S̈ + γṠ + Ω²S = 0: oscillation at √(Ω² − γ²/4)
};

struct BlochState {
  std::array<double, 3> s{};  ///< (S_x, S_y, S_z)
  bool unphysical = false;    ///< T₂ > 2T₁
};

BlochState bloch_evolve(const BlochParams& p, const std::array<double, 3>& s0, double t,
                        TransverseModel model = TransverseModel::Precession);

/// √(Ω² − (γ/2)²); zero when overdamped.
double damped_frequency(double splitting, double gamma);

/// T₁, T₂ and S_eq of a two-level Pauli model; index 1 is the upper level.
BlochParams bloch_from_pauli(const PauliModel& m);

/// Bloch vector from a two-level ρ in its energy eigenbasis: S_z = p₊ − p₋, S_x + iS_y = 2ρ₊₋.
std::array<double, 3> bloch_vector(const Matrix& rho, const Eigenbasis& basis);

}  // namespace statmech::master_eq
