#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "statmech/master_eq.hpp"

// Equilibrium fluctuations and linear response of finite quantum systems.
namespace statmech::response {

using Matrix = Eigen::MatrixXcd;
using master_eq::Eigenbasis;

struct Preparation {
  enum class Kind { Canonical, Microcanonical, Custom };
  Kind kind = Kind::Canonical;
  double temperature = 1.0;
  double energy = 0.0;        ///< microcanonical centre
  double width = 0.0;         ///< microcanonical Gaussian window; 0 uses the broadening
  Eigen::VectorXd weights;    ///< custom occupations, normalised on use

  static Preparation canonical(double T);
  static Preparation microcanonical(double E, double width = 0.0);
  static Preparation custom(Eigen::VectorXd p);
};

struct PreparedSystem {
  Eigenbasis basis;
  Eigen::VectorXd occupation;  ///< pₙ, sums to one
  double broadening = 0.0;     ///< Gaussian width standing in for δ(ω)
  double mean_spacing = 0.0;
  double temperature = 0.0;    ///< canonical only, otherwise NaN

  /// Broadening at least twice the mean level spacing.
  bool smooth() const { return broadening >= 2.0 * mean_spacing; }
};

/// broadening = 0 picks five mean level spacings.
PreparedSystem prepare(const Matrix& H, const Preparation& prep, double broadening = 0.0);

struct SpectralTriple {
  std::vector<double> frequency;
  std::vector<std::complex<double>> power;      ///< S̃(ω), non-symmetrised
  std::vector<std::complex<double>> symmetric;  ///< C̃(ω) = ½[S̃^{AB}(ω) + S̃^{BA}(−ω)]
  std::vector<std::complex<double>> response;   ///< K̃(ω) = i[S̃^{AB}(ω) − S̃^{BA}(−ω)]
  bool smooth = true;
};

struct SpectralOptions {
  long points = 801;               ///< odd, so ω = 0 is on the grid
  double range = 0.0;              ///< half width; 0 uses 1.2 × spectral range of H
  bool include_diagonal = true;    ///< keep n = m terms (the static part at ω = 0)
};

/// Spectral decomposition of the fluctuations of A (and B), with K̃ and C̃
/// summed from their own occupation weights rather than from S̃.
class Spectrum {
 public:
  Spectrum(const PreparedSystem& sys, const Matrix& A, const Matrix& B, bool include_diagonal = true);
  Spectrum(const PreparedSystem& sys, const Matrix& A, bool include_diagonal = true)
      : Spectrum(sys, A, A, include_diagonal) {}

  std::complex<double> power(double omega) const;
  std::complex<double> symmetric(double omega) const;
  std::complex<double> response(double omega) const;
  /// η(ω) = K̃(ω)/(2iω), with the ω → 0 limit taken symmetrically.
  std::complex<double> dissipation(double omega) const;
  /// K(τ) = ∫ K̃(ω) e^{−iωτ} dω/2π.
  std::complex<double> response_kernel(double tau) const;

  SpectralTriple on_grid(const SpectralOptions& opts = {}) const;
  double spectral_range() const { return range_; }

 private:
  struct Line {
    double omega;  ///< E_m − Eₙ
    std::complex<double> s, c, k;
  };
  std::vector<Line> lines_;
  double sigma_ = 0.0;
  double range_ = 0.0;
  bool smooth_ = true;

  template <class Pick>
  std::complex<double> sum(double omega, Pick pick) const;
};

SpectralTriple spectral_functions(const PreparedSystem& sys, const Matrix& A, const SpectralOptions& opts = {});
SpectralTriple spectral_functions(const PreparedSystem& sys, const Matrix& A, const Matrix& B,
                                  const SpectralOptions& opts = {});

/// max |S̃(−ω) − e^{−ω/T} S̃(ω)| / |S̃(ω)| over ω where both exceed `floor` × max S̃.
double detailed_balance_residual(const SpectralTriple& s, double T, double floor = 1e-3);

struct KuboResult {
  std::vector<double> frequency;
  std::vector<std::complex<double>> susceptibility;  ///< χ(ω)
  std::vector<double> dissipation;                   ///< Im χ/ω via K̃/(2iω)
  std::vector<double> dissipation_fgr;               ///< [S̃(ω) − S̃(−ω)]/(2ω)
  bool truncated = false;                            ///< K̃ not small at the grid edges
};

/// χ(ω) = ∫ iK̃(ω′)/(ω − ω′ + i0) dω′/2π by principal value with the pole subtracted.
/// The grid must be uniform, symmetric about zero and hold at least 9 points.
KuboResult kubo_susceptibility(const SpectralTriple& s);

struct FluctuationDissipation {
  double friction = 0.0;     ///< η at ω → 0 from K̃
  double intensity = 0.0;    ///< ν_T = C̃(0)
  double temperature = 0.0;
  double ratio = 0.0;        ///< 2Tη/ν_T
};

/// Canonical DC check on the fluctuations of F with its diagonal (static) part dropped.
FluctuationDissipation fd_check(const PreparedSystem& sys, const Matrix& F);

/// η(E) = ½ (1/g) d/dE[g ν_E] by finite differences on a nonuniform grid.
std::vector<double> microcanonical_friction(const std::vector<double>& energies, const std::vector<double>& dos,
                                            const std::vector<double>& intensity);

struct ResponseMatrix {
  Eigen::MatrixXd friction;   ///< ηᵏʲ, symmetric
  Eigen::MatrixXd curvature;  ///< Bᵏʲ, antisymmetric
};

/// Low-frequency response to several generalised forces Fᵏ = −∂H/∂Xₖ.
ResponseMatrix response_matrix(const PreparedSystem& sys, const std::vector<Matrix>& forces);

/// Bᵏʲₙ = Σ_{m≠n} 2 Im[Fᵏ_{nm}Fʲ_{mn}]/(E_m − Eₙ)² with Fᵏ from central differences of H(X).
/// Throws Degeneracy when level n is degenerate at X₀.
Eigen::MatrixXd adiabatic_curvature(const std::function<Matrix(const Eigen::VectorXd&)>& H, long level,
                                    const Eigen::VectorXd& x0, double step = 1e-5);

// ---------------------------------------------------------------------------
// Closed forms (e = ħ = 1, conductance in units of e²/2πħ)

/// G = M·ℓ/L.
double drude_conductance(double open_modes, double mean_free_path, double length);
/// ℓ/L = g/(1 − g) for a ring with one stochastic scatterer of transmission g.
double scatterer_ring(double transmission);
/// Σ_{|n|≤terms} (2g − 1)^{|n|}, which tends to ℓ/L.
double scatterer_correlation_sum(double transmission, long terms);
/// ⟨v(t)v(0)⟩ = v² e^{−|t|/t_ℓ}, the dimensional prefactor taken as one.
double drude_velocity_correlation(double speed, double scattering_time, double t);
/// 1/t_ℓ = 2π ϱ |U|².
double fgr_scattering_rate(double density_of_states, double coupling_squared);

/// η = ρ v_T 𝖠.
double wall_friction(double mass_density, double thermal_speed, double area);
/// ν_T = m² v_T³ (N/V) 𝖠 with v_T = √(2T/m).
double wall_noise_intensity(double mass, double temperature, double number_density, double area);

struct ForcedOscillator {
  double mass = 1.0;
  double friction = 0.1;
  double frequency = 1.0;  ///< Ω; zero gives a free Brownian particle
  double temperature = 1.0;
  bool classical = false;  ///< replace coth(ω/2T) by 2T/ω

  std::complex<double> susceptibility(double omega) const;
  /// C̃_xx(ω) = coth(ω/2T) Im χ(ω).
  double position_spectrum(double omega) const;
  /// C̃_vv(ω) = ω² C̃_xx(ω).
  double velocity_spectrum(double omega) const;
};

/// S̃^{[N]}(ω) = (ω/Δ)/(1 − e^{−ω/T}) · C̃_{E_F}(ω); T = 0 keeps only ω > 0.
double fermion_many_body_noise(double single_particle, double spacing, double T, double omega);
std::vector<double> fermion_many_body_noise(const std::function<double(double)>& single_particle, double spacing,
                                            double T, const std::vector<double>& omega);

}  // namespace statmech::response
