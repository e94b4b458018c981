#pragma once

#include <array>
#include <complex>
#include <functional>
#include <vector>

#include "statmech/numerics.hpp"

// Ising model solvers and Landau-Ginzburg field-theory numerics.
// Energy of a configuration: E = −ε Σ_bonds σσ′ − h Σ σ.
namespace statmech::ising {

struct IsingParams {
  double eps = 1.0;   ///< coupling
  double h = 0.0;     ///< field
  double T = 1.0;
  int coordination = 4;  ///< mean-field neighbour count c
  int sites = 0;         ///< for finite-N operations

  void validate() const;
};

// ---------------------------------------------------------------------------
// 1D chain

struct TransferMatrix1D {
  double eps_tilde = 0.0;  ///< βε
  double h_tilde = 0.0;    ///< βh

  /// Entries exp[ε̃σ′σ″ + ½h̃(σ′+σ″)], index 0 ↔ σ = +1.
  std::array<std::array<double, 2>, 2> entries() const;
  double lambda_plus() const;
  double lambda_minus() const;
};

struct Ising1D {
  double lnZ = 0.0;              ///< exact for the finite system
  double F = 0.0;                ///< −T lnZ
  double F_thermodynamic = 0.0;  ///< −N T ln λ₊
  double magnetization = 0.0;    ///< per site, thermodynamic limit
  double susceptibility = 0.0;   ///< per site, thermodynamic limit
  double correlation_length = 0.0;
  double lambda_plus = 0.0;
  double lambda_minus = 0.0;

  /// Spin-spin correlation (λ₋/λ₊)^{|r|}.
  double correlation(int r) const;
};

/// Transfer-matrix solution of an N-site chain, closed into a ring or open.
Ising1D ising1d_solve(const IsingParams& p, int n_sites, bool ring);

/// lnZ by summing all 2^N configurations.
double ising1d_enumerate(const IsingParams& p, int n_sites, bool ring);

// ---------------------------------------------------------------------------
// 2D square lattice, zero field

struct Onsager {
  double lnZ_per_site = 0.0;
  double kappa = 0.0;  ///< 2 sinh(2ε̃)/cosh²(2ε̃)
};

/// The inner angular integral is done in closed form,
/// ∫dθ′/2π ln(A + s cos θ′) = ln((A + √(A² − s²))/2), and the outer one adaptively.
Onsager onsager2d(double eps_tilde, const numerics::Tolerance& tol = {1e-15, 1e-14, 1'000'000});

/// Same free energy by nested adaptive quadrature over both angles.
Onsager onsager2d_tensor(double eps_tilde, const numerics::Tolerance& tol = {1e-12, 1e-10, 4'000'000});

struct OnsagerCritical {
  double eps_tilde = 0.0;  ///< root of sinh(2ε̃) = 1
  double Tc_over_eps = 0.0;
};
OnsagerCritical onsager2d_tc();

/// Heat capacity per site ε̃² ∂²(lnZ/N)/∂ε̃² by central differences.
double onsager2d_heat_capacity(double eps_tilde, double step = 1e-4);

/// Location of the heat-capacity maximum on a grid of the given spacing.
double onsager2d_heat_capacity_peak(double lo, double hi, double spacing = 1e-4, double step = 1e-4);

// ---------------------------------------------------------------------------
// Mean field

struct MeanField {
  std::vector<double> solutions;  ///< all self-consistent ⟨σ⟩, ascending
  std::vector<double> minima;     ///< degenerate free-energy minima (two at h = 0 below Tc)
  double magnetization = 0.0;     ///< selected branch: sign of h, +0 at h = 0
  bool symmetry_broken = false;
  double Tc = 0.0;
  double energy = 0.0;            ///< per site, −½cε⟨σ⟩² − h⟨σ⟩
  double heat_capacity = 0.0;     ///< per site
  double susceptibility = 0.0;    ///< ∂⟨σ⟩/∂h on the selected branch
};

/// ⟨σ⟩ = tanh((h + cε⟨σ⟩)/T).
MeanField mean_field_magnetization(const IsingParams& p);

/// Mean-field free energy per site ½cεm² − T ln(2 cosh((h + cεm)/T)).
double mean_field_free_energy(double m, const IsingParams& p);

struct Antiferro {
  double Ma = 0.0, Mb = 0.0;
  double M = 0.0;   ///< (Ma + Mb)/2
  double Ms = 0.0;  ///< (Ma − Mb)/2, chosen ≥ 0
  double susceptibility = 0.0;
  double Tc = 0.0;
};

/// Two-sublattice equations Ma = tanh((h − Tc Mb)/T), Mb = tanh((h − Tc Ma)/T)
/// with Tc = cε.
Antiferro antiferro_mean_field(const IsingParams& p);

/// Quartic landscape per site, in units of T: ½(1 − βcε)M² + M⁴/12 − βhM.
double bragg_williams_action(double M, const IsingParams& p);

/// Variational free energy per site with the exact mixing entropy, without the −hM term.
double variational_free_energy(double M, const IsingParams& p);

/// Global minimiser of the quartic form, or of variational_free_energy − hM when `exact`.
double bragg_williams_minimizer(const IsingParams& p, bool exact);

// ---------------------------------------------------------------------------
// Lee-Yang zeros

enum class Geometry { Chain, Ring, Complete };

struct LeeYang {
  /// Coefficients of Σ_k Z_k z^k (k = number of up spins), divided by
  /// exp(log_scale); z = e^{2βh}.
  std::vector<double> coefficients;
  double log_scale = 0.0;
  std::vector<std::complex<double>> roots;
  std::vector<double> moduli;
  int sites = 0;
  double beta = 1.0;

  /// ln Z at field h, from the polynomial.
  double lnZ(double h) const;
};

LeeYang lee_yang_zeros(int n_sites, double beta_eps, Geometry geometry, double beta = 1.0);

// ---------------------------------------------------------------------------
// Field theory

/// g̃(q) = 1/(q² + ξ⁻²); pass ξ = ∞ for the critical point.
double ornstein_zernike(double q, double xi);

/// Real-space correlation in d dimensions,
/// (2π)^{−d/2} (ξ r)^{1−d/2} K_{d/2−1}(r/ξ), or Γ(d/2−1)/(4π^{d/2} r^{d−2}) at ξ = ∞.
double ornstein_zernike_real(double r, double xi, int d);

/// Numerical inverse Fourier transform of g̃ in three dimensions.
double ornstein_zernike_inverse_3d(double r, double xi, const numerics::Tolerance& tol = {1e-14, 1e-10, 1'000'000});

/// ∫₀^Λ k^{d−1} dk/(k² + r)², the Gaussian-fluctuation heat-capacity integral.
double gaussian_fluctuation_integral(double r, double d, double cutoff);

struct RgPoint {
  double r = 0.0;    ///< dimensionless mass r/Λ²
  double u = 0.0;    ///< dimensionless quartic coupling u/Λ^{4−d}
  double d = 3.0;
  double tau = 0.0;  ///< ln s
};

/// dr/dτ = 2r − 3ru + 3u, du/dτ = (4 − d)u − 9u².
std::array<double, 2> rg_beta(double r, double u, double d);

/// Flow sampled every `step` from start.tau to tau_end.
std::vector<RgPoint> rg_flow(const RgPoint& start, double tau_end, double step);

struct FixedPoint {
  double r = 0.0;
  double u = 0.0;
  std::array<double, 2> eigenvalues{};  ///< of the linearised flow, descending
  std::array<std::array<double, 2>, 2> eigenvectors{};  ///< columns match eigenvalues
  int relevant_directions = 0;  ///< positive eigenvalues
};

struct RgFixedPoints {
  FixedPoint gaussian;
  FixedPoint nontrivial;  ///< exact zero of rg_beta
  /// First order in 4 − d: (−(4−d)/6, (4−d)/9).
  double r_leading_order = 0.0;
  double u_leading_order = 0.0;
};

RgFixedPoints rg_fixed_points(double d);

struct CriticalExponents {
  double nu = 0.0, eta = 0.0, alpha = 0.0, beta = 0.0, gamma = 0.0, delta = 0.0;
};

enum class DeltaForm {
  Consistent,  ///< (d + 2 − η)/(d − 2 + η)
  AsPrinted    ///< (d + 2 + η)/(d − 2 + η)
};

CriticalExponents exponents_from_scaling(double nu, double eta, double d,
                                         DeltaForm form = DeltaForm::Consistent);

/// ν from the relevant eigenvalue at the nontrivial fixed point, η = 0.
CriticalExponents rg_exponents(double d);

}  // namespace statmech::ising
