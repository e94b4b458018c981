#pragma once

#include <functional>
#include <vector>

#include "statmech/numerics.hpp"

// Cluster and virial expansions of weakly interacting gases in three dimensions.
namespace statmech::interactions {

struct PairPotential {
  std::function<double(double)> u;  ///< energy at separation r, r ≥ hard_core_radius
  double hard_core_radius = 0.0;    ///< u = +∞ below this separation
  double range = numerics::kInf;    ///< u vanishes beyond this separation
  double tail_scale = 1.0;          ///< decay length hint for the tail quadrature
  std::vector<double> breakpoints;  ///< separations where u is discontinuous

  double operator()(double r) const;
  /// Mayer function e^{−u/T} − 1.
  double mayer(double r, double T) const;
};

/// Hard spheres of the given radius: contact at twice the radius.
PairPotential hard_sphere(double radius);

/// Hard core of the given particle radius surrounded by a well of depth `depth`
/// extending to `range_factor` times the contact distance.
PairPotential square_well(double radius, double range_factor, double depth);

/// 4ε[(σ/r)¹² − (σ/r)⁶].
PairPotential lennard_jones(double depth, double sigma);

struct SecondCluster {
  double b2 = 0.0;
  double a2 = 0.0;  ///< −b2
};

/// b₂ = ½∫f(r)4πr²dr, with the hard core taken analytically.
SecondCluster mayer_b2(const PairPotential& pot, double T,
                       const numerics::Tolerance& tol = {1e-14, 1e-12, 1'000'000});

/// B₁..Bₙ from the moments Z₁..Zₙ (n ≤ 3) and back.
std::vector<double> cumulants_from_moments(const std::vector<double>& moments);
std::vector<double> moments_from_cumulants(const std::vector<double>& cumulants);

struct ClusterCoefficients {
  std::vector<double> b;  ///< b₁..bₙ, b₁ = 1
  std::vector<double> B;  ///< B₁..Bₙ
};

/// bₙ = Bₙ λ^{3n}/(n! V).
ClusterCoefficients cluster_from_cumulants(const std::vector<double>& cumulants, double volume,
                                           double thermal_wavelength);

struct VirialSeries {
  std::vector<double> a;  ///< a₁..aₙ

  /// P = T Σ a_ℓ ρ^ℓ.
  double pressure(double density, double T) const;
};

/// a₁ = 1, a₂ = −b₂, a₃ = 4b₂² − 2b₃ from b₁..bₙ (n ≤ 3).
VirialSeries virial_coefficients(const std::vector<double>& b);

/// Ideal quantum gas bₙ = (±1)^{n+1} n^{−5/2} λ^{3(n−1)}, with + for bosons.
std::vector<double> ideal_quantum_clusters(bool bose, double thermal_wavelength, int count);

struct VanDerWaals {
  double a = 0.0;  ///< attraction constant ā
  double b = 0.0;  ///< excluded-volume constant b̄
};

/// Least-squares line a₂ = b̄ − ā/T through mayer_b2 at the given temperatures.
VanDerWaals fit_van_der_waals(const PairPotential& pot, const std::vector<double>& temperatures);

/// b̄ = 2^{d−1} times the volume of a d-ball of the particle radius.
double van_der_waals_b(double particle_radius, int d);

/// NT/(V − Nb̄) − ā(N/V)².
double van_der_waals_pressure(double N, double V, double T, const VanDerWaals& c);

// ---------------------------------------------------------------------------
// Third cluster coefficient

struct Estimate {
  double value = 0.0;
  double error = 0.0;  ///< one standard deviation
};

/// ∫∫ f(r)f(s)f(|r − s|) d³r d³s.
using TriangleEvaluator = std::function<Estimate(const PairPotential&, double T)>;

/// Monte Carlo triangle integral over two balls of radius `cutoff`, split into
/// `chunks` independent sub-streams of `stream`.
Estimate triangle_integral_mc(const PairPotential& pot, double T, double cutoff, long samples,
                              const numerics::RandomStream& stream, int chunks = 16);

/// b₃ = (1/3!)[3(2b₂)² + triangle] from the chain and triangle diagrams.
Estimate mayer_b3(const PairPotential& pot, double T, const TriangleEvaluator& triangle);

/// b₂ from two particles in a periodic cube of side L with minimum-image
/// separation. Exact in expectation when the potential range is below L/2.
Estimate configuration_b2_mc(const PairPotential& pot, double T, double box, long samples,
                             const numerics::RandomStream& stream, int chunks = 16);

// ---------------------------------------------------------------------------
// Two quantum particles

enum class Statistics { Bose, Fermi };

/// Z₂ = ½(Z₁² ± 2^{−d/2}Z₁) with Z₁ = (L/λ)^d.
double z2_identical(Statistics kind, int d, double box_over_wavelength);

/// ½[Z₁(β)² ± Z₁(2β)] for a discrete single-particle spectrum.
double z2_from_spectrum(Statistics kind, const std::vector<double>& levels, double beta);

struct PartialWave {
  int l = 0;
  std::function<double(double)> phase_shift;  ///< δ_ℓ(k), vanishing as k → ∞
};

struct InteractionShift {
  double total = 0.0;
  double bound = 0.0;       ///< bound-state part
  double scattering = 0.0;  ///< phase-shift part
};

/// Z₂ − Z₂⁽⁰⁾ = (2^{3/2}V/λ³)[Σ_b e^{−E_b/T} + (λ²/π²)Σ_ℓ(2ℓ+1)∫k δ_ℓ(k) e^{−k²/(mT)} dk],
/// with λ the single-particle thermal wavelength of mass m.
InteractionShift z2_interaction_shift(const std::vector<double>& bound_energies,
                                      const std::vector<PartialWave>& waves, Statistics kind,
                                      double T, double mass, double volume,
                                      const numerics::Tolerance& tol = {1e-14, 1e-11, 1'000'000});

/// a₂ = −(λ³)²/V · ½(Z₂ − Z₁²), with Z₂ counted without the Gibbs factor.
double a2_from_z2(double z1, double z2, double volume, double thermal_wavelength);

}  // namespace statmech::interactions
