#pragma once

#include <string>
#include <vector>

#include "statmech/numerics.hpp"

// Chemical equilibrium of ideal (Boltzmann/Gibbs) species.
namespace statmech::chemical {

struct Species {
  std::string name;
  /// Single-particle partition function without the binding factor,
  /// typically g0·V/λ³ (so it carries the volume).
  double z1 = 1.0;
  double binding_energy = 0.0;
  /// A bath species keeps a fixed chemical potential and its count is not tracked.
  bool bath = false;
  double bath_mu = 0.0;

  /// Boltzmann chemical potential ε₀ + T ln(N/Z₁).
  double chemical_potential(double count, double T) const;
};

/// Ideal-gas species with Z₁ = g0·V/λ_T³, λ_T = (2π/(mT))^{1/2}.
Species ideal_gas_species(std::string name, double mass, double T, double V,
                          double internal_degeneracy = 1.0, double binding_energy = 0.0);

/// Σ νᵢ Xᵢ ⇌ 0 written with signed coefficients: negative on the consumed side.
/// Counts of species i follow Nᵢ(n) = Nᵢ⁰ + νᵢ n.
struct Reaction {
  std::vector<Species> species;
  std::vector<int> stoichiometry;
  std::vector<double> counts;

  void validate() const;
  std::size_t index_of(const std::string& name) const;
};

struct ExtentInterval {
  double lo = -numerics::kInf;
  double hi = numerics::kInf;
};

/// Values of the reaction coordinate keeping every tracked count nonnegative.
/// Throws Infeasible when the interval is empty.
ExtentInterval feasible_extent(const Reaction& r);

struct Equilibrium {
  double extent = 0.0;              ///< n̄, continuous
  std::vector<double> counts;       ///< Nᵢ(n̄)
  long rounded_extent = 0;          ///< nearest feasible integer coordinate
  std::vector<double> rounded_counts;
  double log_kappa = 0.0;           ///< ln κ(T), from the species data
  double affinity = 0.0;            ///< Σνμ at n̄
};

/// Solves Σᵢ νᵢ μᵢ(Nᵢ(n̄)) = 0 for the most probable reaction coordinate.
Equilibrium equilibrium_coordinate(const Reaction& r, double T, double V,
                                   const numerics::Tolerance& tol = {0.0, 1e-14, 10'000});

/// ln κ(T) with κ = Π (Z₁ e^{−βε₀}/V)^ν · e^{−βΣ_bath ν μ}; the mass-action law
/// reads Π (Nᵢ/V)^{νᵢ} = κ over the tracked species.
double log_mass_action_constant(const Reaction& r, double T, double V);

struct PairCreation {
  double product = 0.0;  ///< n₁n₂
  double each = 0.0;     ///< n₁ = n₂
};

/// Thermal pair creation with rest energy m (c = 1): n₁n₂ = (V/λ³)² e^{−2m/T}.
PairCreation pair_creation_density(double mass, double T, double V);

enum class SiteKind { Fermi, Bose, Boltzmann };

/// Mean occupation of M equivalent sites of binding energy ε at chemical potential μ.
double site_occupation(SiteKind kind, double sites, double energy, double mu, double T);

/// Inverse of site_occupation at occupation n.
double site_mu(SiteKind kind, double sites, double n, double energy, double T);

}  // namespace statmech::chemical
