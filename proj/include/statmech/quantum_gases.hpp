#pragma once

#include <functional>

#include "statmech/ensembles.hpp"
#include "statmech/numerics.hpp"

// Ideal quantum gases with a power-law density of states g(ε) = cVε^{α−1}.
namespace statmech::quantum_gases {

using ensembles::PowerLawDos;

enum class GasKind { Bose, Fermi, Boltzmann };

/// Li_s(z) = Σ z^ℓ/ℓ^s for real z ≤ 1. Throws DomainError for z > 1, and
/// for z = 1 with s ≤ 1 (divergent).
double polylog(double s, double z);

/// −Li_s(−eˣ) for any real x: the complete Fermi-Dirac integral divided by Γ(s).
double fermi_polylog(double s, double x);

/// F_α(z) = ∫₀^∞ x^{α−1}/(z⁻¹eˣ ∓ 1) dx, together with the two routes used to
/// compute it. For Bose/Fermi `value` is the closed form ±Γ(α)Li_α(±z) and
/// `quadrature` the direct integral; they are required to agree to 1e-8.
struct FIntegral {
  double value = 0.0;
  double closed_form = 0.0;
  double quadrature = 0.0;
};
FIntegral f_integral(double alpha, double z, GasKind kind);

/// Same integral parametrised by ln z, which keeps the Fermi branch usable
/// deep in the degenerate regime where z itself overflows.
double f_integral_log(double alpha, double log_z, GasKind kind);

struct GasState {
  double n = 0.0;  ///< number density N/V (condensate included)
  double e = 0.0;  ///< energy density E/V
  double P = 0.0;
  double mu = 0.0;
  double z = 0.0;
  double condensate_fraction = 0.0;
};

/// Grand-canonical densities at temperature T and chemical potential mu.
/// For Bose gases mu must be ≤ 0; mu = 0 gives the saturated thermal cloud
/// (α > 1) with no condensate bookkeeping.
GasState state_equations(const PowerLawDos& dos, double T, double mu, GasKind kind);

/// Finds μ such that the gas holds number density n at temperature T. For a
/// Bose gas with α > 1 below Tc the condensed branch is returned: μ = 0 and
/// condensate_fraction = 1 − (T/Tc)^α.
GasState invert_mu(const PowerLawDos& dos, GasKind kind, double n, double T,
                   const numerics::Tolerance& tol = {});

/// Bose condensation temperature (n/(cΓ(α)ζ(α)))^{1/α}; NoCondensation for α ≤ 1.
double bec_tc(const PowerLawDos& dos, double n);

/// Fermi energy (αn/c)^{1/α}.
double fermi_energy(const PowerLawDos& dos, double n);

/// Thermal de Broglie wavelength (2π/(mT))^{1/2} with ħ = 1.
double thermal_wavelength(double mass, double T);

/// Power-law DOS of a non-relativistic particle in 3D with the given spin
/// degeneracy: c = g_s (2m)^{3/2}/(4π²), α = 3/2.
PowerLawDos dos_3d(double mass, double spin_degeneracy = 1.0, double volume = 1.0);

struct SommerfeldResult {
  double fermi_energy = 0.0;
  double mu_expansion = 0.0;
  double mu_exact = 0.0;
  double e_expansion = 0.0;  ///< energy density
  double e_exact = 0.0;
  double P_expansion = 0.0;
  double P_exact = 0.0;
  bool expansion_valid = true;  ///< T/ε_F < 0.3
};

/// Second-order low-temperature expansion of a Fermi gas at fixed density,
/// alongside the exact values from direct quadrature of the occupation integrals.
SommerfeldResult sommerfeld(const PowerLawDos& dos, double n, double T,
                            const numerics::Tolerance& tol = {0.0, 1e-13, 4'000'000});

/// The same for a general single-particle density of states per volume g(ε),
/// zero below ε = 0, with its derivative supplied. Pressure is not defined for
/// a general g and is left at zero.
SommerfeldResult sommerfeld_general(const std::function<double(double)>& g,
                                    const std::function<double(double)>& dg, double n, double T,
                                    const numerics::Tolerance& tol = {0.0, 1e-13, 4'000'000});

struct Blackbody {
  double temperature = 0.0;
  double light_speed = 1.0;
  double sigma_eff = 0.0;      ///< total flux / T⁴
  double total_flux = 0.0;     ///< emitted energy flux
  double peak_nu = 0.0;        ///< ω*/T of the spectral flux maximum
  double peak_omega = 0.0;
  double photon_density = 0.0;
  double energy_density = 0.0;
  double pressure = 0.0;       ///< (1/3) E/V
  double planck_integral = 0.0;  ///< ∫ν³/(e^ν−1) dν by quadrature
  std::function<double(double)> spectral_flux;  ///< J(ω)
};

/// Planck radiation with absorption coefficient a(ω) (emissivity).
Blackbody blackbody(double T, const numerics::Tolerance& tol = {},
                    std::function<double(double)> absorption = {}, double light_speed = 1.0);

struct IncidentFlux {
  double J = 0.0;  ///< particles per unit area per unit time
  double P = 0.0;  ///< momentum transfer per unit area per unit time
};

/// Mono-speed gas: J = n v/4, P = n m v²/3.
IncidentFlux incident_flux(double n, double speed, double mass = 1.0);

/// Speed-distributed gas; `density_per_speed` integrates to the number density.
IncidentFlux incident_flux(const std::function<double(double)>& density_per_speed, double mass = 1.0,
                           const numerics::Tolerance& tol = {});

}  // namespace statmech::quantum_gases
