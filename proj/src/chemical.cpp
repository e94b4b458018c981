#include "statmech/chemical.hpp"

#include <algorithm>
#include <cmath>

namespace statmech::chemical {

double Species::chemical_potential(double count, double T) const {
  if (bath) return bath_mu;
  require(count >= 0.0 && T > 0.0, ErrorKind::Domain, "chemical_potential: need count >= 0, T > 0");
  return binding_energy + T * std::log(count / z1);
}

Species ideal_gas_species(std::string name, double mass, double T, double V, double internal_degeneracy,
                          double binding_energy) {
  require(mass > 0.0 && T > 0.0 && V > 0.0 && internal_degeneracy > 0.0, ErrorKind::Domain,
          "ideal_gas_species: mass, T, V and degeneracy must be positive");
  const double lambda = std::sqrt(2.0 * numerics::kPi / (mass * T));
  return {std::move(name), internal_degeneracy * V / (lambda * lambda * lambda), binding_energy};
}

void Reaction::validate() const {
  require(!species.empty(), ErrorKind::Domain, "reaction: no species");
  require(stoichiometry.size() == species.size() && counts.size() == species.size(), ErrorKind::Domain,
          "reaction: species, stoichiometry and counts differ in length");
  bool consumed = false, produced = false;
  for (std::size_t i = 0; i < species.size(); ++i) {
    require(species[i].z1 > 0.0 && std::isfinite(species[i].z1), ErrorKind::Domain,
            "reaction: Z1 must be positive for " + species[i].name);
    require(counts[i] >= 0.0, ErrorKind::Domain, "reaction: negative count for " + species[i].name);
    consumed = consumed || stoichiometry[i] < 0;
    produced = produced || stoichiometry[i] > 0;
  }
  require(consumed && produced, ErrorKind::Domain,
          "reaction: need at least one negative and one positive coefficient");
}

std::size_t Reaction::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < species.size(); ++i) {
    if (species[i].name == name) return i;
  }
  throw Error(ErrorKind::Domain, "reaction: unknown species " + name);
}

ExtentInterval feasible_extent(const Reaction& r) {
  r.validate();
  ExtentInterval iv;
  for (std::size_t i = 0; i < r.species.size(); ++i) {
    const int nu = r.stoichiometry[i];
    if (r.species[i].bath || nu == 0) continue;
    const double bound = -r.counts[i] / nu;
    if (nu > 0) {
      iv.lo = std::max(iv.lo, bound);
    } else {
      iv.hi = std::min(iv.hi, bound);
    }
  }
  if (!(iv.lo < iv.hi)) throw Error(ErrorKind::Infeasible, "reaction: no extent keeps all counts nonnegative");
  return iv;
}

double log_mass_action_constant(const Reaction& r, double T, double V) {
  r.validate();
  require(T > 0.0 && V > 0.0, ErrorKind::Domain, "mass action: T and V must be positive");
  double lk = 0.0;
  for (std::size_t i = 0; i < r.species.size(); ++i) {
    const Species& s = r.species[i];
    const int nu = r.stoichiometry[i];
    if (s.bath) {
      lk -= nu * s.bath_mu / T;
    } else {
      lk += nu * (std::log(s.z1 / V) - s.binding_energy / T);
    }
  }
  return lk;
}

Equilibrium equilibrium_coordinate(const Reaction& r, double T, double V, const numerics::Tolerance& tol) {
  const ExtentInterval iv = feasible_extent(r);
  require(T > 0.0, ErrorKind::Domain, "equilibrium_coordinate: T must be positive");
  const std::size_t k = r.species.size();
  const auto counts_at = [&](double n) {
    std::vector<double> c(k);
    for (std::size_t i = 0; i < k; ++i) c[i] = r.counts[i] + r.stoichiometry[i] * n;
    return c;
  };
  // Σνμ/T, increasing in n; ±∞ at a finite end of the feasible interval.
  const auto affinity = [&](double n) {
    double a = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const Species& s = r.species[i];
      const int nu = r.stoichiometry[i];
      if (nu == 0) continue;
      if (s.bath) {
        a += nu * s.bath_mu / T;
        continue;
      }
      const double count = std::max(r.counts[i] + nu * n, 0.0);
      a += nu * (s.binding_energy / T + std::log(count / s.z1));
    }
    return a;
  };

  // Work with finite trial points strictly inside the interval.
  const double width = std::isfinite(iv.lo) && std::isfinite(iv.hi) ? iv.hi - iv.lo : 1.0;
  const double mid = std::isfinite(iv.lo) && std::isfinite(iv.hi) ? 0.5 * (iv.lo + iv.hi)
                     : std::isfinite(iv.lo)                        ? iv.lo + 1.0
                     : std::isfinite(iv.hi)                        ? iv.hi - 1.0
                                                                   : 0.0;
  double lo = mid, hi = mid;
  double step = 0.25 * width;
  for (int i = 0; affinity(lo) > 0.0; ++i) {
    require(i < 2000, ErrorKind::NoBracket, "equilibrium_coordinate: cannot bracket from below");
    if (std::isfinite(iv.lo)) {
      lo = iv.lo + 0.5 * (lo - iv.lo);
    } else {
      lo -= step;
      step *= 2.0;
    }
  }
  step = 0.25 * width;
  for (int i = 0; affinity(hi) < 0.0; ++i) {
    require(i < 2000, ErrorKind::NoBracket, "equilibrium_coordinate: cannot bracket from above");
    if (std::isfinite(iv.hi)) {
      hi = iv.hi - 0.5 * (iv.hi - hi);
    } else {
      hi += step;
      step *= 2.0;
    }
  }

  Equilibrium eq;
  eq.extent = lo == hi ? lo : numerics::find_root(affinity, lo, hi, tol);
  eq.counts = counts_at(eq.extent);
  eq.affinity = T * affinity(eq.extent);
  eq.log_kappa = log_mass_action_constant(r, T, V);
  double rounded = std::round(eq.extent);
  rounded = std::clamp(rounded, std::ceil(iv.lo), std::floor(iv.hi));
  eq.rounded_extent = static_cast<long>(rounded);
  eq.rounded_counts = counts_at(rounded);
  for (std::size_t i = 0; i < k; ++i) {
    if (r.species[i].bath) {
      eq.counts[i] = r.counts[i];
      eq.rounded_counts[i] = r.counts[i];
    }
  }
  return eq;
}

PairCreation pair_creation_density(double mass, double T, double V) {
  require(mass > 0.0 && T >= 0.0 && V > 0.0, ErrorKind::Domain,
          "pair_creation_density: mass and V must be positive, T >= 0");
  if (T == 0.0) return {};
  const double lambda = std::sqrt(2.0 * numerics::kPi / (mass * T));
  const double modes = V / (lambda * lambda * lambda);
  PairCreation p;
  p.each = modes * std::exp(-mass / T);
  p.product = p.each * p.each;
  return p;
}

double site_occupation(SiteKind kind, double sites, double energy, double mu, double T) {
  require(sites > 0.0 && T > 0.0, ErrorKind::Domain, "site_occupation: sites and T must be positive");
  const double x = (energy - mu) / T;
  switch (kind) {
    case SiteKind::Fermi:
      return x > 0.0 ? sites * std::exp(-x) / (1.0 + std::exp(-x)) : sites / (1.0 + std::exp(x));
    case SiteKind::Bose:
      require(x > 0.0, ErrorKind::Domain, "site_occupation: Bose sites need energy > mu");
      return (sites - 1.0) / std::expm1(x);
    case SiteKind::Boltzmann:
      return sites * std::exp(-x);
  }
  return 0.0;
}

double site_mu(SiteKind kind, double sites, double n, double energy, double T) {
  require(sites > 0.0 && T > 0.0 && n > 0.0, ErrorKind::Domain, "site_mu: sites, n and T must be positive");
  switch (kind) {
    case SiteKind::Fermi:
      require(n < sites, ErrorKind::Domain, "site_mu: Fermi sites need n < M");
      return energy + T * std::log(n / (sites - n));
    case SiteKind::Bose:
      return energy + T * std::log(n / (sites - 1.0 + n));
    case SiteKind::Boltzmann:
      return energy + T * std::log(n / sites);
  }
  return 0.0;
}

}  // namespace statmech::chemical
