#include "statmech/quantum_gases.hpp"

#include <boost/math/special_functions/zeta.hpp>
#include <cmath>
#include <limits>

namespace statmech::quantum_gases {

namespace {

using numerics::kPi;

constexpr double kSeriesRadius = 0.5;
constexpr double kSommerfeldThreshold = 40.0;
constexpr double kIntegerSnap = 1e-12;
constexpr double kCrossCheck = 1e-8;

double zeta(double s) { return boost::math::zeta(s); }

double direct_series(double s, double z) {
  double sum = 0.0, power = 1.0;
  for (int l = 1; l < 2000; ++l) {
    power *= z;
    const double term = power / std::pow(static_cast<double>(l), s);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

bool near_integer(double s) { return std::abs(s - std::round(s)) < kIntegerSnap; }

// Expansion of Li_s(e^μ) in powers of μ = ln z, valid for |μ| < 2π.
double log_series(double s, double mu) {
  double sum = 0.0;
  double power = 1.0;  // μ^k/k!
  int small_terms = 0;
  if (near_integer(s)) {
    const int n = static_cast<int>(std::round(s));
    for (int k = 0; k < 80; ++k) {
      if (k > 0) power *= mu / k;
      double term;
      if (k == n - 1) {
        if (mu == 0.0) continue;
        double harmonic = 0.0;
        for (int j = 1; j < n; ++j) harmonic += 1.0 / j;
        term = power * (harmonic - std::log(-mu));
      } else {
        term = zeta(static_cast<double>(n - k)) * power;
      }
      sum += term;
      small_terms = std::abs(term) < 1e-17 * std::abs(sum) ? small_terms + 1 : 0;
      if (small_terms >= 3 && k > n) break;
    }
    return sum;
  }
  if (mu < 0.0) sum = std::tgamma(1.0 - s) * std::pow(-mu, s - 1.0);
  for (int k = 0; k < 80; ++k) {
    if (k > 0) power *= mu / k;
    const double term = zeta(s - k) * power;
    sum += term;
    small_terms = std::abs(term) < 1e-17 * std::abs(sum) ? small_terms + 1 : 0;
    if (small_terms >= 3) break;
  }
  return sum;
}

double eta(double t) {
  if (t == 1.0) return std::log(2.0);
  return -std::expm1((1.0 - t) * std::log(2.0)) * zeta(t);
}

// −Li_s(−e^μ) = Σ η(s−k) μ^k/k!, entire for |μ| < π.
double eta_series(double s, double mu) {
  double sum = 0.0, power = 1.0;
  int small_terms = 0;
  for (int k = 0; k < 120; ++k) {
    if (k > 0) power *= mu / k;
    const double term = eta(s - k) * power;
    sum += term;
    small_terms = std::abs(term) < 1e-17 * std::abs(sum) ? small_terms + 1 : 0;
    if (small_terms >= 3) break;
  }
  return sum;
}

// Fermi factor 1/(e^y + 1) without overflow.
double fermi_factor(double y) {
  if (y > 0.0) {
    const double e = std::exp(-y);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(y));
}

// ∫₀^∞ t^{s−1}/(e^{t−x} + 1) dt, split at the Fermi step.
double fermi_quadrature(double s, double x, const numerics::Tolerance& tol) {
  const auto f = [s, x](double t) { return std::pow(t, s - 1.0) * fermi_factor(t - x); };
  double total = 0.0;
  double start = 0.0;
  if (x > 0.0) {
    total += numerics::integrate(f, 0.0, x, tol);
    start = x;
  }
  return total + numerics::integrate(f, start, numerics::kInf, tol, 1.0);
}

// ∫₀^∞ t^{s−1}/(e^{t−u} − 1) dt for u ≤ 0.
double bose_quadrature(double s, double u, const numerics::Tolerance& tol) {
  const auto f = [s, u](double t) {
    const double d = std::expm1(t - u);
    return d > 0.0 ? std::pow(t, s - 1.0) / d : 0.0;
  };
  return numerics::integrate(f, 0.0, 1.0, tol) + numerics::integrate(f, 1.0, numerics::kInf, tol, 1.0);
}

// Asymptotic series x^s/Γ(s+1)·[1 + Σ 2η(2k)·s(s−1)…(s−2k+1) x^{−2k}],
// truncated at its smallest term.
double sommerfeld_series(double s, double x) {
  double sum = 1.0;
  double falling = 1.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 200; ++k) {
    falling *= (s - (2 * k - 2)) * (s - (2 * k - 1));
    const double eta2k = (1.0 - std::pow(2.0, 1.0 - 2 * k)) * zeta(2.0 * k);
    const double term = 2.0 * eta2k * falling * std::pow(x, -2.0 * k);
    if (term == 0.0) break;
    if (std::abs(term) > prev) break;
    sum += term;
    prev = std::abs(term);
    if (prev < 1e-18 * std::abs(sum)) break;
  }
  return std::exp(s * std::log(x) - std::lgamma(s + 1.0)) * sum;
}

// Li_s(e^u) for u < 0, keeping the distance to z = 1 exact.
double bose_polylog_log(double s, double u) {
  if (u < -std::log(2.0)) return direct_series(s, std::exp(u));
  if (!near_integer(s) && std::abs(s - std::round(s)) < 1e-4) {
    return bose_quadrature(s, u, {0.0, 1e-13, 4'000'000}) / std::tgamma(s);
  }
  return log_series(s, u);
}

}  // namespace

double polylog(double s, double z) {
  require(s > 0.0, ErrorKind::Domain, "polylog: order must be positive");
  require(std::isfinite(z), ErrorKind::Domain, "polylog: non-finite argument");
  require(z <= 1.0, ErrorKind::Domain, "polylog: argument above 1 is outside the Bose branch");
  if (z == 1.0) {
    require(s > 1.0, ErrorKind::Domain, "polylog: Li_s(1) diverges for s <= 1");
    return zeta(s);
  }
  if (std::abs(z) <= kSeriesRadius) return direct_series(s, z);
  if (z > 0.0) return bose_polylog_log(s, std::log(z));
  if (z >= -1.0) return -eta_series(s, std::log(-z));
  return -fermi_polylog(s, std::log(-z));
}

double fermi_polylog(double s, double x) {
  require(s > 0.0, ErrorKind::Domain, "fermi_polylog: order must be positive");
  require(std::isfinite(x), ErrorKind::Domain, "fermi_polylog: non-finite argument");
  if (x <= 0.0) return -polylog(s, -std::exp(x));
  if (x <= 1.0) return eta_series(s, x);
  if (x >= kSommerfeldThreshold) return sommerfeld_series(s, x);
  return fermi_quadrature(s, x, {0.0, 1e-14, 4'000'000}) / std::tgamma(s);
}

double f_integral_log(double alpha, double log_z, GasKind kind) {
  require(alpha > 0.0, ErrorKind::Domain, "f_integral: alpha must be positive");
  switch (kind) {
    case GasKind::Boltzmann:
      return std::tgamma(alpha) * std::exp(log_z);
    case GasKind::Bose:
      require(log_z <= 0.0, ErrorKind::Domain, "f_integral: Bose fugacity must not exceed 1");
      if (log_z == 0.0) return std::tgamma(alpha) * polylog(alpha, 1.0);
      return std::tgamma(alpha) * bose_polylog_log(alpha, log_z);
    case GasKind::Fermi:
      return std::tgamma(alpha) * fermi_polylog(alpha, log_z);
  }
  return 0.0;
}

FIntegral f_integral(double alpha, double z, GasKind kind) {
  require(alpha > 0.0, ErrorKind::Domain, "f_integral: alpha must be positive");
  require(z >= 0.0 && std::isfinite(z), ErrorKind::Domain, "f_integral: fugacity must be >= 0");
  FIntegral out;
  if (z == 0.0) return out;
  const double u = std::log(z);
  const numerics::Tolerance tol{0.0, 1e-12, 4'000'000};
  switch (kind) {
    case GasKind::Boltzmann: {
      out.closed_form = std::tgamma(alpha) * z;
      out.quadrature = numerics::integrate(
          [alpha, u](double t) { return std::pow(t, alpha - 1.0) * std::exp(u - t); }, 0.0,
          numerics::kInf, tol, 1.0);
      break;
    }
    case GasKind::Bose:
      require(z <= 1.0, ErrorKind::Domain, "f_integral: Bose fugacity must not exceed 1");
      require(z < 1.0 || alpha > 1.0, ErrorKind::Domain, "f_integral: divergent at z = 1 for alpha <= 1");
      out.closed_form = f_integral_log(alpha, u, kind);
      out.quadrature = bose_quadrature(alpha, u, tol);
      break;
    case GasKind::Fermi:
      out.closed_form = f_integral_log(alpha, u, kind);
      out.quadrature = fermi_quadrature(alpha, u, tol);
      break;
  }
  out.value = out.closed_form;
  if (std::abs(out.closed_form - out.quadrature) > kCrossCheck * std::abs(out.closed_form)) {
    throw NonConvergenceError("f_integral: closed form and quadrature disagree", out.closed_form,
                              std::abs(out.closed_form - out.quadrature));
  }
  return out;
}

GasState state_equations(const PowerLawDos& dos, double T, double mu, GasKind kind) {
  dos.validate();
  require(T > 0.0, ErrorKind::Domain, "state_equations: T must be positive");
  require(std::isfinite(mu), ErrorKind::Domain, "state_equations: non-finite mu");
  if (kind == GasKind::Bose) {
    require(mu <= 0.0, ErrorKind::Domain, "state_equations: Bose gas requires mu <= 0");
    require(mu < 0.0 || dos.alpha > 1.0, ErrorKind::Domain,
            "state_equations: Bose density diverges at mu = 0 for alpha <= 1");
  }
  const double u = mu / T;
  GasState s;
  s.mu = mu;
  s.z = std::exp(u);
  s.n = dos.c * std::pow(T, dos.alpha) * f_integral_log(dos.alpha, u, kind);
  s.e = dos.c * std::pow(T, dos.alpha + 1.0) * f_integral_log(dos.alpha + 1.0, u, kind);
  s.P = s.e / dos.alpha;
  return s;
}

double bec_tc(const PowerLawDos& dos, double n) {
  dos.validate();
  require(n > 0.0, ErrorKind::Domain, "bec_tc: density must be positive");
  if (dos.alpha <= 1.0) {
    throw Error(ErrorKind::NoCondensation, "bec_tc: no condensation for alpha <= 1");
  }
  return std::pow(n / (dos.c * std::tgamma(dos.alpha) * zeta(dos.alpha)), 1.0 / dos.alpha);
}

double fermi_energy(const PowerLawDos& dos, double n) {
  dos.validate();
  require(n >= 0.0, ErrorKind::Domain, "fermi_energy: density must be >= 0");
  return std::pow(dos.alpha * n / dos.c, 1.0 / dos.alpha);
}

double thermal_wavelength(double mass, double T) {
  require(mass > 0.0 && T > 0.0, ErrorKind::Domain, "thermal_wavelength: mass and T must be positive");
  return std::sqrt(2.0 * kPi / (mass * T));
}

PowerLawDos dos_3d(double mass, double spin_degeneracy, double volume) {
  require(mass > 0.0 && spin_degeneracy > 0.0, ErrorKind::Domain, "dos_3d: mass and degeneracy must be positive");
  PowerLawDos d{spin_degeneracy * std::pow(2.0 * mass, 1.5) / (4.0 * kPi * kPi), 1.5, volume};
  d.validate();
  return d;
}

GasState invert_mu(const PowerLawDos& dos, GasKind kind, double n, double T,
                   const numerics::Tolerance& tol) {
  dos.validate();
  require(n > 0.0 && T > 0.0, ErrorKind::Domain, "invert_mu: density and T must be positive");
  const double scale = dos.c * std::pow(T, dos.alpha);
  const double boltzmann_u = std::log(n / (scale * std::tgamma(dos.alpha)));
  if (kind == GasKind::Boltzmann) return state_equations(dos, T, T * boltzmann_u, kind);

  const auto excess = [&](double u) { return scale * f_integral_log(dos.alpha, u, kind) - n; };
  const numerics::Tolerance root_tol{std::max(tol.abs, 1e-300), std::min(tol.rel, 1e-14), tol.max_evals};
  double u = 0.0;
  if (kind == GasKind::Bose) {
    if (dos.alpha > 1.0) {
      const double saturated = scale * std::tgamma(dos.alpha) * zeta(dos.alpha);
      if (n >= saturated) {
        GasState s = state_equations(dos, T, 0.0, kind);
        s.condensate_fraction = 1.0 - saturated / n;
        s.n = n;
        return s;
      }
    }
    // Li_α(z) ≥ z, so the Boltzmann estimate is an upper bound on the root.
    double hi = std::min(boltzmann_u, -1e-3);
    for (int i = 0; excess(hi) < 0.0; ++i) {
      require(i < 100, ErrorKind::NoBracket, "invert_mu: cannot bracket Bose root");
      hi *= 1e-3;
    }
    double lo = std::min(boltzmann_u, hi) - 1.0;
    for (int i = 0; excess(lo) > 0.0; ++i) {
      require(i < 100, ErrorKind::NoBracket, "invert_mu: cannot bracket Bose root");
      lo -= 2.0 * (std::abs(lo) + 1.0);
    }
    u = numerics::find_root(excess, lo, hi, root_tol);
  } else {
    // −Li_α(−z) ≤ z: the Boltzmann estimate lies below the root.
    const double degenerate_u = fermi_energy(dos, n) / T;
    double lo = std::min(boltzmann_u, degenerate_u) - 1.0;
    double hi = std::max(boltzmann_u, degenerate_u) + 1.0;
    const auto br = numerics::expand_bracket(excess, lo, hi);
    u = numerics::find_root(excess, br[0], br[1], root_tol);
  }
  return state_equations(dos, T, T * u, kind);
}

SommerfeldResult sommerfeld_general(const std::function<double(double)>& g,
                                    const std::function<double(double)>& dg, double n, double T,
                                    const numerics::Tolerance& tol) {
  require(n > 0.0 && T >= 0.0, ErrorKind::Domain, "sommerfeld: need n > 0 and T >= 0");
  const auto count_below = [&](double e) { return e <= 0.0 ? 0.0 : numerics::integrate(g, 0.0, e, tol); };
  const auto energy_below = [&](double e) {
    return e <= 0.0 ? 0.0 : numerics::integrate([&](double x) { return x * g(x); }, 0.0, e, tol);
  };
  auto br = numerics::expand_bracket([&](double e) { return count_below(e) - n; }, 0.0, 1.0);
  const double ef = numerics::find_root([&](double e) { return count_below(e) - n; }, br[0], br[1],
                                        {0.0, 1e-15, tol.max_evals});

  SommerfeldResult r;
  r.fermi_energy = ef;
  r.expansion_valid = T / ef < 0.3;
  const double ge = g(ef);
  const double e0 = energy_below(ef);
  r.mu_expansion = ef - kPi * kPi / 6.0 * dg(ef) / ge * T * T;
  r.e_expansion = e0 + kPi * kPi / 6.0 * T * T * ge;
  if (T == 0.0) {
    r.mu_exact = ef;
    r.e_exact = e0;
    return r;
  }

  const auto occupied = [&](const std::function<double(double)>& weight, double mu) {
    const auto f = [&](double e) { return weight(e) * fermi_factor((e - mu) / T); };
    double total = 0.0, start = 0.0;
    if (mu > 0.0) {
      total += numerics::integrate(f, 0.0, mu, tol);
      start = mu;
    }
    return total + numerics::integrate(f, start, numerics::kInf, tol, T);
  };
  const auto excess = [&](double mu) { return occupied(g, mu) - n; };
  br = numerics::expand_bracket(excess, ef - 0.5 * ef - T, ef + 0.5 * T);
  r.mu_exact = numerics::find_root(excess, br[0], br[1], {1e-15 * ef, 1e-15, tol.max_evals});
  r.e_exact = occupied([&](double e) { return e * g(e); }, r.mu_exact);
  return r;
}

SommerfeldResult sommerfeld(const PowerLawDos& dos, double n, double T, const numerics::Tolerance& tol) {
  dos.validate();
  const double c = dos.c, a = dos.alpha;
  auto r = sommerfeld_general([c, a](double e) { return e <= 0.0 ? 0.0 : c * std::pow(e, a - 1.0); },
                              [c, a](double e) { return e <= 0.0 ? 0.0 : c * (a - 1.0) * std::pow(e, a - 2.0); },
                              n, T, tol);
  r.P_expansion = r.e_expansion / a;
  r.P_exact = r.e_exact / a;
  return r;
}

Blackbody blackbody(double T, const numerics::Tolerance& tol, std::function<double(double)> absorption,
                    double light_speed) {
  require(T > 0.0 && light_speed > 0.0, ErrorKind::Domain, "blackbody: T and light speed must be positive");
  Blackbody b;
  b.temperature = T;
  b.light_speed = light_speed;
  const double cc = light_speed;
  const auto planck = [](double power) {
    return [power](double nu) {
      const double d = std::expm1(nu);
      return std::isfinite(d) ? std::pow(nu, power) / d : 0.0;
    };
  };
  b.planck_integral = numerics::integrate(planck(3.0), 0.0, numerics::kInf, tol, 5.0);
  const double number_integral = numerics::integrate(planck(2.0), 0.0, numerics::kInf, tol, 5.0);

  const double prefactor = 1.0 / (4.0 * kPi * kPi * cc * cc);
  b.spectral_flux = [absorption, prefactor, T](double omega) {
    if (omega <= 0.0) return 0.0;
    const double a = absorption ? absorption(omega) : 1.0;
    const double d = std::expm1(omega / T);
    return std::isfinite(d) ? a * prefactor * omega * omega * omega / d : 0.0;
  };
  if (absorption) {
    b.total_flux = numerics::integrate(b.spectral_flux, 0.0, numerics::kInf, tol, 5.0 * T);
  } else {
    b.total_flux = prefactor * b.planck_integral * std::pow(T, 4);
  }
  b.sigma_eff = b.total_flux / std::pow(T, 4);
  b.energy_density = b.planck_integral * std::pow(T, 4) / (kPi * kPi * cc * cc * cc);
  b.photon_density = number_integral * std::pow(T, 3) / (kPi * kPi * cc * cc * cc);
  b.pressure = b.energy_density / 3.0;
  b.peak_nu = numerics::find_root([](double nu) { return 3.0 * (-std::expm1(-nu)) - nu; }, 1.0, 5.0,
                                  {0.0, 1e-15, 10'000});
  b.peak_omega = b.peak_nu * T;
  return b;
}

IncidentFlux incident_flux(double n, double speed, double mass) {
  require(n >= 0.0 && speed >= 0.0 && mass >= 0.0, ErrorKind::Domain,
          "incident_flux: density, speed and mass must be >= 0");
  return {0.25 * n * speed, n * mass * speed * speed / 3.0};
}

IncidentFlux incident_flux(const std::function<double(double)>& density_per_speed, double mass,
                           const numerics::Tolerance& tol) {
  require(mass >= 0.0, ErrorKind::Domain, "incident_flux: mass must be >= 0");
  IncidentFlux out;
  out.J = 0.25 * numerics::integrate([&](double v) { return density_per_speed(v) * v; }, 0.0, numerics::kInf, tol);
  out.P = mass / 3.0 *
          numerics::integrate([&](double v) { return density_per_speed(v) * v * v; }, 0.0, numerics::kInf, tol);
  return out;
}

}  // namespace statmech::quantum_gases
