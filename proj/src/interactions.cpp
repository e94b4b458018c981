#include "statmech/interactions.hpp"

#include <algorithm>
#include <cmath>

namespace statmech::interactions {

namespace {

using numerics::kInf;
using numerics::kPi;

double ball_volume(double radius) { return 4.0 * kPi / 3.0 * radius * radius * radius; }

// Running mean and variance over all samples of every chunk.
struct Accumulator {
  long n = 0;
  double sum = 0.0;
  double sum_sq = 0.0;

  void add(double x) {
    ++n;
    sum += x;
    sum_sq += x * x;
  }
  Estimate scaled(double factor) const {
    const double mean = sum / n;
    const double var = n > 1 ? std::max(sum_sq / n - mean * mean, 0.0) * n / (n - 1) : 0.0;
    return {factor * mean, std::abs(factor) * std::sqrt(var / n)};
  }
};

std::array<double, 3> point_in_ball(numerics::RandomStream& rng, double radius) {
  for (;;) {
    const std::array<double, 3> p{2 * rng.uniform() - 1, 2 * rng.uniform() - 1, 2 * rng.uniform() - 1};
    if (p[0] * p[0] + p[1] * p[1] + p[2] * p[2] <= 1.0) return {radius * p[0], radius * p[1], radius * p[2]};
  }
}

double norm3(double x, double y, double z) { return std::sqrt(x * x + y * y + z * z); }

std::uint64_t chunk_id(const numerics::RandomStream& stream, int chunk) {
  return ((stream.stream_id() + 1) << 20) + static_cast<std::uint64_t>(chunk);
}

}  // namespace

double PairPotential::operator()(double r) const {
  if (r < hard_core_radius) return kInf;
  if (r > range) return 0.0;
  return u(r);
}

double PairPotential::mayer(double r, double T) const {
  const double e = (*this)(r);
  if (std::isnan(e) || e == kInf) return -1.0;
  return std::expm1(-e / T);
}

PairPotential hard_sphere(double radius) {
  require(radius > 0.0, ErrorKind::Domain, "hard_sphere: radius must be positive");
  PairPotential p;
  p.u = [](double) { return 0.0; };
  p.hard_core_radius = 2.0 * radius;
  p.range = 2.0 * radius;
  p.tail_scale = radius;
  return p;
}

PairPotential square_well(double radius, double range_factor, double depth) {
  require(radius > 0.0 && range_factor >= 1.0, ErrorKind::Domain,
          "square_well: need radius > 0 and range_factor >= 1");
  PairPotential p;
  const double edge = 2.0 * radius * range_factor;
  p.u = [edge, depth](double r) { return r < edge ? -depth : 0.0; };
  p.hard_core_radius = 2.0 * radius;
  p.range = edge;
  p.tail_scale = radius;
  return p;
}

PairPotential lennard_jones(double depth, double sigma) {
  require(depth >= 0.0 && sigma > 0.0, ErrorKind::Domain, "lennard_jones: need depth >= 0, sigma > 0");
  PairPotential p;
  p.u = [depth, sigma](double r) {
    if (r <= 0.0) return kInf;
    const double s6 = std::pow(sigma / r, 6);
    return 4.0 * depth * s6 * (s6 - 1.0);
  };
  p.tail_scale = sigma;
  p.breakpoints = {0.8 * sigma, sigma, std::pow(2.0, 1.0 / 6.0) * sigma, 2.0 * sigma, 4.0 * sigma};
  return p;
}

SecondCluster mayer_b2(const PairPotential& pot, double T, const numerics::Tolerance& tol) {
  require(T > 0.0, ErrorKind::Domain, "mayer_b2: T must be positive");
  require(static_cast<bool>(pot.u), ErrorKind::Domain, "mayer_b2: potential has no energy function");
  const double core = pot.hard_core_radius;
  double integral = -ball_volume(core);

  std::vector<double> cuts{core};
  for (double b : pot.breakpoints) {
    if (b > core && b < pot.range) cuts.push_back(b);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.push_back(pot.range);
  const auto shell = [&](double r) { return 4.0 * kPi * r * r * pot.mayer(r, T); };
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] > cuts[i]) integral += numerics::integrate(shell, cuts[i], cuts[i + 1], tol, pot.tail_scale);
  }
  SecondCluster out;
  out.b2 = 0.5 * integral;
  out.a2 = -out.b2;
  return out;
}

std::vector<double> cumulants_from_moments(const std::vector<double>& z) {
  require(!z.empty() && z.size() <= 3, ErrorKind::Domain, "cumulants_from_moments: need 1 to 3 moments");
  std::vector<double> b{z[0]};
  if (z.size() > 1) b.push_back(z[1] - z[0] * z[0]);
  if (z.size() > 2) b.push_back(z[2] - 3.0 * z[1] * z[0] + 2.0 * z[0] * z[0] * z[0]);
  return b;
}

std::vector<double> moments_from_cumulants(const std::vector<double>& b) {
  require(!b.empty() && b.size() <= 3, ErrorKind::Domain, "moments_from_cumulants: need 1 to 3 cumulants");
  std::vector<double> z{b[0]};
  if (b.size() > 1) z.push_back(b[1] + b[0] * b[0]);
  if (b.size() > 2) z.push_back(b[2] + 3.0 * b[1] * b[0] + b[0] * b[0] * b[0]);
  return z;
}

ClusterCoefficients cluster_from_cumulants(const std::vector<double>& cumulants, double volume,
                                           double thermal_wavelength) {
  require(volume > 0.0 && thermal_wavelength > 0.0, ErrorKind::Domain,
          "cluster_from_cumulants: volume and wavelength must be positive");
  ClusterCoefficients c;
  c.B = cumulants;
  const double l3 = std::pow(thermal_wavelength, 3);
  double factorial = 1.0;
  for (std::size_t n = 1; n <= cumulants.size(); ++n) {
    factorial *= static_cast<double>(n);
    c.b.push_back(cumulants[n - 1] * std::pow(l3, static_cast<double>(n)) / (factorial * volume));
  }
  return c;
}

double VirialSeries::pressure(double density, double T) const {
  double p = 0.0;
  for (std::size_t l = a.size(); l-- > 0;) p = (p + a[l]) * density;
  return T * p;
}

VirialSeries virial_coefficients(const std::vector<double>& b) {
  require(!b.empty() && b.size() <= 3, ErrorKind::Domain, "virial_coefficients: need b1..bn with n <= 3");
  require(std::abs(b[0] - 1.0) < 1e-12, ErrorKind::Domain, "virial_coefficients: b1 must equal 1");
  VirialSeries v;
  v.a.push_back(1.0);
  if (b.size() > 1) v.a.push_back(-b[1]);
  if (b.size() > 2) v.a.push_back(4.0 * b[1] * b[1] - 2.0 * b[2]);
  return v;
}

std::vector<double> ideal_quantum_clusters(bool bose, double thermal_wavelength, int count) {
  require(count >= 1 && thermal_wavelength > 0.0, ErrorKind::Domain,
          "ideal_quantum_clusters: need count >= 1 and positive wavelength");
  std::vector<double> b;
  const double l3 = std::pow(thermal_wavelength, 3);
  for (int n = 1; n <= count; ++n) {
    const double sign = bose || n % 2 == 1 ? 1.0 : -1.0;
    b.push_back(sign * std::pow(n, -2.5) * std::pow(l3, n - 1));
  }
  return b;
}

VanDerWaals fit_van_der_waals(const PairPotential& pot, const std::vector<double>& temperatures) {
  require(temperatures.size() >= 2, ErrorKind::EmptyInput, "fit_van_der_waals: need at least two temperatures");
  std::vector<double> x, y;
  for (double T : temperatures) {
    x.push_back(1.0 / T);
    y.push_back(mayer_b2(pot, T).a2);
  }
  const auto fit = numerics::linear_fit(x, y);
  return {-fit.slope, fit.intercept};
}

double van_der_waals_b(double particle_radius, int d) {
  require(d >= 1 && particle_radius > 0.0, ErrorKind::Domain, "van_der_waals_b: need d >= 1, radius > 0");
  const double unit_ball = std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
  return std::pow(2.0, d - 1) * unit_ball * std::pow(particle_radius, d);
}

double van_der_waals_pressure(double N, double V, double T, const VanDerWaals& c) {
  require(V > N * c.b, ErrorKind::Domain, "van_der_waals_pressure: volume below the excluded volume");
  const double rho = N / V;
  return N * T / (V - N * c.b) - c.a * rho * rho;
}

Estimate triangle_integral_mc(const PairPotential& pot, double T, double cutoff, long samples,
                              const numerics::RandomStream& stream, int chunks) {
  require(cutoff > 0.0 && samples > 0 && chunks > 0, ErrorKind::Domain,
          "triangle_integral_mc: need positive cutoff, samples and chunks");
  Accumulator acc;
  for (int c = 0; c < chunks; ++c) {
    numerics::RandomStream rng = stream.split(chunk_id(stream, c));
    const long n = samples / chunks + (c < samples % chunks ? 1 : 0);
    for (long i = 0; i < n; ++i) {
      const auto r = point_in_ball(rng, cutoff);
      const auto s = point_in_ball(rng, cutoff);
      const double fr = pot.mayer(norm3(r[0], r[1], r[2]), T);
      const double fs = pot.mayer(norm3(s[0], s[1], s[2]), T);
      const double frs = pot.mayer(norm3(r[0] - s[0], r[1] - s[1], r[2] - s[2]), T);
      acc.add(fr * fs * frs);
    }
  }
  const double v = ball_volume(cutoff);
  return acc.scaled(v * v);
}

Estimate mayer_b3(const PairPotential& pot, double T, const TriangleEvaluator& triangle) {
  require(static_cast<bool>(triangle), ErrorKind::Domain, "mayer_b3: no triangle evaluator");
  const double b2 = mayer_b2(pot, T).b2;
  const Estimate tri = triangle(pot, T);
  const double chains = 3.0;
  const double rings = 1.0;
  return {(chains * 4.0 * b2 * b2 + rings * tri.value) / 6.0, rings * tri.error / 6.0};
}

Estimate configuration_b2_mc(const PairPotential& pot, double T, double box, long samples,
                             const numerics::RandomStream& stream, int chunks) {
  require(box > 0.0 && samples > 0 && chunks > 0, ErrorKind::Domain,
          "configuration_b2_mc: need positive box, samples and chunks");
  Accumulator acc;
  for (int c = 0; c < chunks; ++c) {
    numerics::RandomStream rng = stream.split(chunk_id(stream, c));
    const long n = samples / chunks + (c < samples % chunks ? 1 : 0);
    for (long i = 0; i < n; ++i) {
      std::array<double, 3> d{};
      for (double& x : d) {
        x = box * (rng.uniform() - rng.uniform());
        x -= box * std::round(x / box);
      }
      acc.add(pot.mayer(norm3(d[0], d[1], d[2]), T));
    }
  }
  return acc.scaled(0.5 * box * box * box);
}

double z2_identical(Statistics kind, int d, double box_over_wavelength) {
  require(d >= 1 && box_over_wavelength > 0.0, ErrorKind::Domain, "z2_identical: need d >= 1, L/λ > 0");
  const double z1 = std::pow(box_over_wavelength, d);
  const double sign = kind == Statistics::Bose ? 1.0 : -1.0;
  return 0.5 * (z1 * z1 + sign * std::pow(2.0, -0.5 * d) * z1);
}

double z2_from_spectrum(Statistics kind, const std::vector<double>& levels, double beta) {
  require(!levels.empty(), ErrorKind::EmptyInput, "z2_from_spectrum: empty spectrum");
  double z1 = 0.0, z1_double = 0.0;
  for (double e : levels) {
    z1 += std::exp(-beta * e);
    z1_double += std::exp(-2.0 * beta * e);
  }
  const double sign = kind == Statistics::Bose ? 1.0 : -1.0;
  return 0.5 * (z1 * z1 + sign * z1_double);
}

InteractionShift z2_interaction_shift(const std::vector<double>& bound_energies,
                                      const std::vector<PartialWave>& waves, Statistics kind, double T,
                                      double mass, double volume, const numerics::Tolerance& tol) {
  require(T > 0.0 && mass > 0.0 && volume > 0.0, ErrorKind::Domain,
          "z2_interaction_shift: T, mass and volume must be positive");
  const double lambda = std::sqrt(2.0 * kPi / (mass * T));
  const double prefactor = std::pow(2.0, 1.5) * volume / std::pow(lambda, 3);

  InteractionShift out;
  for (double e : bound_energies) out.bound += std::exp(-e / T);

  const int parity = kind == Statistics::Bose ? 0 : 1;
  double waves_sum = 0.0;
  for (const auto& w : waves) {
    require(w.l >= 0 && w.l % 2 == parity, ErrorKind::Domain,
            "z2_interaction_shift: partial wave parity does not match the statistics");
    require(static_cast<bool>(w.phase_shift), ErrorKind::Domain, "z2_interaction_shift: missing phase shift");
    const auto integrand = [&](double k) { return k * w.phase_shift(k) * std::exp(-k * k / (mass * T)); };
    waves_sum += (2 * w.l + 1) * numerics::integrate(integrand, 0.0, kInf, tol, std::sqrt(mass * T));
  }
  out.scattering = lambda * lambda / (kPi * kPi) * waves_sum;

  out.bound *= prefactor;
  out.scattering *= prefactor;
  out.total = out.bound + out.scattering;
  return out;
}

double a2_from_z2(double z1, double z2, double volume, double thermal_wavelength) {
  require(volume > 0.0 && thermal_wavelength > 0.0, ErrorKind::Domain,
          "a2_from_z2: volume and wavelength must be positive");
  const double l3 = std::pow(thermal_wavelength, 3);
  return -l3 * l3 / volume * 0.5 * (z2 - z1 * z1);
}

}  // namespace statmech::interactions
