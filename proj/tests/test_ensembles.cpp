#include <doctest.h>

#include <cmath>
#include <sstream>

#include "statmech/ensembles.hpp"

using namespace statmech;
using namespace statmech::ensembles;

namespace {

LevelSpectrum truncated_oscillator(double omega, int levels) {
  std::vector<double> e;
  for (int n = 0; n < levels; ++n) e.push_back(omega * (n + 0.5));
  return LevelSpectrum::from_energies(e);
}

}  // namespace

TEST_CASE("partition: worked examples") {
  const double eps = 1.3;
  const auto two_level = LevelSpectrum::from_energies({-eps / 2, eps / 2});
  for (double beta : {0.1, 1.0, 7.0}) {
    const auto o = partition(two_level, {beta, {}});
    CHECK(o.lnZ == doctest::Approx(std::log(2 * std::cosh(beta * eps / 2))).epsilon(1e-13));
  }

  const LevelSpectrum spins({{-3 * eps, 1}, {eps, 3}});
  for (double beta : {0.2, 2.0}) {
    const double z = std::exp(3 * beta * eps) + 3 * std::exp(-beta * eps);
    CHECK(partition(spins, {beta, {}}).lnZ == doctest::Approx(std::log(z)).epsilon(1e-13));
  }

  const auto five = LevelSpectrum::from_energies({0, 1, 2, 3, 4});
  CHECK(partition(five, {1e-9, {}}).lnZ == doctest::Approx(std::log(5.0)).epsilon(1e-8));
}

TEST_CASE("partition: thermodynamic identities") {
  const LevelSpectrum spec({{-2.0, 2}, {-0.5, 1}, {0.3, 4}, {1.7, 3}});
  for (double beta : {0.05, 0.5, 3.0, 40.0}) {
    const auto o = partition(spec, {beta, {}});
    const double T = 1.0 / beta;
    CHECK(o.F == doctest::Approx(o.E - T * o.S).epsilon(1e-13));
    CHECK(o.S >= 0.0);
    CHECK(o.C >= 0.0);
    // VarE against T² dE/dT by central difference in T.
    const double h = 1e-4 * T;
    const double dEdT = (partition(spec, {1.0 / (T + h), {}}).E - partition(spec, {1.0 / (T - h), {}}).E) / (2 * h);
    CHECK(std::abs(o.VarE - T * T * dEdT) <= 1e-6 * std::max(o.VarE, 1e-300) + 1e-14);
  }
  // S → ln(ground multiplet degeneracy).
  CHECK(partition(spec, {500.0, {}}).S == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  const auto p = probabilities(spec, {0.7, {}});
  double total = 0;
  for (double v : p) total += v;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("partition: overflow guard and validation") {
  CHECK_THROWS_AS(LevelSpectrum({}), Error);
  CHECK_THROWS_AS(LevelSpectrum({{0.0, 0.5}}), Error);
  // A huge upper multiplet sitting beyond the underflow threshold.
  const LevelSpectrum huge({{0.0, 1}, {1000.0, 1e300}});
  CHECK_THROWS_AS(partition(huge, {0.71, {}}), Error);
  // Far-away levels of ordinary degeneracy are harmless.
  const LevelSpectrum far({{0.0, 1}, {1e6, 1}});
  CHECK(partition(far, {1.0, {}}).lnZ == doctest::Approx(0.0));
}

TEST_CASE("oscillator and spin closed forms") {
  const double omega = 1.0;
  // Classical limit E → T.
  const auto hot = oscillator_observables(omega, ThermoPoint::at_temperature(200.0));
  CHECK(hot.E / 200.0 == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(hot.C == doctest::Approx(1.0).epsilon(1e-5));

  // Boltzmann-dominated low temperature: C ≈ (ω/T)² e^{−ω/T}.
  for (double T : {0.02, 0.05}) {
    const double x = omega / T;
    const double boltz = x * x * std::exp(-x);
    CHECK(oscillator_observables(omega, ThermoPoint::at_temperature(T)).C / boltz == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(spin_observables(omega, ThermoPoint::at_temperature(T)).C / boltz == doctest::Approx(1.0).epsilon(1e-8));
  }
  // Ratio of spin to oscillator C tends to one as T → 0.
  double prev = 0.0;
  for (double T : {1.0, 0.5, 0.2, 0.1, 0.05}) {
    const double r = spin_observables(omega, ThermoPoint::at_temperature(T)).C /
                     oscillator_observables(omega, ThermoPoint::at_temperature(T)).C;
    CHECK(r > prev);
    prev = r;
  }
  CHECK(prev == doctest::Approx(1.0).epsilon(1e-7));

  // Printed C(T) = e^{ω/T}/(e^{ω/T} ± 1)² (ω/T)².
  for (double T : {0.3, 1.0, 4.0}) {
    const double x = omega / T, ex = std::exp(x);
    CHECK(oscillator_observables(omega, ThermoPoint::at_temperature(T)).C ==
          doctest::Approx(ex / ((ex - 1) * (ex - 1)) * x * x).epsilon(1e-12));
    CHECK(spin_observables(omega, ThermoPoint::at_temperature(T)).C ==
          doctest::Approx(ex / ((ex + 1) * (ex + 1)) * x * x).epsilon(1e-12));
  }
  CHECK(std::exp(oscillator_observables(omega, {2.0, {}}).lnZ) == doctest::Approx(1.0 / (2 * std::sinh(1.0))));
  CHECK(std::exp(spin_observables(omega, {2.0, {}}).lnZ) == doctest::Approx(1.0 + std::exp(-2.0)));
}

TEST_CASE("truncated oscillator spectrum matches the closed form") {
  const double omega = 0.8;
  for (double x : {0.15, 0.2, 0.5, 1.0, 2.0, 5.0}) {
    const ThermoPoint pt{x / omega, {}};
    const auto exact = oscillator_observables(omega, pt);
    const auto sum = partition(truncated_oscillator(omega, 200), pt);
    CHECK(std::abs(sum.lnZ - exact.lnZ) < 1e-10 * std::max(1.0, std::abs(exact.lnZ)));
    CHECK(std::abs(sum.E - exact.E) < 1e-10 * exact.E);
    CHECK(std::abs(sum.C - exact.C) < 1e-10 * std::max(1.0, exact.C));
  }
}

TEST_CASE("occupation_stats") {
  const auto b = occupation_stats(Statistics::Bose, 0.7);
  CHECK(b.g2 == doctest::Approx(2.0));
  CHECK(b.mean == doctest::Approx(1.0 / std::expm1(0.7)));
  CHECK(b.variance == doctest::Approx(b.mean + b.mean * b.mean));
  const auto f = occupation_stats(Statistics::Fermi, 0.7);
  CHECK(f.g2 == 0.0);
  CHECK(f.variance == doctest::Approx(f.mean * (1 - f.mean)));
  for (auto k : {Statistics::Bose, Statistics::Fermi}) {
    const auto s = occupation_stats(k, 800.0);
    CHECK(s.mean < 1e-300);
    CHECK(s.variance < 1e-300);
  }
  CHECK_THROWS_AS(occupation_stats(Statistics::Bose, 0.0), Error);
  CHECK_THROWS_AS(occupation_stats(Statistics::Bose, -1.0), Error);
}

TEST_CASE("debye_heat_capacity") {
  const double wc = 2.0;
  // Classical plateau ωc^α/α.
  CHECK(debye_heat_capacity(3.0, wc, 1e4) == doctest::Approx(std::pow(wc, 3) / 3).epsilon(1e-6));
  CHECK(debye_heat_capacity(1.5, wc, 1e4) == doctest::Approx(std::pow(wc, 1.5) / 1.5).epsilon(1e-6));

  // T³ law at low temperature.
  std::vector<double> lx, ly;
  for (double T : {0.01, 0.015, 0.02, 0.03}) {
    lx.push_back(std::log(T));
    ly.push_back(std::log(debye_heat_capacity(3.0, wc, T)));
  }
  CHECK(std::abs(numerics::linear_fit(lx, ly).slope - 3.0) < 0.01);

  double prev = 0.0;
  for (double T = 0.05; T < 20; T *= 1.5) {
    const double c = debye_heat_capacity(3.0, wc, T);
    CHECK(c > prev);
    prev = c;
  }
  CHECK_THROWS_AS(debye_heat_capacity(0.0, wc, 1.0), Error);
}

TEST_CASE("equipartition") {
  CHECK(classical_quadratic_energy(3, 2.0) == 3.0);
  CHECK(classical_quadratic_energy(2, 0.7) == doctest::Approx(0.7));
  CHECK(classical_quadratic_energy(0, 5.0) == 0.0);
  CHECK_THROWS_AS(classical_quadratic_energy(-1, 1.0), Error);

  // Anharmonic coupled Hamiltonian: ⟨q_i ∂H/∂q_j⟩ = T δ_ij still holds.
  auto H = [](const Eigen::VectorXd& q) {
    return 0.5 * q(0) * q(0) + 0.25 * std::pow(q(1), 4) + 0.3 * q(0) * q(1) + 0.5 * q(1) * q(1);
  };
  auto grad = [](const Eigen::VectorXd& q) {
    Eigen::VectorXd g(2);
    g << q(0) + 0.3 * q(1), std::pow(q(1), 3) + 0.3 * q(0) + q(1);
    return g;
  };
  numerics::RandomStream rng(99, 0);
  const double T = 0.8;
  const auto rep = generalized_equipartition_check(H, grad, 2, T, 400000, rng, 1.2);
  CHECK(rep.max_residual < 0.05 * T);
}

TEST_CASE("generalized_force") {
  // Ideal gas: ln Z = N ln(V/λ³) → P = NT/V.
  const double N = 50, beta = 0.4, lambda = 0.3;
  const auto lnZ = [&](double V) { return N * std::log(V / std::pow(lambda, 3)); };
  CHECK(generalized_force(lnZ, beta, 7.0) == doctest::Approx(N / beta / 7.0).epsilon(1e-9));

  // Gaussian polymer: ln Z(X) = const − X²/(2L0²) → f = −(T/L0²)X.
  const double L0 = 2.0;
  const auto poly = [&](double X) { return 3.0 - 0.5 * X * X / (L0 * L0); };
  CHECK(generalized_force(poly, beta, 1.5) == doctest::Approx(-(1 / beta) / (L0 * L0) * 1.5).epsilon(1e-9));

  // Spectrum independent of X.
  const auto fixed = [](double) { return LevelSpectrum::from_energies({0.0, 1.0, 2.5}); };
  CHECK(std::abs(generalized_force(fixed, {1.0, {}}, 0.3)) < 1e-12);

  // Spectrum-valued route: levels E_n(X) = X·n → y = −Σ p_n n.
  const auto scaled = [](double X) { return LevelSpectrum::from_energies({0.0, X, 2 * X}); };
  const ThermoPoint pt{1.3, {}};
  const auto spec = scaled(0.9);
  const auto p = probabilities(spec, pt);
  CHECK(generalized_force(scaled, pt, 0.9) == doctest::Approx(-(p[1] + 2 * p[2])).epsilon(1e-9));

  const auto noisy = [](double X) { return std::sin(1e9 * X); };
  CHECK_THROWS_AS(generalized_force(noisy, 1.0, 0.5), Error);
}

TEST_CASE("spectrum CSV") {
  std::istringstream good("energy,degeneracy\n# comment\n-1.5,1\n0.5,3\n\n2,2\n");
  const auto s = read_spectrum_csv(good);
  CHECK(s.levels().size() == 3);
  CHECK(s.state_count() == 6.0);
  std::istringstream bad("e,g\n1,1\n");
  CHECK_THROWS_AS(read_spectrum_csv(bad), Error);
  std::istringstream broken("energy,degeneracy\nabc,1\n");
  CHECK_THROWS_AS(read_spectrum_csv(broken), Error);
}
