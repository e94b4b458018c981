#include <doctest.h>

#include <cmath>

#include "statmech/interactions.hpp"

using namespace statmech;
using namespace statmech::interactions;

namespace {

const double kPi = std::acos(-1.0);

double sphere(double r) { return 4.0 * kPi / 3.0 * r * r * r; }

template <class F>
double simpson(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

// Lennard-Jones b₂: Simpson on the repulsive shell and well, core and far tail in closed form.
double lj_b2_oracle(double eps, double sigma, double T) {
  const auto u = [&](double r) {
    const double s6 = std::pow(sigma / r, 6);
    return 4 * eps * s6 * (s6 - 1);
  };
  const double lo = 0.5 * sigma, hi = 40 * sigma;
  double integral = -sphere(lo);
  integral += simpson([&](double r) { return 4 * kPi * r * r * std::expm1(-u(r) / T); }, lo, hi, 400000);
  // −∫4πr² u/T dr beyond hi, first order in u.
  integral -= 16 * kPi * eps / T * (std::pow(sigma, 12) / (9 * std::pow(hi, 9)) - std::pow(sigma, 6) / (3 * std::pow(hi, 3)));
  return 0.5 * integral;
}

// Overlap volume of two spheres of radius a whose centres are r apart.
double lens_volume(double r, double a) { return kPi / 12.0 * (4 * a + r) * (2 * a - r) * (2 * a - r); }

}  // namespace

TEST_CASE("second cluster coefficient") {
  const double R = 0.7;
  CHECK(mayer_b2(hard_sphere(R), 1.3).a2 == doctest::Approx(16 * kPi / 3 * R * R * R).epsilon(1e-14));
  CHECK(mayer_b2(hard_sphere(R), 1.3).b2 == -mayer_b2(hard_sphere(R), 1.3).a2);

  PairPotential none;
  none.u = [](double) { return 0.0; };
  CHECK(mayer_b2(none, 1.0).b2 == 0.0);

  for (double T : {0.3, 1.0, 5.0}) {
    const double depth = 0.8, range = 1.5;
    const double sigma = 2 * R;
    const double closed = 0.5 * (-sphere(sigma) + std::expm1(depth / T) * (sphere(range * sigma) - sphere(sigma)));
    CHECK(mayer_b2(square_well(R, range, depth), T).b2 == doctest::Approx(closed).epsilon(1e-13));
  }

  for (double T : {0.8, 1.0, 2.5, 10.0}) {
    CHECK(mayer_b2(lennard_jones(1.0, 1.0), T).b2 == doctest::Approx(lj_b2_oracle(1.0, 1.0, T)).epsilon(1e-9));
  }
  // Boyle temperature of the Lennard-Jones fluid, T ≈ 3.418ε.
  CHECK(mayer_b2(lennard_jones(1.0, 1.0), 3.40).a2 < 0.0);
  CHECK(mayer_b2(lennard_jones(1.0, 1.0), 3.44).a2 > 0.0);
  // Scaling with σ and ε.
  CHECK(mayer_b2(lennard_jones(2.0, 1.5), 3.0).b2 ==
        doctest::Approx(std::pow(1.5, 3) * mayer_b2(lennard_jones(1.0, 1.0), 1.5).b2).epsilon(1e-10));
}

TEST_CASE("cumulants and moments") {
  CHECK(cumulants_from_moments({2.0, 5.0})[1] == 1.0);
  const double z1 = 3.5;
  const auto ideal = cumulants_from_moments({z1, z1 * z1, z1 * z1 * z1});
  CHECK(ideal[0] == z1);
  CHECK(ideal[1] == 0.0);
  CHECK(ideal[2] == 0.0);
  const std::vector<double> B{1.5, -0.25, 0.125};
  const auto back = cumulants_from_moments(moments_from_cumulants(B));
  for (int i = 0; i < 3; ++i) CHECK(back[i] == B[i]);
  const std::vector<double> Z{2.0, 7.0, 30.0};
  const auto forth = moments_from_cumulants(cumulants_from_moments(Z));
  for (int i = 0; i < 3; ++i) CHECK(forth[i] == Z[i]);
  CHECK_THROWS_AS(cumulants_from_moments({}), Error);
  CHECK_THROWS_AS(cumulants_from_moments({1, 2, 3, 4}), Error);

  const double V = 50.0, lambda = 0.8;
  const auto c = cluster_from_cumulants({V / std::pow(lambda, 3), 0.3, -0.2}, V, lambda);
  CHECK(c.b[0] == doctest::Approx(1.0).epsilon(1e-15));
  for (int n = 1; n <= 3; ++n) {
    CHECK(c.B[n - 1] / std::tgamma(n + 1.0) == doctest::Approx(V * std::pow(lambda, -3.0 * n) * c.b[n - 1]).epsilon(1e-14));
  }
}

TEST_CASE("virial coefficients") {
  const auto ideal = virial_coefficients({1.0, 0.0, 0.0});
  CHECK(ideal.pressure(0.3, 2.0) == doctest::Approx(0.6));
  CHECK_THROWS_AS(virial_coefficients({2.0, 0.1}), Error);

  const auto v = virial_coefficients({1.0, 0.4, -0.1});
  CHECK(v.a[1] == -0.4);
  CHECK(v.a[2] == doctest::Approx(4 * 0.16 + 0.2));
  CHECK(v.pressure(0.5, 1.5) == doctest::Approx(1.5 * (0.5 + v.a[1] * 0.25 + v.a[2] * 0.125)));

  const double lambda = 1.3;
  for (bool bose : {true, false}) {
    const auto a = virial_coefficients(ideal_quantum_clusters(bose, lambda, 3)).a;
    const double sign = bose ? 1.0 : -1.0;
    CHECK(a[1] == doctest::Approx(-sign * std::pow(2.0, -2.5) * std::pow(lambda, 3)).epsilon(1e-15));
    // Same a₂ from the two-particle partition function without Gibbs factor.
    const double V = 1e3, z1 = V / std::pow(lambda, 3);
    const double z2 = 2 * z2_identical(bose ? Statistics::Bose : Statistics::Fermi, 3, std::cbrt(V) / lambda);
    CHECK(a2_from_z2(z1, z2, V, lambda) == doctest::Approx(a[1]).epsilon(1e-9));
  }
}

TEST_CASE("Van der Waals identification") {
  const double R = 0.5, range = std::cbrt(2.0), depth = 1.0;
  std::vector<double> temps;
  for (double T = 100.0; T <= 400.0; T += 20.0) temps.push_back(T);
  const auto vdw = fit_van_der_waals(square_well(R, range, depth), temps);
  CHECK(vdw.b == doctest::Approx(0.5 * sphere(2 * R)).epsilon(1e-3));
  CHECK(vdw.b == doctest::Approx(van_der_waals_b(R, 3)).epsilon(1e-3));
  // Well volume equals the core volume, so ā = b̄ε₀.
  CHECK(vdw.a == doctest::Approx(0.5 * sphere(2 * R) * depth).epsilon(1e-2));
  CHECK(van_der_waals_b(1.0, 1) == doctest::Approx(2.0));
  CHECK(van_der_waals_b(1.0, 2) == doctest::Approx(2 * kPi));

  const VanDerWaals c{0.7, 0.2};
  const double T = 1.4, V = 1.0;
  const VirialSeries series{{1.0, c.b - c.a / T}};
  for (double rho : {1e-4, 1e-5}) {
    const double p_vdw = van_der_waals_pressure(rho * V, V, T, c);
    const double p_vir = series.pressure(rho, T);
    CHECK(std::abs(p_vdw - p_vir) / p_vdw < 1e-8);
    CHECK((p_vdw - p_vir) / (T * c.b * c.b * rho * rho * rho) == doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("third cluster coefficient for hard spheres") {
  const double R = 0.5, sigma = 2 * R;
  const double triangle_exact =
      -simpson([&](double r) { return 4 * kPi * r * r * lens_volume(r, sigma); }, 0.0, sigma, 2000);
  const double b0 = 2 * kPi / 3 * std::pow(sigma, 3);
  CHECK(-triangle_exact / 3 == doctest::Approx(5.0 / 8.0 * b0 * b0).epsilon(1e-12));

  const numerics::RandomStream stream(2024, 3);
  const auto mc = [&](const PairPotential& p, double T) { return triangle_integral_mc(p, T, sigma, 400000, stream); };
  const auto tri = mc(hard_sphere(R), 1.0);
  CHECK(std::abs(tri.value - triangle_exact) < 3 * tri.error);
  CHECK(tri.error < 0.02 * std::abs(triangle_exact));

  const auto b3 = mayer_b3(hard_sphere(R), 1.0, mc);
  const double b2 = mayer_b2(hard_sphere(R), 1.0).b2;
  const auto a = virial_coefficients({1.0, b2, b3.value}).a;
  CHECK(std::abs(a[2] - 5.0 / 8.0 * b0 * b0) < 3 * 2 * b3.error);

  // Deterministic for a fixed seed.
  CHECK(mc(hard_sphere(R), 1.0).value == tri.value);
}

TEST_CASE("configuration-integral Monte Carlo") {
  const auto pot = square_well(0.3, 1.5, 0.9);
  const double T = 0.7;
  const double box = 2.5 * pot.range;
  const auto est = configuration_b2_mc(pot, T, box, 2'000'000, numerics::RandomStream(99));
  const double exact = mayer_b2(pot, T).b2;
  CHECK(std::abs(est.value - exact) < 3 * est.error);
  // Pressure through the virial series inherits the agreement.
  const double rho = 0.01;
  const double p_exact = virial_coefficients({1.0, exact}).pressure(rho, T);
  const double p_mc = virial_coefficients({1.0, est.value}).pressure(rho, T);
  CHECK(std::abs(p_exact - p_mc) < 3 * est.error * T * rho * rho);
}

TEST_CASE("two identical quantum particles") {
  const double x = 3.0;
  const double z1 = x * x * x;
  CHECK(z2_identical(Statistics::Fermi, 3, x) == doctest::Approx(0.5 * z1 * z1 * (1 - std::pow(2.0, -1.5) / z1)).epsilon(1e-15));
  CHECK(z2_identical(Statistics::Bose, 1, x) == doctest::Approx(0.5 * (x * x + x / std::sqrt(2.0))).epsilon(1e-15));
  for (double big : {1e2, 1e4}) {
    const double z = std::pow(big, 3);
    CHECK(std::abs(z2_identical(Statistics::Bose, 3, big) / (0.5 * z * z) - 1) < 1.0 / z);
  }

  // Brute-force (anti)symmetrised pair states on a toy spectrum.
  const std::vector<double> levels{0.0, 0.4, 0.4, 1.7};
  const double beta = 0.9;
  for (auto kind : {Statistics::Bose, Statistics::Fermi}) {
    double sum = 0.0;
    for (std::size_t i = 0; i < levels.size(); ++i) {
      for (std::size_t j = i; j < levels.size(); ++j) {
        if (i == j && kind == Statistics::Fermi) continue;
        sum += std::exp(-beta * (levels[i] + levels[j]));
      }
    }
    CHECK(z2_from_spectrum(kind, levels, beta) == doctest::Approx(sum).epsilon(1e-12));
  }
  const std::vector<double> two{0.0, 1.0};
  CHECK(z2_from_spectrum(Statistics::Fermi, two, beta) == doctest::Approx(std::exp(-beta)).epsilon(1e-12));
}

TEST_CASE("interaction shift of Z2") {
  const double T = 1.2, m = 2.0, V = 30.0;
  const double lambda = std::sqrt(2 * kPi / (m * T));
  const double prefactor = std::pow(2.0, 1.5) * V / std::pow(lambda, 3);

  const PartialWave flat{0, [](double) { return 0.0; }};
  CHECK(z2_interaction_shift({}, {flat}, Statistics::Bose, T, m, V).total == 0.0);

  const double eb = -0.6;
  CHECK(z2_interaction_shift({eb}, {}, Statistics::Bose, T, m, V).total ==
        doctest::Approx(prefactor * std::exp(0.6 / T)).epsilon(1e-14));

  // Hard-sphere s-wave: ∫k(−kR)e^{−k²/(mT)}dk = −R(√π/4)(mT)^{3/2}.
  const double Rc = 0.3;
  const PartialWave hard{0, [Rc](double k) { return -k * Rc; }};
  const auto hs = z2_interaction_shift({}, {hard}, Statistics::Bose, T, m, V);
  const double closed = prefactor * lambda * lambda / (kPi * kPi) * (-Rc * std::sqrt(kPi) / 4 * std::pow(m * T, 1.5));
  CHECK(hs.scattering == doctest::Approx(closed).epsilon(1e-8));
  CHECK(hs.bound == 0.0);

  // Linear in the phase shifts; p-wave carries weight 3.
  const PartialWave wave{1, [](double k) { return std::atan(0.5 * k) * std::exp(-0.1 * k * k); }};
  const PartialWave doubled{1, [](double k) { return 2 * std::atan(0.5 * k) * std::exp(-0.1 * k * k); }};
  const double single = z2_interaction_shift({}, {wave}, Statistics::Fermi, T, m, V).scattering;
  CHECK(z2_interaction_shift({}, {doubled}, Statistics::Fermi, T, m, V).scattering == doctest::Approx(2 * single).epsilon(1e-13));
  const PartialWave f_wave{3, wave.phase_shift};
  CHECK(z2_interaction_shift({}, {f_wave}, Statistics::Fermi, T, m, V).scattering == doctest::Approx(7.0 / 3.0 * single).epsilon(1e-13));

  CHECK_THROWS_AS(z2_interaction_shift({}, {wave}, Statistics::Bose, T, m, V), Error);
  CHECK_THROWS_AS(z2_interaction_shift({}, {hard}, Statistics::Fermi, T, m, V), Error);
}
