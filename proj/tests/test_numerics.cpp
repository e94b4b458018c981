#include <doctest.h>

#include <cmath>
#include <numeric>

#include "statmech/numerics.hpp"

using namespace statmech;
using namespace statmech::numerics;

namespace {

// Σ 6/n⁴ with an integral tail correction; independent of the quadrature path.
double bose_cubic_series() {
  double s = 0.0;
  const int n_max = 20000;
  for (int n = n_max; n >= 1; --n) s += 6.0 / std::pow(static_cast<double>(n), 4);
  const double tail = 6.0 / (3.0 * std::pow(n_max + 0.5, 3));
  return s + tail;
}

double bisect(const RealFunction& f, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if ((f(mid) > 0) == (f(lo) > 0)) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> direct_autocovariance(const std::vector<double>& x) {
  const auto n = x.size();
  double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  std::vector<double> c(n);
  for (std::size_t k = 0; k < n; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i + k < n; ++i) s += (x[i] - mean) * (x[i + k] - mean);
    c[k] = s / static_cast<double>(n - k);
  }
  return c;
}

}  // namespace

TEST_CASE("integrate: polynomial and error paths") {
  CHECK(integrate([](double x) { return x; }, 0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK_THROWS_AS(integrate([](double x) { return x; }, 1.0, 1.0), Error);
  CHECK_THROWS_AS(integrate([](double x) { return x; }, 2.0, 1.0), Error);
  Tolerance tiny{0.0, 1e-15, 50};
  CHECK_THROWS_AS(integrate([](double x) { return std::sin(1.0 / (x + 1e-3)); }, 0.0, 1.0, tiny),
                  NonConvergenceError);
}

TEST_CASE("integrate: Bose integrals on the half line") {
  const double series = bose_cubic_series();
  const double quad = integrate([](double x) { return x * x * x / std::expm1(x); }, 0.0, kInf);
  CHECK(std::abs(quad - series) < 1e-9 * series);
  CHECK(quad == doctest::Approx(std::pow(kPi, 4) / 15.0).epsilon(1e-10));

  const double expected = std::sqrt(kPi) / 2.0 * std::riemann_zeta(1.5);
  const double half = integrate([](double x) { return std::sqrt(x) / std::expm1(x); }, 0.0, kInf);
  CHECK(half == doctest::Approx(expected).epsilon(1e-9));
  CHECK(std::abs(half - 2.31516) < 1e-5);
}

TEST_CASE("integrate: linearity") {
  const RealFunction f = [](double x) { return std::exp(-x) * std::cos(3 * x); };
  const RealFunction g = [](double x) { return x * x / (1 + x * x * x * x); };
  const double a = 2.5, b = -0.75;
  Tolerance tol;
  const double lhs = integrate([&](double x) { return a * f(x) + b * g(x); }, 0.0, kInf, tol);
  const double rhs = a * integrate(f, 0.0, kInf, tol) + b * integrate(g, 0.0, kInf, tol);
  CHECK(std::abs(lhs - rhs) <= 2.0 * tol.bound(lhs) * 10);
}

TEST_CASE("integrate_2d: separable product") {
  const double v = integrate_2d([](double x, double y) { return std::cos(x) * y * y; }, 0.0, kPi / 2, 0.0, 1.0);
  CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("find_root") {
  CHECK(find_root([](double x) { return x - 1.0; }, 0.0, 2.0) == doctest::Approx(1.0).epsilon(1e-12));

  const RealFunction f = [](double x) { return std::sinh(2 * x) - 1.0; };
  const double oracle = bisect(f, 0.0, 1.0);
  Tolerance tol;
  const double root = find_root(f, 0.0, 1.0, tol);
  CHECK(std::abs(root - oracle) < 1e-11);
  CHECK(std::abs(root - 0.4407) < 1e-4);
  // Re-substitution bound: |f(x*)| <= 10·abs·max|f| on the bracket.
  CHECK(std::abs(f(root)) <= 10 * 1e-10 * std::abs(f(1.0)));

  // Mean-field self-consistency at T = Tc: m = tanh(m) has the trivial root.
  const double m = find_root([](double x) { return std::tanh(x) - x; }, -0.5, 0.5);
  CHECK(std::abs(m) < 1e-6);

  CHECK_THROWS_AS(find_root([](double x) { return x * x + 1; }, -1.0, 1.0), Error);
  try {
    find_root([](double x) { return x * x + 1; }, -1.0, 1.0);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoBracket);
  }
}

TEST_CASE("expand_bracket") {
  auto br = expand_bracket([](double x) { return x - 37.0; }, 0.0, 1.0);
  CHECK(br[0] <= 37.0);
  CHECK(br[1] >= 37.0);
}

TEST_CASE("ode_advance") {
  Eigen::VectorXd y0(1);
  y0 << 3.0;
  auto zero = [](double, const Eigen::VectorXd& y) { return Eigen::VectorXd::Zero(y.size()).eval(); };
  CHECK(ode_advance(VectorField(zero), y0, 0.0, 5.0, 0.1)(0) == 3.0);

  auto decay = [](double, const Eigen::VectorXd& y) { return Eigen::VectorXd(-y); };
  y0 << 1.0;
  CHECK(std::abs(ode_advance(VectorField(decay), y0, 0.0, 1.0, 1e-3)(0) - std::exp(-1.0)) < 1e-8);

  // Convergence order: err(h)/err(h/2) close to 16.
  const double lambda = -2.0;
  auto lin = [lambda](double, double y) { return lambda * y; };
  const double exact = std::exp(lambda * 2.0);
  const double e1 = std::abs(ode_advance(lin, 1.0, 0.0, 2.0, 0.1) - exact);
  const double e2 = std::abs(ode_advance(lin, 1.0, 0.0, 2.0, 0.05) - exact);
  CHECK(e1 / e2 >= 14.0);
  CHECK(e1 / e2 <= 18.0);

  auto blowup = [](double, double y) { return y * y; };
  CHECK_THROWS_AS(ode_advance(blowup, 1.0, 0.0, 2.0, 0.01), Error);
  CHECK_THROWS_AS(ode_advance(lin, 1.0, 0.0, 2.0, 0.0), Error);
}

TEST_CASE("autocorrelation: constant input and errors") {
  std::vector<double> c(64, 2.5);
  auto res = autocorrelation_spectrum(c, 0.1);
  for (double v : res.lags) CHECK(v == 0.0);
  std::vector<double> one{1.0};
  CHECK_THROWS_AS(autocorrelation_spectrum(one, 0.1), Error);
}

TEST_CASE("autocorrelation: FFT path matches the direct sum and Parseval holds") {
  RandomStream rng(11, 0);
  for (std::size_t n : {2u, 3u, 17u, 100u, 256u}) {
    std::vector<double> x(n);
    for (double& v : x) v = rng.gaussian() + 0.3;
    const auto fast = autocorrelation_spectrum(x, 0.5);
    const auto slow = direct_autocovariance(x);
    double scale = std::abs(slow[0]);
    for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(fast.lags[k] - slow[k]) <= 1e-10 * scale);

    // Σ|C̃|²/(M·dt) equals Σ_k C(k)² dt over the symmetric lag grid.
    double lhs = 0.0, rhs = fast.lags[0] * fast.lags[0];
    for (double s : fast.spectrum) lhs += s * s;
    lhs /= static_cast<double>(fast.spectrum.size()) * fast.dt;
    for (std::size_t k = 1; k < fast.lags.size(); ++k) rhs += 2 * fast.lags[k] * fast.lags[k];
    rhs *= fast.dt;
    CHECK(std::abs(lhs - rhs) <= 1e-10 * rhs);
  }
}

TEST_CASE("autocorrelation: white noise is flat") {
  RandomStream rng(5, 0);
  const double sigma = 1.7, dt = 0.01;
  std::vector<double> x(1 << 16);
  for (double& v : x) v = sigma * rng.gaussian();
  const auto res = autocorrelation_spectrum(x, dt, 32);
  const double expected = sigma * sigma * dt;
  double worst = 0.0;
  for (double s : res.spectrum) worst = std::max(worst, std::abs(s - expected) / expected);
  // 65 lags each with relative noise ~1/sqrt(n) = 0.004.
  CHECK(worst < 0.1);
}

TEST_CASE("autocorrelation: exponential correlations give a Lorentzian") {
  RandomStream rng(7, 0);
  const double dt = 0.05, tau0 = 1.0;
  const double a = std::exp(-dt / tau0);
  const double innovation = std::sqrt(1 - a * a);
  std::vector<double> x(1 << 21);
  double y = rng.gaussian();
  for (double& v : x) {
    y = a * y + innovation * rng.gaussian();
    v = y;
  }
  const auto res = autocorrelation_spectrum(x, dt, static_cast<long>(8 * tau0 / dt));
  for (std::size_t i = 0; i < res.omega.size(); ++i) {
    const double w = res.omega[i];
    if (std::abs(w) > 3.0 / tau0) continue;
    const double lorentz = 2 * tau0 / (1 + w * w * tau0 * tau0);
    CHECK(std::abs(res.spectrum[i] - lorentz) < 0.05 * lorentz);
  }
}

TEST_CASE("RandomStream: reproducibility and statistics") {
  // Known-answer vectors for Philox4x32-10.
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) ==
        std::array<std::uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        std::array<std::uint32_t, 4>{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});

  RandomStream a(42, 3), b(42, 3);
  for (int i = 0; i < 1000; ++i) REQUIRE(a.gaussian() == b.gaussian());

  RandomStream g(2024, 0);
  const int n = 1'000'000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = g.gaussian();
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / n;
  CHECK(std::abs(mean) < 4e-3);
  CHECK(std::abs(sum2 / n - 1.0) < 4 * std::sqrt(2.0 / n));

  RandomStream s1(2024, 1), s2(2024, 2);
  double cross = 0.0;
  for (int i = 0; i < 100000; ++i) cross += s1.gaussian() * s2.gaussian();
  CHECK(std::abs(cross / 100000) < 4.0 / std::sqrt(100000.0));

  RandomStream u(1, 0);
  for (int i = 0; i < 10000; ++i) {
    const double x = u.uniform();
    REQUIRE(x >= 0.0);
    REQUIRE(x < 1.0);
  }
}

TEST_CASE("richardson_derivative and linear_fit") {
  auto d = richardson_derivative([](double x) { return std::sin(x); }, 0.3, 0.1);
  CHECK(d.value == doctest::Approx(std::cos(0.3)).epsilon(1e-10));
  std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
  auto fit = linear_fit(x, y);
  CHECK(fit.slope == doctest::Approx(2.0));
  CHECK(fit.intercept == doctest::Approx(1.0));
}
