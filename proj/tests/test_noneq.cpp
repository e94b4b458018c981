#include <doctest.h>

#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "statmech/error.hpp"
#include "statmech/noneq.hpp"

using namespace statmech;
using namespace statmech::noneq;
using cd = std::complex<double>;

namespace {

Matrix random_hermitian(long n, std::uint64_t seed, bool real = false) {
  numerics::RandomStream rng(seed, 9);
  Matrix m(n, n);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) m(i, j) = cd(rng.gaussian(), real ? 0.0 : rng.gaussian());
  return 0.5 * (m + m.adjoint());
}

Matrix spin(double z, double x) {
  Matrix h(2, 2);
  h << z, x, x, -z;
  return h;
}

double partition_log(const Matrix& h, double T) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  double z = 0.0;
  for (long i = 0; i < h.rows(); ++i) z += std::exp(-es.eigenvalues()(i) / T);
  return std::log(z);
}

/// Largest eigenvalue of the heat-counting tilted generator, the long-time
/// cumulant generating function of Q = (Q_H − Q_C)/2.
double scgf(const TwoBathModel& m, double chi) {
  const Eigen::MatrixXd wh = m.rates(0), wc = m.rates(1);
  const long n = m.size();
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (long x = 0; x < n; ++x)
    for (long y = 0; y < n; ++y) {
      if (x == y) continue;
      const double dE = m.energies[static_cast<std::size_t>(y)] - m.energies[static_cast<std::size_t>(x)];
      L(y, x) = wh(y, x) * std::exp(0.5 * chi * dE) + wc(y, x) * std::exp(-0.5 * chi * dE);
      L(x, x) -= wh(y, x) + wc(y, x);
    }
  return Eigen::EigenSolver<Eigen::MatrixXd>(L).eigenvalues().real().maxCoeff();
}

TwoBathModel two_level(double th, double tc) {
  TwoBathModel m;
  m.energies = {0.0, 1.0};
  m.hot_coupling = Eigen::MatrixXd::Ones(2, 2);
  m.cold_coupling = Eigen::MatrixXd::Ones(2, 2);
  m.t_hot = th;
  m.t_cold = tc;
  return m;
}

}  // namespace

TEST_CASE("identity protocol does no work") {
  const Matrix h = random_hermitian(4, 1);
  const WorkKernel k = work_distribution(linear_protocol(h, h, 2.0), 0.7);
  double off = 0.0;
  for (std::size_t i = 0; i < k.work.size(); ++i)
    if (std::abs(k.work[i]) > 1e-9) off += k.weight[i];
  CHECK(off < 1e-12);
  CHECK(std::accumulate(k.weight.begin(), k.weight.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(jarzynski_estimate(k).free_energy) < 1e-12);
}

TEST_CASE("sudden quench of a two-level system") {
  const double z0 = 1.0, x0 = 0.3, z1 = -0.4, x1 = 0.9, T = 0.8;
  const WorkKernel k = work_distribution(linear_protocol(spin(z0, x0), spin(z1, x1), 0.0), T);
  // Eigenvectors of zσ_z + xσ_x are rotations by θ = atan2(x, z) about y.
  const double ta = std::atan2(x0, z0), tb = std::atan2(x1, z1);
  const double stay = std::pow(std::cos(0.5 * (ta - tb)), 2);
  const double ea = std::hypot(z0, x0), eb = std::hypot(z1, x1);
  const double pa_low = 1.0 / (1.0 + std::exp(-2.0 * ea / T));
  // Index 0 is the lower level at both ends.
  CHECK(k.transition(0, 0) == doctest::Approx(stay).epsilon(1e-13));
  CHECK(k.transition(1, 1) == doctest::Approx(stay).epsilon(1e-13));
  CHECK(k.transition(1, 0) == doctest::Approx(1.0 - stay).epsilon(1e-13));
  CHECK(k.transition(0, 1) == doctest::Approx(1.0 - stay).epsilon(1e-13));
  CHECK(k.initial_populations(0) == doctest::Approx(pa_low).epsilon(1e-14));
  CHECK(k.work[0] == doctest::Approx(-eb + ea));  // m = 0, n = 0
  CHECK(k.work[1] == doctest::Approx(-eb - ea));  // m = 0, n = 1
  CHECK(k.work[2] == doctest::Approx(eb + ea));   // m = 1, n = 0
  CHECK(k.work[3] == doctest::Approx(eb - ea));
  CHECK(k.weight[2] == doctest::Approx(pa_low * (1.0 - stay)).epsilon(1e-13));
}

TEST_CASE("slow driving follows the instantaneous levels") {
  Protocol p = linear_protocol(spin(1.0, 0.2), spin(-0.5, 1.0), 60.0);
  p.schedule = [](double u) { return u * u * (3.0 - 2.0 * u); };
  const WorkKernel k = work_distribution(p, 1.0);
  double off = 0.0;
  for (long m = 0; m < 2; ++m)
    for (long n = 0; n < 2; ++n)
      if (m != n) off += k.initial_populations(n) * k.transition(m, n);
  CHECK(off < 1e-3);
  CHECK(k.transition(0, 0) > 0.999);
}

TEST_CASE("evolution is unitary and the kernel doubly stochastic") {
  for (std::uint64_t seed : {3u, 4u, 5u}) {
    Protocol p = linear_protocol(random_hermitian(5, seed), random_hermitian(5, seed + 100), 1.7);
    const Matrix U = evolution_operator(p);
    CHECK((U.adjoint() * U - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(work_distribution(p, 0.9).stochasticity_error() < 1e-10);
  }
}

TEST_CASE("long protocols stay unitary to round-off") {
  Protocol p = linear_protocol(spin(1.0, 0.2), spin(-0.6, 0.9), 200.0);
  const Matrix U = evolution_operator(p);
  CHECK((U.adjoint() * U - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
  const WorkKernel k = work_distribution(p, 0.7);
  double avg = 0.0;
  for (std::size_t i = 0; i < k.work.size(); ++i) avg += k.weight[i] * std::exp(-k.work[i] / 0.7);
  CHECK(std::abs(avg - std::exp(-k.free_energy / 0.7)) < 1e-13);
}

TEST_CASE("Magnus propagation converges with the step count") {
  Protocol p = linear_protocol(random_hermitian(3, 8), random_hermitian(3, 9), 2.0);
  const Matrix fine = evolution_operator(p, {4000});
  const Matrix coarse = evolution_operator(p, {200});
  const Matrix auto_steps = evolution_operator(p);
  CHECK((fine - coarse).cwiseAbs().maxCoeff() < 1e-6);
  CHECK((fine - auto_steps).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("Crooks relation on exact kernels") {
  const double T = 0.6;
  SUBCASE("complex driving") {
    Protocol p = linear_protocol(random_hermitian(4, 21), random_hermitian(4, 22), 0.8);
    const WorkKernel f = work_distribution(p, T);
    const WorkKernel r = work_distribution(p.reversed(), T);
    CHECK(r.free_energy == doctest::Approx(-f.free_energy).epsilon(1e-12));
    const CrooksCheck c = crooks_check(f, r);
    CHECK(c.work.size() >= 8);
    CHECK(c.residual < 1e-10);
  }
  SUBCASE("closed cycle gives e^{W/T}") {
    const Matrix h0 = spin(1.0, 0.0), v = spin(0.0, 1.3);
    Protocol p;
    p.interpolation = Interpolation::Custom;
    p.family = [&](double l) { return Matrix(h0 + std::sin(numerics::kPi * l) * v); };
    p.duration = 1.1;
    const WorkKernel f = work_distribution(p, T);
    CHECK(std::abs(f.free_energy) < 1e-14);
    const CrooksCheck c = crooks_check(f, work_distribution(p.reversed(), T));
    for (std::size_t i = 0; i < c.work.size(); ++i)
      CHECK(c.log_ratio[i] == doctest::Approx(c.work[i] / T).epsilon(1e-9));
  }
  SUBCASE("mismatched reverse support") {
    Protocol p = linear_protocol(spin(1.0, 0.5), spin(-1.0, 0.2), 0.5);
    Protocol other = linear_protocol(spin(2.0, 0.5), spin(-1.0, 0.2), 0.5);
    try {
      crooks_check(work_distribution(p, T), work_distribution(other.reversed(), T));
      FAIL("expected SupportMismatch");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::SupportMismatch);
    }
  }
}

TEST_CASE("Crooks relation from sampled work") {
  const double T = 1.0;
  Protocol p = linear_protocol(spin(0.8, 0.1), spin(-0.3, 0.7), 0.6);
  const WorkKernel f = work_distribution(p, T), r = work_distribution(p.reversed(), T);
  numerics::RandomStream rng(77, 0);
  const WorkSampleSet sf = sample_work(f, 10'000, rng);
  const WorkSampleSet sr = sample_work(r, 10'000, rng);
  const CrooksCheck c = crooks_check(sf, sr);
  REQUIRE(c.work.size() >= 2);
  CHECK(c.max_z < 4.0);
  CHECK(c.free_energy == doctest::Approx(f.free_energy));
}

TEST_CASE("Jarzynski estimator") {
  const double T = 0.5;
  const Matrix a = random_hermitian(6, 31, true), b = random_hermitian(6, 32, true);
  const double exact = -T * (partition_log(b, T) - partition_log(a, T));

  SUBCASE("exact kernel is independent of the driving speed") {
    for (double tf : {0.0, 0.3, 3.0, 30.0}) {
      const JarzynskiEstimate j = jarzynski_estimate(work_distribution(linear_protocol(a, b, tf), T));
      CHECK(j.free_energy == doctest::Approx(exact).epsilon(1e-12));
      CHECK(j.max_work_principle);
      CHECK(j.mean_work >= j.free_energy - 1e-12);
    }
  }
  SUBCASE("sampled estimate with jackknife error") {
    const WorkKernel k = work_distribution(linear_protocol(a, b, 0.4), T);
    numerics::RandomStream rng(5, 1);
    WorkSampleSet s = sample_work(k, 20'000, rng);
    const JarzynskiEstimate j = jarzynski_estimate(s);
    CHECK(j.error > 0.0);
    CHECK(std::abs(j.free_energy - exact) < 5.0 * j.error + std::abs(j.bias));
    CHECK(j.max_work_principle);
    CHECK(j.dissipated >= 0.0);
  }
  SUBCASE("identity protocol") {
    WorkSampleSet s;
    s.samples.assign(50, 0.0);
    s.beta = 2.0;
    CHECK(std::abs(jarzynski_estimate(s).free_energy) < 1e-15);
  }
}

TEST_CASE("beta-symmetric distributions") {
  SUBCASE("Gaussian with mean ½βσ²") {
    const double beta = 1.5, sigma = 0.8, mu = 0.5 * beta * sigma * sigma;
    numerics::RandomStream rng(13, 0);
    std::vector<double> s(100'000);
    for (auto& v : s) v = mu + sigma * rng.gaussian();
    const BetaSymmetry b = beta_symmetry(s, beta);
    CHECK(std::abs(b.gaussian_residual) < 3.0 * b.gaussian_error);
    CHECK(b.symmetry_residual < 0.01);
    CHECK(std::abs(b.convex_average) < 0.01);
    // Exact Gaussian cumulant generating function −μλ + ½σ²λ².
    for (std::size_t i = 0; i < b.lambda.size(); ++i) {
      const double l = b.lambda[i];
      CHECK(b.g[i] == doctest::Approx(-mu * l + 0.5 * sigma * sigma * l * l).epsilon(0.01).scale(1.0));
    }
  }
  SUBCASE("symmetric distribution at β = 0") {
    const BetaSymmetry b = beta_symmetry({-2.0, -0.5, 0.5, 2.0}, {0.1, 0.4, 0.4, 0.1}, 0.0, 21, 1.0);
    CHECK(b.lambda.front() == doctest::Approx(-1.0));
    CHECK(b.symmetry_residual < 1e-14);
    CHECK(std::abs(b.mean) < 1e-15);
  }
  SUBCASE("closed-cycle work kernel") {
    const double T = 0.7;
    const Matrix h0 = spin(0.6, 0.2), v = spin(0.3, 1.0);
    Protocol p;
    p.interpolation = Interpolation::Custom;
    p.family = [&](double l) { return Matrix(h0 + std::sin(numerics::kPi * l) * v); };
    p.duration = 0.9;
    const WorkKernel k = work_distribution(p, T);
    const BetaSymmetry b = beta_symmetry(k.work, k.weight, 1.0 / T);
    CHECK(b.symmetry_residual < 1e-10);
    CHECK(std::abs(b.convex_average) < 1e-12);
    CHECK(b.mean > 0.0);
  }
  SUBCASE("extreme tails") {
    try {
      beta_symmetry(std::vector<double>{1.0, 2000.0}, 1.0);
      FAIL("expected OverflowGuard");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Overflow);
    }
  }
}

TEST_CASE("trajectory entropy production matches the path probability ratio") {
  TwoBathModel m;
  m.energies = {0.0, 0.7, 1.5};
  m.hot_coupling = (Eigen::MatrixXd(3, 3) << 0, 1.0, 0.3, 1.0, 0, 0.8, 0.3, 0.8, 0).finished();
  m.cold_coupling = (Eigen::MatrixXd(3, 3) << 0, 0.5, 1.2, 0.5, 0, 0.4, 1.2, 0.4, 0).finished();
  m.t_hot = 2.0;
  m.t_cold = 0.5;
  numerics::RandomStream rng(4, 4);
  long checked = 0;
  for (long x0 = 0; x0 < 3; ++x0)
    for (long x1 = 0; x1 < 3; ++x1)
      for (long x2 = 0; x2 < 3; ++x2)
        for (long x3 = 0; x3 < 3; ++x3) {
          if (x1 == x0 || x2 == x1 || x3 == x2) continue;
          for (int labels = 0; labels < 8; ++labels) {
            const std::vector<Jump> fwd{{x0, x1, labels & 1}, {x1, x2, (labels >> 1) & 1}, {x2, x3, (labels >> 2) & 1}};
            const std::vector<Jump> rev{{x3, x2, fwd[2].bath}, {x2, x1, fwd[1].bath}, {x1, x0, fwd[0].bath}};
            std::vector<double> dwell(4);
            for (auto& d : dwell) d = rng.exponential(1.0);
            const std::vector<double> back(dwell.rbegin(), dwell.rend());
            const double lhs = path_log_weight(m, fwd, dwell) - path_log_weight(m, rev, back);
            CHECK(lhs == doctest::Approx(entropy_production(m, fwd)).epsilon(1e-12));
            ++checked;
          }
        }
  CHECK(checked == 3 * 2 * 2 * 2 * 8);
}

TEST_CASE("tilted generator obeys the fluctuation symmetry") {
  const TwoBathModel m = two_level(1.3, 0.7);
  for (double chi : {-0.9, -0.3, 0.2, 0.6}) CHECK(scgf(m, chi) == doctest::Approx(scgf(m, -m.affinity() - chi)).epsilon(1e-10));
}

TEST_CASE("heat conduction at equal temperatures") {
  const TwoBathModel m = two_level(1.0, 1.0);
  const HeatConduction h = heat_conduction_ft(m, 30.0, 10'000, numerics::RandomStream(123, 0));
  CHECK(std::abs(h.mean) < 3.0 * h.mean_error);
  const auto& c = h.histogram.counts;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double a = static_cast<double>(c[k]), b = static_cast<double>(c[c.size() - 1 - k]);
    if (a + b >= 100) CHECK(std::abs(a - b) < 4.0 * std::sqrt(a + b));
  }
  CHECK(std::isnan(h.conductance));
}

TEST_CASE("heat conduction fluctuation theorem") {
  const TwoBathModel m = two_level(1.25, 0.75);
  const HeatConduction h = heat_conduction_ft(m, 40.0, 10'000, numerics::RandomStream(9, 0));
  REQUIRE(h.ft_heat.size() >= 3);
  CHECK(h.ft_slope == doctest::Approx(m.affinity()).epsilon(0.10));
  CHECK(std::abs(h.ft_slope - m.affinity()) < 4.0 * h.ft_slope_error + 0.03 * m.affinity());

  // Long-time mean and variance rates from the tilted generator.
  const double d = 1e-3;
  const double rate = (scgf(m, d) - scgf(m, -d)) / (2 * d);
  const double nu = (scgf(m, d) - 2 * scgf(m, 0.0) + scgf(m, -d)) / (d * d);
  CHECK(h.mean / 40.0 == doctest::Approx(rate).epsilon(0.05));
  CHECK(h.intensity == doctest::Approx(nu).epsilon(0.08));
}

TEST_CASE("thermal conductance in linear response") {
  const double T = 1.0, t = 100.0;
  std::vector<double> K;
  for (double eps : {0.1, 0.2}) {
    const TwoBathModel m = two_level(T + 0.5 * eps, T - 0.5 * eps);
    const HeatConduction h = heat_conduction_ft(m, t, 10'000, numerics::RandomStream(31, static_cast<std::uint64_t>(eps * 10)));
    K.push_back(h.conductance);
    CHECK(h.conductance == doctest::Approx(h.conductance_from_noise).epsilon(0.15));
  }
  CHECK(K[0] == doctest::Approx(K[1]).epsilon(0.10));
}

TEST_CASE("trajectory ensembles do not depend on the thread count") {
  const TwoBathModel m = two_level(1.4, 0.6);
  HeatConductionOptions one, many;
  one.threads = 1;
  many.threads = 5;
  const auto a = heat_conduction_ft(m, 5.0, 300, numerics::RandomStream(2, 0), one);
  const auto b = heat_conduction_ft(m, 5.0, 300, numerics::RandomStream(2, 0), many);
  CHECK(a.heat == b.heat);
}
