#include <doctest.h>

#include <cmath>

#include "statmech/ising.hpp"

using namespace statmech;
using namespace statmech::ising;

namespace {

const double kPi = std::acos(-1.0);

IsingParams params(double eps, double h, double T, int c = 4) { return {eps, h, T, c, 0}; }

// Independent brute force over 2^N with explicit spin arrays.
double brute_lnZ(int n, double be, double bh, bool ring) {
  double z = 0.0;
  for (int cfg = 0; cfg < (1 << n); ++cfg) {
    std::vector<int> s(n);
    for (int i = 0; i < n; ++i) s[i] = (cfg >> i) & 1 ? 1 : -1;
    double e = 0.0;
    for (int i = 0; i + 1 < n; ++i) e += be * s[i] * s[i + 1];
    if (ring) e += be * s[n - 1] * s[0];
    for (int i = 0; i < n; ++i) e += bh * s[i];
    z += std::exp(e);
  }
  return std::log(z);
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(std::abs(y[i])));
  }
  return numerics::linear_fit(lx, ly).slope;
}

}  // namespace

TEST_CASE("1D Ising transfer matrix") {
  for (int n : {2, 3, 5, 8}) {
    for (double be : {-0.7, 0.0, 0.3, 1.2}) {
      const double T = 1.3;
      const auto ring = ising1d_solve(params(be * T, 0.0, T), n, true);
      CHECK(ring.lnZ == doctest::Approx(std::log(std::pow(2 * std::cosh(be), n) + std::pow(2 * std::sinh(be), n))).epsilon(1e-13));
      const auto open = ising1d_solve(params(be * T, 0.0, T), n, false);
      CHECK(open.lnZ == doctest::Approx(std::log(2.0) + (n - 1) * std::log(2 * std::cosh(be))).epsilon(1e-13));
    }
  }
  CHECK(ising1d_solve(params(0.3, 0.2, 1.0), 4, true).lnZ == doctest::Approx(brute_lnZ(4, 0.3, 0.2, true)).epsilon(1e-13));

  for (int n = 2; n <= 10; ++n) {
    for (double be : {-0.8, -0.2, 0.0, 0.5, 1.1}) {
      for (double bh : {-0.6, -0.1, 0.0, 0.3, 0.9}) {
        for (bool ring : {true, false}) {
          const auto p = params(be, bh, 1.0);
          const double ref = brute_lnZ(n, be, bh, ring);
          CHECK(std::abs(ising1d_solve(p, n, ring).lnZ - ref) < 1e-11);
          CHECK(std::abs(ising1d_enumerate(p, n, ring) - ref) < 1e-11);
        }
      }
    }
  }

  // Free spins.
  const double T = 0.8, h = 0.5;
  const auto free = ising1d_solve(params(0.0, h, T), 6, true);
  CHECK(free.F_thermodynamic == doctest::Approx(-6 * T * std::log(2 * std::cosh(h / T))).epsilon(1e-14));
  CHECK(free.correlation(0) == 1.0);
  CHECK(free.correlation(1) == doctest::Approx(0.0));
  CHECK(ising1d_solve(params(0.0, 0.0, T), 6, true).susceptibility == doctest::Approx(1 / T));
}

TEST_CASE("1D Ising response and correlations") {
  const double eps = 0.6, T = 0.9;
  const auto s = ising1d_solve(params(eps, 0.0, T), 50, true);
  CHECK(s.susceptibility == doctest::Approx(std::exp(2 * eps / T) / T).epsilon(1e-13));
  CHECK(s.correlation_length == doctest::Approx(1 / std::log(1 / std::tanh(eps / T))).epsilon(1e-13));
  CHECK(s.correlation(3) == doctest::Approx(std::pow(std::tanh(eps / T), 3)).epsilon(1e-13));
  // Two-sided sum of g(r) reproduces χT = e^{2ε/T}.
  const int R = static_cast<int>(50 * s.correlation_length);
  double sum = 0.0;
  for (int r = -R; r <= R; ++r) sum += s.correlation(r);
  CHECK(std::abs(sum - std::exp(2 * eps / T)) < 1e-6 * std::exp(2 * eps / T));

  // Magnetisation against a finite-difference derivative of the thermodynamic free energy.
  const double h = 0.17, dh = 1e-5;
  const auto fe = [&](double hh) { return ising1d_solve(params(eps, hh, T), 10, true).F_thermodynamic / 10; };
  const double m_fd = -(fe(h + dh) - fe(h - dh)) / (2 * dh);
  const auto mh = ising1d_solve(params(eps, h, T), 10, true);
  CHECK(mh.magnetization == doctest::Approx(m_fd).epsilon(1e-8));
  const auto m = [&](double hh) { return ising1d_solve(params(eps, hh, T), 10, true).magnetization; };
  CHECK(mh.susceptibility == doctest::Approx((m(h + dh) - m(h - dh)) / (2 * dh)).epsilon(1e-7));

  // Antiferromagnetic coupling gives alternating correlations.
  const auto af = ising1d_solve(params(-0.5, 0.0, 1.0), 20, true);
  CHECK(af.correlation(1) < 0.0);
  CHECK(af.correlation(2) > 0.0);
}

TEST_CASE("Onsager solution") {
  const auto crit = onsager2d_tc();
  CHECK(crit.eps_tilde == doctest::Approx(0.5 * std::log(1 + std::sqrt(2.0))).epsilon(1e-15));
  CHECK(std::abs(crit.eps_tilde - 0.4407) < 1e-4);
  CHECK(std::abs(crit.Tc_over_eps - 2.269) < 1e-3);

  CHECK(onsager2d(0.0).lnZ_per_site == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  // Weak coupling: closed loops of length 4 and 6 in the high-temperature expansion.
  const double small = 0.05, t = std::tanh(small);
  const double series = std::log(2.0) + 2 * std::log(std::cosh(small)) + std::pow(t, 4) + 2 * std::pow(t, 6);
  CHECK(std::abs(onsager2d(small).lnZ_per_site - series) < 1e-9);
  // Strong coupling: ground state energy 2ε per site.
  const double big = 5.0;
  CHECK(onsager2d(big).lnZ_per_site == doctest::Approx(2 * big).epsilon(1e-10));

  double prev = 0.0;
  for (double e = 0.0; e <= 2.0; e += 0.01) {
    const auto o = onsager2d(e);
    CHECK(o.kappa <= 1.0 + 1e-15);
    if (std::abs(e - crit.eps_tilde) > 0.01) CHECK(o.kappa < 1.0);
    CHECK(o.lnZ_per_site >= prev);
    prev = o.lnZ_per_site;
  }
  CHECK(onsager2d(crit.eps_tilde).kappa == doctest::Approx(1.0).epsilon(1e-15));

  for (double e : {0.2, 0.4, crit.eps_tilde, 0.7}) {
    CHECK(onsager2d_tensor(e).lnZ_per_site == doctest::Approx(onsager2d(e).lnZ_per_site).epsilon(1e-9));
  }

  const double peak = onsager2d_heat_capacity_peak(crit.eps_tilde - 0.01, crit.eps_tilde + 0.01, 1e-4, 1e-4);
  CHECK(std::abs(peak - crit.eps_tilde) < 1e-3);
}

TEST_CASE("mean-field magnetisation") {
  const double eps = 0.25;
  const int c = 4;
  const double tc = c * eps;

  const auto above = mean_field_magnetization(params(eps, 0.0, 1.5 * tc, c));
  CHECK(above.solutions.size() == 1);
  CHECK(above.magnetization == 0.0);
  CHECK(above.heat_capacity == 0.0);
  CHECK_FALSE(above.symmetry_broken);

  const auto below = mean_field_magnetization(params(eps, 0.0, 0.6 * tc, c));
  CHECK(below.solutions.size() == 3);
  CHECK(below.symmetry_broken);
  CHECK(below.minima.size() == 2);
  CHECK(below.magnetization > 0.0);
  CHECK(below.magnetization == doctest::Approx(std::tanh(tc * below.magnetization / (0.6 * tc))).epsilon(1e-14));
  CHECK(mean_field_magnetization(params(eps, -0.0, 0.6 * tc, c)).magnetization == doctest::Approx(-below.magnetization));
  CHECK(below.energy == doctest::Approx(-0.5 * tc * below.magnetization * below.magnetization));

  // Field selects the branch; the metastable pair shows up below the spinodal.
  const auto fielded = mean_field_magnetization(params(eps, 0.01, 0.6 * tc, c));
  CHECK(fielded.solutions.size() == 3);
  CHECK(fielded.magnetization > 0.0);
  CHECK_FALSE(fielded.symmetry_broken);
  CHECK(mean_field_magnetization(params(eps, -0.01, 0.6 * tc, c)).magnetization == doctest::Approx(-fielded.magnetization));
  for (double m : fielded.solutions) {
    CHECK(m == doctest::Approx(std::tanh((0.01 + tc * m) / (0.6 * tc))).epsilon(1e-13));
  }
  CHECK(mean_field_magnetization(params(eps, 0.5, 0.6 * tc, c)).solutions.size() == 1);

  // Curie-Weiss law.
  const double T = 1.4 * tc;
  for (double h : {1e-5, 1e-4}) {
    const auto r = mean_field_magnetization(params(eps, h * (T - tc), T, c));
    CHECK(std::abs(r.magnetization / h - 1.0) < 0.02);
  }
  // Critical isotherm m ≈ (3h/Tc)^{1/3}.
  for (double h : {1e-6, 1e-5}) {
    const auto r = mean_field_magnetization(params(eps, h, tc, c));
    CHECK(std::abs(r.magnetization / std::cbrt(3 * h / tc) - 1.0) < 0.02);
  }
  // Heat capacity jump of 3/2 at Tc.
  const double c_below = mean_field_magnetization(params(eps, 0.0, tc * (1 - 1e-6), c)).heat_capacity;
  CHECK(c_below == doctest::Approx(1.5).epsilon(1e-4));
}

TEST_CASE("mean-field exponents from sweeps") {
  const double eps = 1.0;
  const int c = 4;
  const double tc = c * eps;
  std::vector<double> t, m, chi, h, mc;
  for (double x : {1e-5, 3e-5, 1e-4, 3e-4, 1e-3}) {
    t.push_back(x);
    m.push_back(mean_field_magnetization(params(eps, 0.0, tc * (1 - x), c)).magnetization);
    chi.push_back(mean_field_magnetization(params(eps, 0.0, tc * (1 + x), c)).susceptibility);
  }
  for (double x : {1e-9, 1e-8, 1e-7, 1e-6}) {
    h.push_back(x);
    mc.push_back(mean_field_magnetization(params(eps, x, tc, c)).magnetization);
  }
  CHECK(std::abs(slope(t, m) - 0.5) < 0.02);
  CHECK(std::abs(-slope(t, chi) - 1.0) < 0.02);
  CHECK(std::abs(1.0 / slope(h, mc) - 3.0) < 0.05);
}

TEST_CASE("antiferromagnet") {
  const double eps = 0.5;
  const int c = 4;
  const double tc = c * eps;
  const auto hot = antiferro_mean_field(params(eps, 0.0, 1.3 * tc, c));
  CHECK(hot.M == doctest::Approx(0.0));
  CHECK(hot.Ms == doctest::Approx(0.0));
  CHECK(hot.susceptibility == doctest::Approx(1 / (tc + 1.3 * tc)).epsilon(1e-12));

  // Staggered order follows the ferromagnetic equation.
  const double T = 0.7 * tc;
  const auto cold = antiferro_mean_field(params(eps, 0.0, T, c));
  const auto ferro = mean_field_magnetization(params(eps, 0.0, T, c));
  CHECK(cold.Ms == doctest::Approx(ferro.magnetization).epsilon(1e-12));
  CHECK(cold.M == doctest::Approx(0.0));
  CHECK(cold.susceptibility ==
        doctest::Approx(1 / (tc + T * std::pow(std::cosh(tc / T * cold.Ms), 2))).epsilon(1e-12));

  const double near = tc * (1 - 1e-4);
  CHECK(antiferro_mean_field(params(eps, 0.0, near, c)).susceptibility == doctest::Approx(1 / (4 * tc - 2 * near)).epsilon(1e-3));

  const auto strong = antiferro_mean_field(params(eps, 1.5 * tc, 0.02 * tc, c));
  CHECK(strong.Ms == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(strong.M == doctest::Approx(1.0).epsilon(1e-10));
  const auto weak = antiferro_mean_field(params(eps, 0.3 * tc, 0.02 * tc, c));
  CHECK(weak.Ms == doctest::Approx(1.0).epsilon(1e-6));

  // A field on the ordered phase: both equations hold.
  const auto mixed = antiferro_mean_field(params(eps, 0.2 * tc, 0.5 * tc, c));
  CHECK(mixed.Ma == doctest::Approx(std::tanh((0.2 * tc - tc * mixed.Mb) / (0.5 * tc))).epsilon(1e-12));
  CHECK(mixed.Mb == doctest::Approx(std::tanh((0.2 * tc - tc * mixed.Ma) / (0.5 * tc))).epsilon(1e-12));
  CHECK(mixed.Ms > 0.0);
  CHECK(mixed.M > 0.0);
}

TEST_CASE("Bragg-Williams landscapes") {
  const double eps = 0.25;
  const int c = 4;
  CHECK(bragg_williams_action(0.0, params(eps, 0.0, 0.8, c)) == 0.0);
  CHECK_THROWS_AS(variational_free_energy(1.0, params(eps, 0.0, 0.8, c)), Error);

  for (double T : {0.5, 0.9, 1.2}) {
    for (double h : {0.0, 0.03, -0.2}) {
      const auto p = params(eps, h, T, c);
      CHECK(bragg_williams_minimizer(p, true) == doctest::Approx(mean_field_magnetization(p).magnetization).epsilon(1e-8));
      // Stationarity h = T atanh M − cεM.
      const double M = bragg_williams_minimizer(p, true);
      CHECK(T * std::atanh(M) - c * eps * M == doctest::Approx(h).epsilon(1e-10));
    }
  }
  // Entropy at M = 0 is ln 2 per site.
  const double T = 0.7, dT = 1e-5;
  const auto a0 = [&](double tt) { return variational_free_energy(0.0, params(eps, 0.0, tt, c)); };
  CHECK(-(a0(T + dT) - a0(T - dT)) / (2 * dT) == doctest::Approx(std::log(2.0)).epsilon(1e-9));

  // Quartic and exact minimisers agree to higher order near Tc.
  const double tc = c * eps;
  for (double x : {1e-2, 3e-3, 1e-3}) {
    const auto p = params(eps, 0.0, tc * (1 - x), c);
    const double me = bragg_williams_minimizer(p, true);
    const double mq = bragg_williams_minimizer(p, false);
    CHECK(std::abs(me - mq) < std::pow(me, 3));
  }
  // The quartic form's derivative vanishes at its minimiser.
  const auto p = params(eps, 0.02, 0.9, c);
  const double mq = bragg_williams_minimizer(p, false);
  const double da = (bragg_williams_action(mq + 1e-6, p) - bragg_williams_action(mq - 1e-6, p)) / 2e-6;
  CHECK(std::abs(da) < 1e-8);
}

TEST_CASE("Lee-Yang zeros") {
  const auto free = lee_yang_zeros(8, 0.0, Geometry::Ring);
  CHECK(free.roots.size() == 8);
  for (const auto& z : free.roots) CHECK(z == std::complex<double>(-1.0, 0.0));
  // Coefficients are binomial.
  CHECK(free.coefficients[4] / free.coefficients[0] == doctest::Approx(70.0));

  for (double be : {0.1, 0.3, 0.7, 1.5}) {
    const auto ly = lee_yang_zeros(8, be, Geometry::Ring);
    CHECK(ly.roots.size() == 8);
    for (double m : ly.moduli) CHECK(std::abs(m - 1.0) < 1e-8);
  }
  for (auto g : {Geometry::Chain, Geometry::Complete}) {
    const auto ly = lee_yang_zeros(7, 0.4, g);
    for (double m : ly.moduli) CHECK(std::abs(m - 1.0) < 1e-7);
  }

  // Polynomial evaluation reproduces the direct partition function.
  for (double beta : {0.5, 2.0}) {
    const double eps = 0.35, h = 0.21;
    const auto ly = lee_yang_zeros(8, beta * eps, Geometry::Ring, beta);
    CHECK(ly.lnZ(h) == doctest::Approx(brute_lnZ(8, beta * eps, beta * h, true)).epsilon(1e-13));
    CHECK(ly.lnZ(h) == doctest::Approx(ising1d_solve(params(eps, h, 1 / beta), 8, true).lnZ).epsilon(1e-13));
  }
}

TEST_CASE("Ornstein-Zernike") {
  const double xi = 1.7;
  CHECK(ornstein_zernike(0.0, xi) == doctest::Approx(xi * xi));
  CHECK(ornstein_zernike(2.0, numerics::kInf) == doctest::Approx(0.25));
  for (double r : {0.5, 2.0, 5 * xi}) {
    const double closed = std::exp(-r / xi) / (4 * kPi * r);
    CHECK(ornstein_zernike_real(r, xi, 3) == doctest::Approx(closed).epsilon(1e-13));
    CHECK(std::abs(ornstein_zernike_inverse_3d(r, xi) / closed - 1.0) < 1e-2);
  }
  CHECK(std::abs(ornstein_zernike_inverse_3d(2.0, xi) / (std::exp(-2.0 / xi) / (8 * kPi)) - 1.0) < 1e-6);
  CHECK(ornstein_zernike_real(1.0, xi, 1) == doctest::Approx(0.5 * xi * std::exp(-1.0 / xi)).epsilon(1e-13));
  CHECK(ornstein_zernike_real(3.0, numerics::kInf, 3) == doctest::Approx(1 / (12 * kPi)).epsilon(1e-14));
  CHECK(ornstein_zernike_real(2.0, numerics::kInf, 5) * 8 == doctest::Approx(ornstein_zernike_real(1.0, numerics::kInf, 5)).epsilon(1e-13));
  // Long correlation length approaches the critical power law.
  CHECK(ornstein_zernike_real(1.0, 1e8, 3) == doctest::Approx(ornstein_zernike_real(1.0, numerics::kInf, 3)).epsilon(1e-7));

  // Gaussian-fluctuation integral ∝ r^{(d−4)/2} for d < 4.
  for (double d : {1.0, 2.5, 3.0}) {
    std::vector<double> rs{1e-6, 1e-5, 1e-4}, vals;
    for (double r : rs) vals.push_back(gaussian_fluctuation_integral(r, d, 1.0));
    CHECK(std::abs(slope(rs, vals) - (d - 4) / 2) < 5e-3);
  }
}

TEST_CASE("RG flow") {
  const auto fps = rg_fixed_points(3.0);
  CHECK(fps.nontrivial.u == doctest::Approx(1.0 / 9).epsilon(1e-15));
  CHECK(fps.u_leading_order == doctest::Approx(1.0 / 9));
  CHECK(fps.r_leading_order == doctest::Approx(-1.0 / 6));
  const auto b = rg_beta(fps.nontrivial.r, fps.nontrivial.u, 3.0);
  CHECK(std::abs(b[0]) < 1e-15);
  CHECK(std::abs(b[1]) < 1e-15);
  CHECK(fps.gaussian.relevant_directions == 2);
  CHECK(fps.nontrivial.relevant_directions == 1);
  CHECK(fps.nontrivial.eigenvalues[0] == doctest::Approx(5.0 / 3));
  CHECK(fps.nontrivial.eigenvalues[1] == doctest::Approx(-1.0));

  const auto still = rg_flow({fps.nontrivial.r, fps.nontrivial.u, 3.0, 0.0}, 10.0, 0.1);
  for (const auto& pt : still) {
    CHECK(std::abs(pt.r - fps.nontrivial.r) < 1e-10);
    CHECK(std::abs(pt.u - fps.nontrivial.u) < 1e-10);
  }
  CHECK(still.back().tau == doctest::Approx(10.0));

  // Along the irrelevant eigenvector the flow returns; along the relevant one it leaves.
  const auto& ev = fps.nontrivial.eigenvectors;
  const double delta = 1e-5;
  const auto in = rg_flow({fps.nontrivial.r + delta * ev[0][1], fps.nontrivial.u + delta * ev[1][1], 3.0, 0.0}, 2.0, 0.5);
  CHECK(std::hypot(in.back().r - fps.nontrivial.r, in.back().u - fps.nontrivial.u) ==
        doctest::Approx(delta * std::exp(-2.0)).epsilon(1e-2));
  const auto out = rg_flow({fps.nontrivial.r + delta * ev[0][0], fps.nontrivial.u + delta * ev[1][0], 3.0, 0.0}, 3.0, 0.5);
  CHECK(std::hypot(out.back().r - fps.nontrivial.r, out.back().u - fps.nontrivial.u) > 50 * delta);

  // Nontrivial point merges with the Gaussian one linearly as d → 4.
  std::vector<double> gaps, dist;
  for (double g : {1e-1, 1e-2, 1e-3}) {
    const auto f = rg_fixed_points(4 - g).nontrivial;
    gaps.push_back(g);
    dist.push_back(std::hypot(f.r, f.u));
  }
  CHECK(std::abs(slope(gaps, dist) - 1.0) < 0.02);
  CHECK(rg_fixed_points(4.0).nontrivial.u == 0.0);
}

TEST_CASE("critical exponents") {
  const auto mf = exponents_from_scaling(0.5, 0.0, 4.0);
  CHECK(mf.alpha == doctest::Approx(0.0));
  CHECK(mf.beta == doctest::Approx(0.5));
  CHECK(mf.gamma == doctest::Approx(1.0));
  CHECK(mf.delta == doctest::Approx(3.0));

  const auto two = exponents_from_scaling(1.0, 0.25, 2.0);
  CHECK(two.beta == doctest::Approx(0.125));
  CHECK(two.gamma == doctest::Approx(1.75));
  CHECK(two.alpha == doctest::Approx(0.0));
  CHECK(two.delta == doctest::Approx(15.0));
  CHECK(exponents_from_scaling(1.0, 0.25, 2.0, DeltaForm::AsPrinted).delta == doctest::Approx(17.0));

  for (double nu : {0.3, 0.63, 1.1}) {
    for (double eta : {0.0, 0.04, 0.5}) {
      for (double d : {2.5, 3.0, 3.7}) {
        const auto e = exponents_from_scaling(nu, eta, d);
        CHECK(e.alpha + 2 * e.beta + e.gamma == doctest::Approx(2.0).epsilon(1e-14));
      }
    }
  }
  CHECK_THROWS_AS(exponents_from_scaling(1.0, 0.0, 2.0), Error);

  const auto rg = rg_exponents(3.0);
  CHECK(rg.nu == doctest::Approx(0.6));
  CHECK(rg.eta == 0.0);
}
