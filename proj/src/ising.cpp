#include "statmech/ising.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <unsupported/Eigen/Polynomials>

namespace statmech::ising {

namespace {

using numerics::kPi;

// ln(2 cosh x) without overflow.
double log_2cosh(double x) {
  const double a = std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a));
}

double sech2(double x) {
  const double c = std::cosh(x);
  return std::isfinite(c) ? 1.0 / (c * c) : 0.0;
}

double log_sum_exp(const std::vector<double>& v) {
  const double m = *std::max_element(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

// x ln x with the continuous extension at 0.
double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

}  // namespace

void IsingParams::validate() const {
  require(T > 0.0 && std::isfinite(T), ErrorKind::Domain, "ising: T must be positive");
  require(std::isfinite(eps) && std::isfinite(h), ErrorKind::Domain, "ising: non-finite coupling or field");
  require(coordination >= 1, ErrorKind::Domain, "ising: coordination number must be >= 1");
}

// ---------------------------------------------------------------------------
// 1D chain

std::array<std::array<double, 2>, 2> TransferMatrix1D::entries() const {
  return {{{std::exp(eps_tilde + h_tilde), std::exp(-eps_tilde)},
           {std::exp(-eps_tilde), std::exp(eps_tilde - h_tilde)}}};
}

double TransferMatrix1D::lambda_plus() const {
  const double sh = std::sinh(h_tilde);
  return std::exp(eps_tilde) * std::cosh(h_tilde) +
         std::sqrt(std::exp(2.0 * eps_tilde) * sh * sh + std::exp(-2.0 * eps_tilde));
}

double TransferMatrix1D::lambda_minus() const {
  // det T = 2 sinh 2ε̃ = λ₊λ₋.
  return 2.0 * std::sinh(2.0 * eps_tilde) / lambda_plus();
}

double Ising1D::correlation(int r) const {
  if (lambda_plus == 0.0) return 0.0;
  return std::pow(lambda_minus / lambda_plus, std::abs(r));
}

Ising1D ising1d_solve(const IsingParams& p, int n_sites, bool ring) {
  p.validate();
  require(n_sites >= 2, ErrorKind::Domain, "ising1d_solve: need at least 2 sites");
  const TransferMatrix1D tm{p.eps / p.T, p.h / p.T};
  Ising1D out;
  out.lambda_plus = tm.lambda_plus();
  out.lambda_minus = tm.lambda_minus();
  const double ratio = out.lambda_minus / out.lambda_plus;
  const double log_lp = std::log(out.lambda_plus);
  const int n = n_sites;
  if (ring) {
    out.lnZ = n * log_lp + std::log1p(std::pow(ratio, n));
  } else {
    const auto t = tm.entries();
    const double a = t[0][0], b = t[0][1];
    const std::array<double, 2> vp{b, out.lambda_plus - a};
    const std::array<double, 2> vm{a - out.lambda_plus, b};
    const double norm = std::hypot(vp[0], vp[1]);
    const std::array<double, 2> edge{std::exp(0.5 * tm.h_tilde), std::exp(-0.5 * tm.h_tilde)};
    const double cp = (edge[0] * vp[0] + edge[1] * vp[1]) / norm;
    const double cm = (edge[0] * vm[0] + edge[1] * vm[1]) / norm;
    out.lnZ = (n - 1) * log_lp + std::log(cp * cp + std::pow(ratio, n - 1) * cm * cm);
  }
  out.F = -p.T * out.lnZ;
  out.F_thermodynamic = -n * p.T * log_lp;

  const double sh = std::sinh(tm.h_tilde);
  const double w = std::exp(-4.0 * tm.eps_tilde);
  const double root = std::sqrt(sh * sh + w);
  out.magnetization = sh / root;
  out.susceptibility = std::cosh(tm.h_tilde) * w / (root * root * root) / p.T;
  out.correlation_length = ratio == 0.0 ? 0.0 : 1.0 / std::log(1.0 / std::abs(ratio));
  return out;
}

double ising1d_enumerate(const IsingParams& p, int n_sites, bool ring) {
  p.validate();
  require(n_sites >= 2 && n_sites <= 24, ErrorKind::Domain, "ising1d_enumerate: need 2 <= N <= 24");
  const double be = p.eps / p.T, bh = p.h / p.T;
  std::vector<double> logs;
  logs.reserve(std::size_t{1} << n_sites);
  for (unsigned long cfg = 0; cfg < (1UL << n_sites); ++cfg) {
    const auto spin = [cfg](int i) { return (cfg >> i) & 1UL ? 1.0 : -1.0; };
    double bonds = 0.0, field = 0.0;
    for (int i = 0; i < n_sites; ++i) {
      field += spin(i);
      if (i + 1 < n_sites) bonds += spin(i) * spin(i + 1);
    }
    if (ring) bonds += spin(n_sites - 1) * spin(0);
    logs.push_back(be * bonds + bh * field);
  }
  return log_sum_exp(logs);
}

// ---------------------------------------------------------------------------
// 2D

Onsager onsager2d(double eps_tilde, const numerics::Tolerance& tol) {
  require(eps_tilde >= 0.0, ErrorKind::Domain, "onsager2d: coupling must be >= 0");
  const double s = std::sinh(2.0 * eps_tilde);
  const double c = std::cosh(2.0 * eps_tilde);
  const double gap = (s - 1.0) * (s - 1.0);  // c² − 2s
  // A = c² + s cos θ; A − s and A + s written without cancellation.
  const auto outer = [s, gap](double theta) {
    const double half = std::sin(0.5 * (kPi - theta));  // cos(θ/2)
    const double a_minus = gap + 2.0 * s * half * half;
    const double a_plus = a_minus + 2.0 * s;
    const double a = a_minus + s;
    return std::log(0.5 * (a + std::sqrt(a_minus * a_plus)));
  };
  Onsager o;
  o.kappa = 2.0 * s / (c * c);
  o.lnZ_per_site = std::log(2.0) + 0.5 * numerics::integrate(outer, 0.0, kPi, tol) / kPi;
  return o;
}

Onsager onsager2d_tensor(double eps_tilde, const numerics::Tolerance& tol) {
  require(eps_tilde >= 0.0, ErrorKind::Domain, "onsager2d: coupling must be >= 0");
  const double s = std::sinh(2.0 * eps_tilde);
  const double c = std::cosh(2.0 * eps_tilde);
  const double gap = (s - 1.0) * (s - 1.0);
  // c² + s(cos θ + cos θ′) = (s − 1)² + 2s(cos²(θ/2) + cos²(θ′/2)).
  const auto f = [s, gap](double x, double y) {
    const double cx = std::sin(0.5 * (kPi - x)), cy = std::sin(0.5 * (kPi - y));
    const double arg = gap + 2.0 * s * (cx * cx + cy * cy);
    return arg > 0.0 ? std::log(arg) : 0.0;
  };
  Onsager o;
  o.kappa = 2.0 * s / (c * c);
  o.lnZ_per_site = std::log(2.0) + 0.5 * numerics::integrate_2d(f, 0.0, kPi, 0.0, kPi, tol) / (kPi * kPi);
  return o;
}

OnsagerCritical onsager2d_tc() {
  const double k = numerics::find_root([](double e) { return std::sinh(2.0 * e) - 1.0; }, 0.1, 1.0,
                                       {0.0, 1e-16, 10'000});
  return {k, 1.0 / k};
}

double onsager2d_heat_capacity(double eps_tilde, double step) {
  require(eps_tilde > step && step > 0.0, ErrorKind::Domain, "onsager2d_heat_capacity: need eps_tilde > step > 0");
  const double fp = onsager2d(eps_tilde + step).lnZ_per_site;
  const double f0 = onsager2d(eps_tilde).lnZ_per_site;
  const double fm = onsager2d(eps_tilde - step).lnZ_per_site;
  return eps_tilde * eps_tilde * (fp - 2.0 * f0 + fm) / (step * step);
}

double onsager2d_heat_capacity_peak(double lo, double hi, double spacing, double step) {
  require(lo < hi && spacing > 0.0, ErrorKind::Domain, "onsager2d_heat_capacity_peak: bad grid");
  double best = lo, best_c = -numerics::kInf;
  const long n = static_cast<long>(std::floor((hi - lo) / spacing));
  for (long i = 0; i <= n; ++i) {
    const double e = lo + i * spacing;
    const double c = onsager2d_heat_capacity(e, step);
    if (c > best_c) {
      best_c = c;
      best = e;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Mean field

double mean_field_free_energy(double m, const IsingParams& p) {
  p.validate();
  const double ce = p.coordination * p.eps;
  return 0.5 * ce * m * m - p.T * log_2cosh((p.h + ce * m) / p.T);
}

MeanField mean_field_magnetization(const IsingParams& p) {
  p.validate();
  const double ce = p.coordination * p.eps;
  const bool flip = std::signbit(p.h);
  const double h = std::abs(p.h);
  const auto g = [&](double m) { return m - std::tanh((h + ce * m) / p.T); };
  const numerics::Tolerance tol{0.0, 1e-15, 10'000};

  std::vector<double> roots;
  if (h == 0.0) {
    roots.push_back(0.0);
    if (ce > p.T) {
      const double m = numerics::find_root(g, 1e-300, 1.0, tol);
      roots.push_back(m);
      roots.push_back(-m);
    }
  } else {
    roots.push_back(numerics::find_root(g, 0.0, 1.0, tol));
    if (ce > p.T) {
      const double a = std::acosh(std::sqrt(ce / p.T));
      const double left = (-p.T * a - h) / ce;
      const double right = std::min((p.T * a - h) / ce, 0.0);
      if (left > -1.0 && left < 0.0) {
        const double peak = g(left);
        if (peak == 0.0) {
          roots.push_back(left);
        } else if (peak > 0.0) {
          roots.push_back(numerics::find_root(g, -1.0, left, tol));
          roots.push_back(numerics::find_root(g, left, right, tol));
        }
      }
    }
  }
  if (flip) {
    for (double& r : roots) r = -r;
  }
  std::sort(roots.begin(), roots.end());

  MeanField out;
  out.Tc = ce;
  out.solutions = roots;
  IsingParams signed_p = p;
  // Stable solutions, then the lowest free energy among them.
  double best = numerics::kInf;
  for (double m : roots) {
    const double arg = (p.h + ce * m) / p.T;
    if (1.0 - ce / p.T * sech2(arg) <= 0.0) continue;
    best = std::min(best, mean_field_free_energy(m, signed_p));
  }
  for (double m : roots) {
    const double arg = (p.h + ce * m) / p.T;
    if (1.0 - ce / p.T * sech2(arg) <= 0.0) continue;
    if (mean_field_free_energy(m, signed_p) <= best + 1e-14 * std::max(1.0, std::abs(best))) out.minima.push_back(m);
  }
  if (out.minima.empty()) out.minima.push_back(roots.front());  // marginal case at T = Tc, h = 0
  out.symmetry_broken = out.minima.size() > 1;
  out.magnetization = flip ? out.minima.front() : out.minima.back();

  const double m = out.magnetization;
  const double arg = (p.h + ce * m) / p.T;
  const double s = sech2(arg);
  const double denom = 1.0 - s * ce / p.T;
  out.energy = -0.5 * ce * m * m - p.h * m;
  out.susceptibility = denom > 0.0 ? s / (p.T * denom) : numerics::kInf;
  const double dm_dT = denom > 0.0 ? -s * arg / (p.T * denom) : 0.0;
  out.heat_capacity = -(ce * m + p.h) * dm_dT;
  return out;
}

Antiferro antiferro_mean_field(const IsingParams& p) {
  p.validate();
  const double tc = p.coordination * p.eps;
  const double T = p.T, h = p.h;
  const auto other = [&](double mb) { return std::tanh((h - tc * mb) / T); };
  const auto G = [&](double mb) { return mb - other(other(mb)); };
  const auto entropy = [](double m) { return -(xlogx(0.5 * (1.0 + m)) + xlogx(0.5 * (1.0 - m))); };
  const auto free_energy = [&](double ma, double mb) {
    return 0.5 * tc * ma * mb - 0.5 * h * (ma + mb) - 0.5 * T * (entropy(ma) + entropy(mb));
  };
  const numerics::Tolerance tol{0.0, 1e-15, 10'000};

  std::vector<double> candidates;
  // Uniform solution M = tanh((h − Tc M)/T) is always present and unique.
  candidates.push_back(numerics::find_root([&](double m) { return m - other(m); }, -1.0, 1.0, tol));
  if (h == 0.0) {
    if (tc > T) {
      const double ms = numerics::find_root([&](double m) { return m - std::tanh(tc * m / T); }, 1e-300, 1.0, tol);
      candidates.push_back(-ms);
    }
  } else {
    const int n = 20000;
    double prev_x = -1.0, prev_g = G(-1.0);
    for (int i = 1; i <= n; ++i) {
      const double x = -1.0 + 2.0 * i / n;
      const double gx = G(x);
      if (gx == 0.0) {
        candidates.push_back(x);
      } else if (std::signbit(gx) != std::signbit(prev_g) && prev_g != 0.0) {
        candidates.push_back(numerics::find_root(G, prev_x, x, tol));
      }
      prev_x = x;
      prev_g = gx;
    }
  }
  Antiferro out;
  out.Tc = tc;
  double best = numerics::kInf;
  for (double mb : candidates) {
    const double ma = other(mb);
    const double f = free_energy(ma, mb);
    if (f < best - 1e-14 || (std::abs(f - best) <= 1e-14 && ma - mb > out.Ma - out.Mb)) {
      best = std::min(best, f);
      out.Ma = ma;
      out.Mb = mb;
    }
  }
  if (out.Ma < out.Mb) std::swap(out.Ma, out.Mb);
  out.M = 0.5 * (out.Ma + out.Mb);
  out.Ms = 0.5 * (out.Ma - out.Mb);
  // Implicit differentiation of the coupled equations.
  const double sa = sech2((h - tc * out.Mb) / T), sb = sech2((h - tc * out.Ma) / T);
  Eigen::Matrix2d J;
  J << 1.0, sa * tc / T, sb * tc / T, 1.0;
  const Eigen::Vector2d d = J.fullPivLu().solve(Eigen::Vector2d(sa / T, sb / T));
  out.susceptibility = 0.5 * (d(0) + d(1));
  return out;
}

double bragg_williams_action(double M, const IsingParams& p) {
  p.validate();
  const double b = 1.0 / p.T;
  return 0.5 * (1.0 - b * p.coordination * p.eps) * M * M + M * M * M * M / 12.0 - b * p.h * M;
}

double variational_free_energy(double M, const IsingParams& p) {
  p.validate();
  require(std::abs(M) < 1.0, ErrorKind::Domain, "variational_free_energy: need |M| < 1");
  return p.T * (xlogx(0.5 * (1.0 + M)) + xlogx(0.5 * (1.0 - M))) - 0.5 * p.coordination * p.eps * M * M;
}

double bragg_williams_minimizer(const IsingParams& p, bool exact) {
  p.validate();
  const double ce = p.coordination * p.eps;
  const bool flip = std::signbit(p.h);
  const double h = std::abs(p.h);
  const numerics::Tolerance tol{0.0, 1e-15, 10'000};
  double m = 0.0;
  if (exact) {
    // Stationarity T·atanh(M) = cεM + h in the variable y = atanh(M).
    const auto G = [&](double y) { return p.T * y - h - ce * std::tanh(y); };
    const double hi = (h + std::abs(ce)) / p.T + 1.0;
    if (h > 0.0) {
      m = std::tanh(numerics::find_root(G, 0.0, hi, tol));
    } else if (ce > p.T) {
      m = std::tanh(numerics::find_root(G, 1e-300, hi, tol));
    }
  } else {
    const double b = 1.0 / p.T;
    const double lin = 1.0 - b * ce;
    const auto Q = [&](double x) { return lin * x + x * x * x / 3.0 - b * h; };
    const double hi = std::sqrt(3.0 * std::abs(lin)) + std::cbrt(3.0 * b * h) + 1.0;
    if (h > 0.0) {
      m = numerics::find_root(Q, 0.0, hi, tol);
    } else if (lin < 0.0) {
      m = numerics::find_root(Q, 1e-300, hi, tol);
    }
  }
  return flip ? -m : m;
}

// ---------------------------------------------------------------------------
// Lee-Yang

double LeeYang::lnZ(double h) const {
  const double z = std::exp(2.0 * beta * h);
  double acc = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * z + *it;
  return log_scale + std::log(acc) - beta * h * sites;
}

LeeYang lee_yang_zeros(int n_sites, double beta_eps, Geometry geometry, double beta) {
  require(n_sites >= 1 && n_sites <= 20, ErrorKind::Domain, "lee_yang_zeros: need 1 <= N <= 20");
  require(beta > 0.0, ErrorKind::Domain, "lee_yang_zeros: beta must be positive");
  const int n = n_sites;
  std::vector<std::pair<int, int>> bonds;
  switch (geometry) {
    case Geometry::Chain:
      for (int i = 0; i + 1 < n; ++i) bonds.emplace_back(i, i + 1);
      break;
    case Geometry::Ring:
      for (int i = 0; i + 1 < n; ++i) bonds.emplace_back(i, i + 1);
      if (n > 2) bonds.emplace_back(n - 1, 0);
      break;
    case Geometry::Complete:
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) bonds.emplace_back(i, j);
      }
      break;
  }
  const int nb = static_cast<int>(bonds.size());
  // counts[k][B + nb]: configurations with k up spins and bond sum B.
  std::vector<std::vector<double>> counts(n + 1, std::vector<double>(2 * nb + 1, 0.0));
  for (unsigned long cfg = 0; cfg < (1UL << n); ++cfg) {
    int bond_sum = 0;
    for (const auto& [i, j] : bonds) bond_sum += (((cfg >> i) ^ (cfg >> j)) & 1UL) ? -1 : 1;
    counts[__builtin_popcountl(cfg)][bond_sum + nb] += 1.0;
  }
  std::vector<double> log_coeff(n + 1);
  for (int k = 0; k <= n; ++k) {
    std::vector<double> terms;
    for (int b = 0; b <= 2 * nb; ++b) {
      if (counts[k][b] > 0.0) terms.push_back(std::log(counts[k][b]) + beta_eps * (b - nb));
    }
    log_coeff[k] = log_sum_exp(terms);
  }
  LeeYang out;
  out.sites = n;
  out.beta = beta;
  out.log_scale = *std::max_element(log_coeff.begin(), log_coeff.end());
  for (double lc : log_coeff) out.coefficients.push_back(std::exp(lc - out.log_scale));

  if (beta_eps == 0.0) {
    // Free spins: the polynomial is (1 + z)^N.
    out.roots.assign(n, {-1.0, 0.0});
  } else {
    Eigen::VectorXd poly(n + 1);
    for (int k = 0; k <= n; ++k) poly(k) = out.coefficients[k];
    Eigen::PolynomialSolver<double, Eigen::Dynamic> solver(poly);
    const auto& roots = solver.roots();
    for (Eigen::Index i = 0; i < roots.size(); ++i) {
      std::complex<double> z = roots(i);
      // Newton polish on the scaled polynomial.
      for (int it = 0; it < 4; ++it) {
        std::complex<double> f = 0.0, df = 0.0;
        for (int k = n; k >= 0; --k) {
          df = df * z + f;
          f = f * z + out.coefficients[k];
        }
        if (std::abs(df) == 0.0) break;
        const std::complex<double> dz = f / df;
        z -= dz;
        if (std::abs(dz) < 1e-16 * std::abs(z)) break;
      }
      out.roots.push_back(z);
    }
  }
  for (const auto& z : out.roots) out.moduli.push_back(std::abs(z));
  return out;
}

// ---------------------------------------------------------------------------
// Field theory

double ornstein_zernike(double q, double xi) {
  require(xi > 0.0, ErrorKind::Domain, "ornstein_zernike: xi must be positive");
  const double m2 = std::isinf(xi) ? 0.0 : 1.0 / (xi * xi);
  return 1.0 / (q * q + m2);
}

double ornstein_zernike_real(double r, double xi, int d) {
  require(r > 0.0 && xi > 0.0 && d >= 1, ErrorKind::Domain, "ornstein_zernike_real: need r, xi > 0, d >= 1");
  const double half = 0.5 * d;
  if (std::isinf(xi)) {
    require(d > 2, ErrorKind::Domain, "ornstein_zernike_real: critical correlation needs d > 2");
    return std::tgamma(half - 1.0) / (4.0 * std::pow(kPi, half) * std::pow(r, d - 2));
  }
  const double nu = std::abs(half - 1.0);
  return std::pow(2.0 * kPi, -half) * std::pow(xi * r, 1.0 - half) * std::cyl_bessel_k(nu, r / xi);
}

double ornstein_zernike_inverse_3d(double r, double xi, const numerics::Tolerance& tol) {
  require(r > 0.0 && xi > 0.0, ErrorKind::Domain, "ornstein_zernike_inverse_3d: need r, xi > 0");
  // (1/2π²r)∫ q sin(qr)/(q² + m²) dq = (1/2π²r)[π/2 − m²∫ sin(qr)/(q(q² + m²)) dq].
  if (std::isinf(xi)) return 1.0 / (4.0 * kPi * r);
  const double m2 = 1.0 / (xi * xi);
  const auto f = [r, m2](double q) {
    const double s = q * r < 1e-8 ? r : std::sin(q * r) / q;
    return s / (q * q + m2);
  };
  const double period = kPi / r;
  double sum = 0.0, prev_sum = 0.0;
  const int max_periods = 4000;
  for (int k = 0; k < max_periods; ++k) {
    prev_sum = sum;
    sum += numerics::integrate(f, k * period, (k + 1) * period, tol);
  }
  // Averaging consecutive partial sums of the alternating tail.
  const double tail_sum = 0.5 * (sum + prev_sum);
  return (0.5 * kPi - m2 * tail_sum) / (2.0 * kPi * kPi * r);
}

double gaussian_fluctuation_integral(double r, double d, double cutoff) {
  require(r > 0.0 && d > 0.0 && cutoff > 0.0, ErrorKind::Domain, "gaussian_fluctuation_integral: need r, d, cutoff > 0");
  const auto f = [r, d](double k) { return std::pow(k, d - 1.0) / ((k * k + r) * (k * k + r)); };
  const double knee = std::min(std::sqrt(r), cutoff);
  return numerics::integrate(f, 0.0, knee, {0.0, 1e-12, 1'000'000}) +
         numerics::integrate(f, knee, cutoff, {0.0, 1e-12, 1'000'000});
}

std::array<double, 2> rg_beta(double r, double u, double d) {
  return {2.0 * r - 3.0 * r * u + 3.0 * u, (4.0 - d) * u - 9.0 * u * u};
}

std::vector<RgPoint> rg_flow(const RgPoint& start, double tau_end, double step) {
  require(step > 0.0 && tau_end >= start.tau, ErrorKind::Domain, "rg_flow: need step > 0 and tau_end >= start");
  const double d = start.d;
  const auto field = [d](double, const Eigen::Vector2d& y) {
    const auto b = rg_beta(y(0), y(1), d);
    return Eigen::Vector2d(b[0], b[1]);
  };
  std::vector<RgPoint> out{start};
  Eigen::Vector2d y(start.r, start.u);
  double tau = start.tau;
  const double inner = std::min(step, 1e-2);
  while (tau < tau_end - 1e-12 * std::max(1.0, std::abs(tau_end))) {
    const double next = std::min(tau + step, tau_end);
    y = numerics::ode_advance<Eigen::Vector2d>(field, y, tau, next, inner);
    tau = next;
    out.push_back({y(0), y(1), d, tau});
  }
  return out;
}

namespace {

FixedPoint linearise(double r, double u, double d) {
  FixedPoint fp{r, u, {}, {}, 0};
  // Jacobian is upper triangular: [[2 − 3u, 3 − 3r], [0, 4 − d − 18u]].
  const double a = 2.0 - 3.0 * u, b = 3.0 - 3.0 * r, c = 4.0 - d - 18.0 * u;
  std::array<double, 2> ev{a, c};
  std::array<double, 2> v1{1.0, 0.0};
  std::array<double, 2> v2{b, c - a};
  const double n2 = std::hypot(v2[0], v2[1]);
  v2 = {v2[0] / n2, v2[1] / n2};
  if (c > a) {
    std::swap(ev[0], ev[1]);
    std::swap(v1, v2);
  }
  fp.eigenvalues = ev;
  fp.eigenvectors = {{{v1[0], v2[0]}, {v1[1], v2[1]}}};
  fp.relevant_directions = (ev[0] > 0.0) + (ev[1] > 0.0);
  return fp;
}

}  // namespace

RgFixedPoints rg_fixed_points(double d) {
  require(d > 0.0 && d <= 4.0, ErrorKind::Domain, "rg_fixed_points: need 0 < d <= 4");
  RgFixedPoints out;
  out.gaussian = linearise(0.0, 0.0, d);
  const double u = (4.0 - d) / 9.0;
  const double r = -3.0 * u / (2.0 - 3.0 * u);
  out.nontrivial = linearise(r, u, d);
  out.r_leading_order = -(4.0 - d) / 6.0;
  out.u_leading_order = u;
  return out;
}

CriticalExponents exponents_from_scaling(double nu, double eta, double d, DeltaForm form) {
  const double denom = d - 2.0 + eta;
  require(denom > 0.0, ErrorKind::Domain, "exponents_from_scaling: need d − 2 + eta > 0");
  CriticalExponents e;
  e.nu = nu;
  e.eta = eta;
  e.alpha = 2.0 - nu * d;
  e.beta = 0.5 * denom * nu;
  e.gamma = (2.0 - eta) * nu;
  e.delta = (form == DeltaForm::Consistent ? d + 2.0 - eta : d + 2.0 + eta) / denom;
  return e;
}

CriticalExponents rg_exponents(double d) {
  require(d > 0.0 && d < 4.0, ErrorKind::Domain, "rg_exponents: need 0 < d < 4");
  const auto fp = rg_fixed_points(d).nontrivial;
  require(fp.eigenvalues[0] > 0.0, ErrorKind::Domain, "rg_exponents: no relevant direction");
  return exponents_from_scaling(1.0 / fp.eigenvalues[0], 0.0, d);
}

}  // namespace statmech::ising
