#include "statmech/numerics.hpp"

#include <algorithm>
#include <complex>
#include <queue>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <unsupported/Eigen/FFT>

namespace statmech::numerics {

void Tolerance::validate() const {
  require(abs >= 0.0 && rel >= 0.0, ErrorKind::Domain, "tolerance components must be non-negative");
  require(abs > 0.0 || rel > 0.0, ErrorKind::Domain, "tolerance needs abs > 0 or rel > 0");
  require(max_evals >= 1, ErrorKind::Domain, "tolerance max_evals must be >= 1");
}

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
constexpr long kEvalsPerRule = 21;

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

// 21-point Kronrod rule with its embedded 10-point Gauss rule. The Gauss
// nodes sit at the odd Kronrod abscissae.
Segment apply_rule(const RealFunction& g, double a, double b) {
  using Gauss = boost::math::quadrature::gauss<double, 10>;
  const auto& x = GK::abscissa();
  const auto& wk = GK::weights();
  const auto& wg = Gauss::weights();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double kronrod = g(mid) * wk[0];
  double gauss = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double pair = g(mid + half * x[i]) + g(mid - half * x[i]);
    kronrod += pair * wk[i];
    if (i % 2 == 1) gauss += pair * wg[i / 2];
  }
  const double v = half * kronrod;
  const double err = std::abs(half * (kronrod - gauss));
  if (!std::isfinite(v) || !std::isfinite(err)) {
    throw Error(ErrorKind::Domain, "integrate: integrand produced a non-finite value");
  }
  return {a, b, v, err};
}

QuadratureResult adaptive(const RealFunction& f, double a, double b, const Tolerance& tol) {
  // Deep bisection toward an integrable endpoint singularity can round a node
  // onto the endpoint itself; those nodes carry zero weight in the limit.
  const RealFunction g = [&](double x) { return (x <= a || x >= b) ? 0.0 : f(x); };
  std::priority_queue<Segment> queue;
  Segment first = apply_rule(g, a, b);
  long evals = kEvalsPerRule;
  double total = first.value;
  double total_err = first.error;
  double frozen_value = 0.0;
  double frozen_err = 0.0;
  queue.push(first);

  while (!queue.empty()) {
    if (total_err <= tol.bound(total)) break;
    if (evals + 2 * kEvalsPerRule > tol.max_evals) {
      throw NonConvergenceError("integrate: evaluation budget exhausted", total, total_err);
    }
    Segment worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Interval below floating-point resolution; keep its contribution as is.
      frozen_value += worst.value;
      frozen_err += worst.error;
      continue;
    }
    Segment left = apply_rule(g, worst.a, mid);
    Segment right = apply_rule(g, mid, worst.b);
    evals += 2 * kEvalsPerRule;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
  }

  // Re-sum to shed the round-off accumulated by the incremental updates.
  double value = frozen_value;
  double err = frozen_err;
  while (!queue.empty()) {
    value += queue.top().value;
    err += queue.top().error;
    queue.pop();
  }
  return {value, err, evals};
}

}  // namespace

QuadratureResult integrate_detailed(const RealFunction& f, double a, double b,
                                    const Tolerance& tol, double decay_scale) {
  tol.validate();
  require(!std::isnan(a) && !std::isnan(b), ErrorKind::Domain, "integrate: NaN limit");
  require(a < b, ErrorKind::Domain, "integrate: require a < b");
  require(std::isfinite(a), ErrorKind::Domain, "integrate: lower limit must be finite");
  if (std::isfinite(b)) return adaptive(f, a, b, tol);

  require(decay_scale > 0.0, ErrorKind::Domain, "integrate: decay scale must be positive");
  const RealFunction mapped = [&](double u) {
    const double one_minus = 1.0 - u;
    const double x = a + decay_scale * u / one_minus;
    const double fx = f(x);
    if (fx == 0.0) return 0.0;
    return fx * decay_scale / (one_minus * one_minus);
  };
  return adaptive(mapped, 0.0, 1.0, tol);
}

double integrate(const RealFunction& f, double a, double b, const Tolerance& tol,
                 double decay_scale) {
  return integrate_detailed(f, a, b, tol, decay_scale).value;
}

double integrate_2d(const std::function<double(double, double)>& f, double ax, double bx,
                    double ay, double by, const Tolerance& tol) {
  Tolerance inner = tol;
  inner.abs = tol.abs * 0.1 / std::max(1.0, std::abs(bx - ax));
  inner.rel = tol.rel * 0.1;
  const RealFunction outer = [&](double x) {
    return integrate([&](double y) { return f(x, y); }, ay, by, inner);
  };
  return integrate(outer, ax, bx, tol);
}

double find_root(const RealFunction& f, double lo, double hi, const Tolerance& tol) {
  tol.validate();
  require(lo <= hi, ErrorKind::Domain, "find_root: require lo <= hi");
  const double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (std::signbit(flo) == std::signbit(fhi) || std::isnan(flo) || std::isnan(fhi)) {
    throw Error(ErrorKind::NoBracket, "find_root: f(lo) and f(hi) have the same sign");
  }
  const auto converged = [&tol](double l, double h) {
    return std::abs(h - l) <= std::max(tol.abs, tol.rel * std::min(std::abs(l), std::abs(h)));
  };
  std::uintmax_t iters = static_cast<std::uintmax_t>(std::min<long>(tol.max_evals, 10'000));
  auto [l, h] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, converged, iters);
  return 0.5 * (l + h);
}

std::array<double, 2> expand_bracket(const RealFunction& f, double lo, double hi,
                                     int max_expansions) {
  require(lo < hi, ErrorKind::Domain, "expand_bracket: require lo < hi");
  constexpr double kGrow = 1.6;
  double flo = f(lo);
  double fhi = f(hi);
  for (int i = 0; i < max_expansions; ++i) {
    if (std::signbit(flo) != std::signbit(fhi) || flo == 0.0 || fhi == 0.0) return {lo, hi};
    if (std::abs(flo) < std::abs(fhi)) {
      lo += kGrow * (lo - hi);
      flo = f(lo);
    } else {
      hi += kGrow * (hi - lo);
      fhi = f(hi);
    }
  }
  throw Error(ErrorKind::NoBracket, "expand_bracket: no sign change found");
}

// ---------------------------------------------------------------------------

namespace {

std::size_t next_pow2(std::size_t n) {
  std::size_t m = 1;
  while (m < n) m <<= 1;
  return m;
}

}  // namespace

std::vector<double> lag_sums(std::span<const double> x) {
  const std::size_t n = x.size();
  const std::size_t m = next_pow2(2 * n);
  std::vector<double> padded(m, 0.0);
  std::copy(x.begin(), x.end(), padded.begin());
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, padded);
  for (auto& c : spec) c = std::norm(c);
  std::vector<std::complex<double>> back;
  fft.inv(back, spec);
  std::vector<double> r(n);
  for (std::size_t k = 0; k < n; ++k) r[k] = back[k].real();
  return r;
}

CorrelationSpectrum autocorrelation_spectrum(std::span<const double> samples, double dt,
                                             long max_lag) {
  if (samples.size() < 2) throw Error(ErrorKind::EmptyInput, "autocorrelation_spectrum: need >= 2 samples");
  require(dt > 0.0, ErrorKind::Domain, "autocorrelation_spectrum: dt must be positive");
  const auto n = static_cast<long>(samples.size());
  if (max_lag < 0 || max_lag > n - 1) max_lag = n - 1;

  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= static_cast<double>(n);
  std::vector<double> centered(samples.begin(), samples.end());
  for (double& s : centered) s -= mean;

  const std::vector<double> sums = lag_sums(centered);
  CorrelationSpectrum out;
  out.dt = dt;
  out.lags.resize(static_cast<std::size_t>(max_lag) + 1);
  for (long k = 0; k <= max_lag; ++k) {
    out.lags[static_cast<std::size_t>(k)] = sums[static_cast<std::size_t>(k)] / static_cast<double>(n - k);
  }

  const std::size_t m = next_pow2(static_cast<std::size_t>(2 * max_lag + 2));
  std::vector<double> sym(m, 0.0);
  sym[0] = out.lags[0];
  for (long k = 1; k <= max_lag; ++k) {
    sym[static_cast<std::size_t>(k)] = out.lags[static_cast<std::size_t>(k)];
    sym[m - static_cast<std::size_t>(k)] = out.lags[static_cast<std::size_t>(k)];
  }
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, sym);

  out.omega.resize(m);
  out.spectrum.resize(m);
  const double dw = 2.0 * kPi / (static_cast<double>(m) * dt);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = (i + m / 2) % m;
    const double jj = j >= m / 2 ? static_cast<double>(j) - static_cast<double>(m) : static_cast<double>(j);
    out.omega[i] = jj * dw;
    out.spectrum[i] = dt * spec[j].real();
  }
  return out;
}

// ---------------------------------------------------------------------------

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kW0;
      key[1] += kW1;
    }
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

void RandomStream::refill() {
  block_ = philox4x32({static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
                       static_cast<std::uint32_t>(stream_id_), static_cast<std::uint32_t>(stream_id_ >> 32)},
                      {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
  ++counter_;
  used_ = 0;
}

RandomStream::result_type RandomStream::operator()() {
  if (used_ == 4) refill();
  return block_[static_cast<std::size_t>(used_++)];
}

double RandomStream::uniform() {
  const std::uint64_t a = (*this)() >> 5;
  const std::uint64_t b = (*this)() >> 6;
  return static_cast<double>(a * 67108864u + b) * (1.0 / 9007199254740992.0);
}

double RandomStream::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * factor;
  has_spare_ = true;
  return u * factor;
}

// ---------------------------------------------------------------------------

Derivative richardson_derivative(const RealFunction& f, double x, double h) {
  require(h > 0.0, ErrorKind::Domain, "richardson_derivative: step must be positive");
  const auto central = [&](double s) { return (f(x + s) - f(x - s)) / (2.0 * s); };
  const double d1 = central(h);
  const double d2 = central(0.5 * h);
  const double d4 = central(0.25 * h);
  const double r1 = (4.0 * d2 - d1) / 3.0;
  const double r2 = (4.0 * d4 - d2) / 3.0;
  const double best = (16.0 * r2 - r1) / 15.0;
  return {best, std::abs(best - r2)};
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 2, ErrorKind::Domain, "linear_fit: need >= 2 paired points");
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  require(sxx > 0.0, ErrorKind::Domain, "linear_fit: degenerate abscissae");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (x.size() > 2) {
    double ssr = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - fit.intercept - fit.slope * x[i];
      ssr += r * r;
    }
    fit.slope_stderr = std::sqrt(ssr / (n - 2.0) / sxx);
  }
  return fit;
}

}  // namespace statmech::numerics
