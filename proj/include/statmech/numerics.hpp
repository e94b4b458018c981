#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "statmech/error.hpp"

namespace statmech::numerics {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Tolerance {
  double abs = 1e-12;
  double rel = 1e-10;
  long max_evals = 1'000'000;

  void validate() const;
  /// Acceptance threshold for an estimate of magnitude `value`.
  double bound(double value) const { return std::max(abs, rel * std::abs(value)); }
};

using RealFunction = std::function<double(double)>;

// ---------------------------------------------------------------------------
// Quadrature

/// Globally adaptive Gauss-Kronrod quadrature on [a, b]. `b` may be +infinity,
/// in which case the half line is mapped onto (0, 1) with x = a + s·u/(1−u),
/// `s` being `decay_scale`.
double integrate(const RealFunction& f, double a, double b, const Tolerance& tol = {},
                 double decay_scale = 1.0);

/// Same as integrate() but also reports the accumulated error estimate and
/// the number of integrand evaluations.
struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  long evals = 0;
};
QuadratureResult integrate_detailed(const RealFunction& f, double a, double b,
                                    const Tolerance& tol = {}, double decay_scale = 1.0);

/// Tensor-product (nested) adaptive quadrature over a rectangle.
double integrate_2d(const std::function<double(double, double)>& f, double ax, double bx,
                    double ay, double by, const Tolerance& tol = {});

// ---------------------------------------------------------------------------
// Root finding

/// Bracketed root of a continuous function (TOMS 748). Throws NoBracket when
/// f(lo) and f(hi) have the same strict sign.
double find_root(const RealFunction& f, double lo, double hi, const Tolerance& tol = {});

/// Expands [lo, hi] geometrically away from `anchor` until the sign changes.
/// Returns the bracket; throws NoBracket after `max_expansions` attempts.
std::array<double, 2> expand_bracket(const RealFunction& f, double lo, double hi,
                                     int max_expansions = 200);

// ---------------------------------------------------------------------------
// ODE integration (classical fixed-step RK4)

namespace detail {
template <class State>
bool all_finite(const State& y) {
  if constexpr (std::is_arithmetic_v<State>) {
    return std::isfinite(y);
  } else {
    return y.allFinite();
  }
}
}  // namespace detail

/// Advances y' = f(t, y) from t0 to t1 using RK4 with step at most `step`.
/// The last step is shortened so that t1 is hit exactly. Works with any state
/// type supporting `+`, scalar `*` and (for Eigen types) `allFinite()`.
template <class State, class Field>
State ode_advance(Field&& f, State y, double t0, double t1, double step) {
  require(step > 0.0, ErrorKind::Domain, "ode_advance: step must be positive");
  if (t1 == t0) return y;
  const double span = t1 - t0;
  const auto n = static_cast<long>(std::ceil(std::abs(span) / step - 1e-12));
  const double h = span / static_cast<double>(std::max<long>(n, 1));
  double t = t0;
  for (long i = 0; i < std::max<long>(n, 1); ++i) {
    State k1 = f(t, y);
    State k2 = f(t + 0.5 * h, State(y + (0.5 * h) * k1));
    State k3 = f(t + 0.5 * h, State(y + (0.5 * h) * k2));
    State k4 = f(t + h, State(y + h * k3));
    y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!detail::all_finite(y)) throw Error(ErrorKind::Step, "ode_advance: non-finite state");
    t = t0 + static_cast<double>(i + 1) * h;
  }
  return y;
}

using VectorField = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;

inline Eigen::VectorXd ode_advance(const VectorField& f, const Eigen::VectorXd& y0, double t0,
                                   double t1, double step) {
  return ode_advance<Eigen::VectorXd>(f, y0, t0, t1, step);
}

// ---------------------------------------------------------------------------
// Correlation estimation

/// Unbiased autocovariance and its Fourier transform on a symmetric lag grid.
/// `lags[k]` holds C(k·dt) for k = 0..max_lag. `omega`/`spectrum` are sampled
/// on the FFT grid ordered from −π/dt upward; `spectrum[j]` is
/// dt·Σ_k C(k)e^{iω_j k dt} over k = −max_lag..max_lag.
struct CorrelationSpectrum {
  double dt = 0.0;
  std::vector<double> lags;
  std::vector<double> omega;
  std::vector<double> spectrum;
};

/// max_lag < 0 means use all n−1 lags.
CorrelationSpectrum autocorrelation_spectrum(std::span<const double> samples, double dt,
                                             long max_lag = -1);

/// FFT-based raw lag sums r_k = Σ_i x_i x_{i+k} for k = 0..n−1 (no mean removal).
std::vector<double> lag_sums(std::span<const double> x);

// ---------------------------------------------------------------------------
// Random numbers

/// Philox4x32-10 counter-based generator. A stream is addressed by
/// (seed, stream_id); the draw index is the counter, so identical
/// (seed, stream_id) pairs give bit-identical sequences independent of how
/// streams are scheduled.
class RandomStream {
 public:
  using result_type = std::uint32_t;

  RandomStream(std::uint64_t seed, std::uint64_t stream_id = 0) : seed_(seed), stream_id_(stream_id) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return 0xFFFFFFFFu; }

  result_type operator()();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform double in (0, 1].
  double uniform_open0() { return 1.0 - uniform(); }
  /// Standard normal variate (Marsaglia polar method).
  double gaussian();
  double exponential(double rate) { return -std::log(uniform_open0()) / rate; }

  /// Independent sub-stream sharing this stream's seed.
  RandomStream split(std::uint64_t stream_id) const { return RandomStream(seed_, stream_id); }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Raw Philox4x32-10 block function, exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// ---------------------------------------------------------------------------
// Small helpers

/// Central-difference derivative with Richardson extrapolation.
struct Derivative {
  double value = 0.0;
  double error = 0.0;
};
Derivative richardson_derivative(const RealFunction& f, double x, double h);

/// Ordinary least squares fit y = a + b·x.
struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double slope_stderr = 0.0;
};
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

}  // namespace statmech::numerics
