#include "statmech/stochastic.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace statmech::stochastic {

namespace {

std::uint64_t substream(const numerics::RandomStream& stream, long index) {
  return ((stream.stream_id() + 1) << 32) + static_cast<std::uint64_t>(index);
}

struct Spread {
  double mean = 0.0;
  double error = 0.0;
};

Spread spread(const std::vector<double>& x) {
  Spread s;
  const auto n = static_cast<double>(x.size());
  for (double v : x) s.mean += v;
  s.mean /= n;
  if (x.size() < 2) return s;
  double var = 0.0;
  for (double v : x) var += (v - s.mean) * (v - s.mean);
  s.error = std::sqrt(var / (n - 1.0) / n);
  return s;
}

// Runs body(chunk) for every chunk on a small pool; rethrows the first failure.
template <class Body>
void parallel_chunks(int chunks, int threads, Body body) {
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, chunks);
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex guard;
  const auto worker = [&] {
    for (int c = next++; c < chunks; c = next++) {
      try {
        body(c);
      } catch (...) {
        std::lock_guard<std::mutex> lock(guard);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

double random_walk_diffusion(const std::vector<Hop>& hops) {
  double sum = 0.0;
  for (const Hop& h : hops) {
    require(h.rate >= 0.0, ErrorKind::Domain, "random_walk_diffusion: rates must be nonnegative");
    sum += h.displacement * h.displacement * h.rate;
  }
  require(std::isfinite(sum), ErrorKind::Domain, "random_walk_diffusion: second moment diverges");
  return 0.5 * sum;
}

Estimate random_walk_simulate(const std::vector<Hop>& hops, long walkers, double t,
                              const numerics::RandomStream& stream) {
  require(!hops.empty() && walkers > 1 && t > 0.0, ErrorKind::Domain,
          "random_walk_simulate: need hops, at least two walkers and t > 0");
  std::vector<double> cumulative;
  double total = 0.0;
  for (const Hop& h : hops) {
    require(h.rate >= 0.0, ErrorKind::Domain, "random_walk_simulate: rates must be nonnegative");
    total += h.rate;
    cumulative.push_back(total);
  }
  if (total == 0.0) return {};
  std::vector<double> x(static_cast<std::size_t>(walkers), 0.0);
  for (long w = 0; w < walkers; ++w) {
    numerics::RandomStream rng = stream.split(substream(stream, w));
    double clock = rng.exponential(total);
    double pos = 0.0;
    while (clock < t) {
      const double pick = rng.uniform() * total;
      const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
      pos += hops[static_cast<std::size_t>(std::min<long>(it - cumulative.begin(), static_cast<long>(hops.size()) - 1))].displacement;
      clock += rng.exponential(total);
    }
    x[static_cast<std::size_t>(w)] = pos;
  }
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(walkers);
  double m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = (v - mean) * (v - mean);
    m2 += d;
    m4 += d * d;
  }
  const auto n = static_cast<double>(walkers);
  const double var = m2 / (n - 1.0);
  const double var_error = std::sqrt(std::max(m4 / n - (m2 / n) * (m2 / n), 0.0) / n);
  return {var / (2.0 * t), var_error / (2.0 * t)};
}

// ---------------------------------------------------------------------------

void LangevinParams::validate() const {
  require(mass > 0.0 && friction > 0.0 && noise >= 0.0 && dt > 0.0, ErrorKind::Domain,
          "langevin: need m, eta, dt > 0 and nu >= 0");
}

LangevinStats langevin_simulate(const LangevinParams& p, long n_traj, long n_steps,
                                const numerics::RandomStream& stream, const LangevinOptions& opts) {
  p.validate();
  require(n_traj >= 1 && n_steps >= 2, ErrorKind::Domain, "langevin_simulate: need n_traj >= 1, n_steps >= 2");
  const double dt = p.dt;
  const double a = p.friction * dt / p.mass;
  const double decay = std::exp(-a);
  const double half = std::exp(-0.5 * a);
  const double kick = std::sqrt(p.noise * dt);
  const double T = p.temperature();
  const long n = n_steps + 1;

  const auto steps_per_tau = p.damping_time() / dt;
  const long c_lags = std::min(n - 1, opts.correlation_lags > 0 ? opts.correlation_lags
                                                                : static_cast<long>(std::ceil(5.0 * steps_per_tau)));
  const long m_lags = std::min(n - 1, opts.msd_lags > 0 ? opts.msd_lags
                                                        : std::max(2L, std::min(n / 10, static_cast<long>(std::ceil(20.0 * steps_per_tau)))));
  const long fit_from = std::min(m_lags - 1, std::max(1L, static_cast<long>(std::ceil(5.0 * steps_per_tau))));

  const auto traj = static_cast<std::size_t>(n_traj);
  std::vector<double> v2(traj), v4(traj), slope(traj), spectral(traj), vf(traj), xf(traj);
  const int chunks = static_cast<int>(std::min<long>(std::max(1, opts.chunks), n_traj));
  std::vector<std::vector<double>> corr_sum(static_cast<std::size_t>(chunks), std::vector<double>(c_lags + 1, 0.0));
  std::vector<std::vector<double>> msd_sum(static_cast<std::size_t>(chunks), std::vector<double>(m_lags + 1, 0.0));

  parallel_chunks(chunks, opts.threads, [&](int c) {
    std::vector<double> v(static_cast<std::size_t>(n)), x(static_cast<std::size_t>(n));
    std::vector<double> fit_x, fit_y;
    for (long lag = fit_from; lag <= m_lags; ++lag) fit_x.push_back(static_cast<double>(lag) * dt);
    fit_y.resize(fit_x.size());
    auto& corr = corr_sum[static_cast<std::size_t>(c)];
    auto& msd = msd_sum[static_cast<std::size_t>(c)];
    for (long i = c; i < n_traj; i += chunks) {
      numerics::RandomStream rng = stream.split(substream(stream, i));
      double vel = opts.thermal_start ? std::sqrt(T / p.mass) * rng.gaussian() : opts.v0;
      double pos = opts.x0;
      v[0] = vel;
      x[0] = pos;
      double force = p.force ? p.force(pos) : 0.0;
      for (long s = 1; s < n; ++s) {
        vel += 0.5 * dt * force / p.mass;
        pos += 0.5 * dt * vel;
        const double impulse = kick > 0.0 ? kick * rng.gaussian() : 0.0;
        vel = decay * vel + half * impulse / p.mass;
        pos += 0.5 * dt * vel;
        if (p.force) {
          force = p.force(pos);
          vel += 0.5 * dt * force / p.mass;
        }
        if (!std::isfinite(vel) || !std::isfinite(pos)) {
          throw Error(ErrorKind::Step, "langevin_simulate: trajectory diverged; reduce dt");
        }
        v[static_cast<std::size_t>(s)] = vel;
        x[static_cast<std::size_t>(s)] = pos;
      }
      const auto k = static_cast<std::size_t>(i);
      vf[k] = vel;
      xf[k] = pos;

      double s2 = 0.0, s4 = 0.0;
      for (double u : v) {
        s2 += u * u;
        s4 += u * u * u * u;
      }
      v2[k] = s2 / static_cast<double>(n);
      v4[k] = s4 / static_cast<double>(n);

      const auto vs = numerics::lag_sums(v);
      for (long lag = 0; lag <= c_lags; ++lag) corr[static_cast<std::size_t>(lag)] += vs[static_cast<std::size_t>(lag)] / static_cast<double>(n - lag);

      const auto spec = numerics::autocorrelation_spectrum(v, dt, c_lags);
      for (std::size_t j = 0; j < spec.omega.size(); ++j) {
        if (spec.omega[j] == 0.0) spectral[k] = 0.5 * spec.spectrum[j];
      }

      double centre = 0.0;
      for (double u : x) centre += u;
      centre /= static_cast<double>(n);
      for (double& u : x) u -= centre;
      const auto xs = numerics::lag_sums(x);
      std::vector<double> prefix(static_cast<std::size_t>(n) + 1, 0.0);
      for (long s = 0; s < n; ++s) prefix[static_cast<std::size_t>(s) + 1] = prefix[static_cast<std::size_t>(s)] + x[static_cast<std::size_t>(s)] * x[static_cast<std::size_t>(s)];
      for (long lag = 0; lag <= m_lags; ++lag) {
        const double head = prefix[static_cast<std::size_t>(n - lag)];
        const double tail = prefix[static_cast<std::size_t>(n)] - prefix[static_cast<std::size_t>(lag)];
        const double value = (head + tail - 2.0 * xs[static_cast<std::size_t>(lag)]) / static_cast<double>(n - lag);
        msd[static_cast<std::size_t>(lag)] += value;
        if (lag >= fit_from) fit_y[static_cast<std::size_t>(lag - fit_from)] = value;
      }
      slope[k] = 0.5 * numerics::linear_fit(fit_x, fit_y).slope;
    }
  });

  LangevinStats out;
  out.stable = p.stable();
  out.temperature = T;
  const Spread s2 = spread(v2), s4 = spread(v4);
  out.v2 = s2.mean;
  out.v2_error = s2.error;
  out.v4 = s4.mean;
  out.v4_error = s4.error;
  out.kinetic = 0.5 * p.mass * s2.mean;
  out.kinetic_error = 0.5 * p.mass * s2.error;

  std::vector<double> corr(static_cast<std::size_t>(c_lags) + 1, 0.0), msd(static_cast<std::size_t>(m_lags) + 1, 0.0);
  for (int c = 0; c < chunks; ++c) {
    for (std::size_t j = 0; j < corr.size(); ++j) corr[j] += corr_sum[static_cast<std::size_t>(c)][j];
    for (std::size_t j = 0; j < msd.size(); ++j) msd[j] += msd_sum[static_cast<std::size_t>(c)][j];
  }
  for (double& u : corr) u /= static_cast<double>(n_traj);
  for (double& u : msd) u /= static_cast<double>(n_traj);

  std::vector<double> fit_t, fit_log;
  double gk = 0.5 * corr[0];
  for (std::size_t j = 0; j < corr.size(); ++j) {
    out.lag_times.push_back(static_cast<double>(j) * dt);
    out.velocity_correlation.push_back(corr[j]);
    if (j > 0) gk += corr[j];
    if (corr[j] > 0.2 * corr[0]) {
      fit_t.push_back(static_cast<double>(j) * dt);
      fit_log.push_back(std::log(corr[j]));
    }
  }
  out.diffusion_green_kubo = gk * dt;
  if (fit_t.size() >= 2) out.correlation_rate = -numerics::linear_fit(fit_t, fit_log).slope;

  const long stride = std::max(1L, m_lags / 200);
  for (long lag = 0; lag <= m_lags; lag += stride) {
    out.msd_times.push_back(static_cast<double>(lag) * dt);
    out.msd.push_back(msd[static_cast<std::size_t>(lag)]);
  }
  const Spread d = spread(slope);
  out.diffusion_msd = d.mean;
  out.diffusion_msd_error = d.error;
  out.diffusion_spectrum = spread(spectral).mean;
  out.final_velocities = std::move(vf);
  out.final_positions = std::move(xf);
  return out;
}

// ---------------------------------------------------------------------------

std::vector<double> Grid1D::centers() const {
  std::vector<double> c(static_cast<std::size_t>(cells));
  for (long i = 0; i < cells; ++i) c[static_cast<std::size_t>(i)] = center(i);
  return c;
}

namespace {

// Face flux a·ρ_left − b·ρ_right with Bernoulli weights; b = a − u.
struct FaceCoefficients {
  std::vector<double> from_left;
  std::vector<double> from_right;
};

FaceCoefficients face_coefficients(const Grid1D& g, const std::function<double(double)>& drift, double D) {
  const double dx = g.spacing();
  FaceCoefficients f;
  for (long i = 0; i + 1 < g.cells; ++i) {
    const double u = drift ? drift(g.lo + static_cast<double>(i + 1) * dx) : 0.0;
    double a;
    if (D == 0.0) {
      a = std::max(u, 0.0);
    } else {
      const double pe = u * dx / D;
      a = std::abs(pe) < 1e-10 ? D / dx + 0.5 * u : u / -std::expm1(-pe);
    }
    f.from_left.push_back(a);
    f.from_right.push_back(a - u);
  }
  return f;
}

double max_step(const Grid1D& g, const FaceCoefficients& f) {
  double worst = 0.0;
  for (long i = 0; i < g.cells; ++i) {
    double out = 0.0;
    if (i + 1 < g.cells) out += f.from_left[static_cast<std::size_t>(i)];
    if (i > 0) out += f.from_right[static_cast<std::size_t>(i - 1)];
    worst = std::max(worst, out);
  }
  return worst > 0.0 ? g.spacing() / worst : numerics::kInf;
}

}  // namespace

double fokker_planck_max_step(const Grid1D& grid, const std::function<double(double)>& drift, double diffusion) {
  require(grid.cells >= 2 && grid.hi > grid.lo && diffusion >= 0.0, ErrorKind::Grid,
          "fokker_planck: need at least two cells, hi > lo and D >= 0");
  return max_step(grid, face_coefficients(grid, drift, diffusion));
}

FokkerPlanckResult fokker_planck_1d(const Grid1D& grid, const std::function<double(double)>& drift,
                                    double diffusion, const std::vector<double>& rho0, double t, double dt) {
  require(grid.cells >= 2 && grid.hi > grid.lo && diffusion >= 0.0, ErrorKind::Grid,
          "fokker_planck: need at least two cells, hi > lo and D >= 0");
  require(static_cast<long>(rho0.size()) == grid.cells, ErrorKind::Grid, "fokker_planck: rho0 size must match the grid");
  require(t >= 0.0 && dt >= 0.0, ErrorKind::Domain, "fokker_planck: t and dt must be nonnegative");
  const double dx = grid.spacing();
  const FaceCoefficients f = face_coefficients(grid, drift, diffusion);
  const double limit = max_step(grid, f);
  if (dt == 0.0) dt = std::isfinite(limit) ? 0.45 * limit : (t > 0.0 ? t : 1.0);
  if (dt > limit * (1.0 + 1e-12)) {
    throw Error(ErrorKind::Stability, "fokker_planck: dt exceeds the explicit stability limit " + std::to_string(limit));
  }
  const long steps = t > 0.0 ? static_cast<long>(std::ceil(t / dt - 1e-9)) : 0;
  if (steps > 0) dt = t / static_cast<double>(steps);

  std::vector<double> rho = rho0, flux(static_cast<std::size_t>(grid.cells - 1));
  const double ratio = dt / dx;
  for (long s = 0; s < steps; ++s) {
    for (std::size_t i = 0; i + 1 < rho.size(); ++i) flux[i] = f.from_left[i] * rho[i] - f.from_right[i] * rho[i + 1];
    for (std::size_t i = 0; i < rho.size(); ++i) {
      double net = 0.0;
      if (i + 1 < rho.size()) net += flux[i];
      if (i > 0) net -= flux[i - 1];
      rho[i] -= ratio * net;
    }
  }
  FokkerPlanckResult out;
  for (double r : rho) out.mass += r * dx;
  out.density = std::move(rho);
  out.dt = dt;
  out.steps = steps;
  return out;
}

double mean(const Grid1D& grid, const std::vector<double>& rho) {
  double m = 0.0, norm = 0.0;
  for (long i = 0; i < grid.cells; ++i) {
    m += grid.center(i) * rho[static_cast<std::size_t>(i)];
    norm += rho[static_cast<std::size_t>(i)];
  }
  return m / norm;
}

double variance(const Grid1D& grid, const std::vector<double>& rho) {
  const double mu = mean(grid, rho);
  double v = 0.0, norm = 0.0;
  for (long i = 0; i < grid.cells; ++i) {
    const double d = grid.center(i) - mu;
    v += d * d * rho[static_cast<std::size_t>(i)];
    norm += rho[static_cast<std::size_t>(i)];
  }
  return v / norm;
}

double kl_divergence(const Grid1D& grid, const std::vector<double>& p, const std::vector<double>& q) {
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) kl += p[i] * std::log(p[i] / q[i]);
  }
  return kl * grid.spacing();
}

// ---------------------------------------------------------------------------

RateMatrix::RateMatrix(Eigen::MatrixXd w) : w_(std::move(w)) {
  require(w_.rows() == w_.cols() && w_.rows() > 0, ErrorKind::Domain, "rate matrix must be square and nonempty");
  require(w_.allFinite(), ErrorKind::Domain, "rate matrix has non-finite entries");
  const double scale = std::max(1.0, w_.cwiseAbs().maxCoeff());
  for (long m = 0; m < w_.cols(); ++m) {
    for (long n = 0; n < w_.rows(); ++n) {
      require(n == m || w_(n, m) >= 0.0, ErrorKind::Domain, "rate matrix: negative off-diagonal rate");
    }
    require(std::abs(w_.col(m).sum()) <= 1e-12 * scale * static_cast<double>(w_.rows()), ErrorKind::Domain,
            "rate matrix: columns must sum to zero");
  }
}

RateMatrix RateMatrix::from_rates(const Eigen::MatrixXd& rates) {
  Eigen::MatrixXd w = rates;
  for (long m = 0; m < w.cols(); ++m) {
    w(m, m) = 0.0;
    w(m, m) = -w.col(m).sum();
  }
  return RateMatrix(std::move(w));
}

double RateMatrix::max_escape_rate() const { return (-w_.diagonal()).maxCoeff(); }

RateMatrix bath_rates(const std::vector<double>& energies, const Eigen::MatrixXd& driving,
                      const Eigen::MatrixXd& bath, double bath_temperature) {
  const auto n = static_cast<long>(energies.size());
  require(n > 0 && driving.rows() == n && driving.cols() == n && bath.rows() == n && bath.cols() == n,
          ErrorKind::Domain, "bath_rates: coupling matrices must match the level count");
  require(bath_temperature > 0.0, ErrorKind::Domain, "bath_rates: bath temperature must be positive");
  require(driving.isApprox(driving.transpose()) && bath.isApprox(bath.transpose()), ErrorKind::Domain,
          "bath_rates: coupling matrices must be symmetric");
  Eigen::MatrixXd rates = Eigen::MatrixXd::Zero(n, n);
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < n; ++j) {
      if (i == j) continue;
      const double x = (energies[static_cast<std::size_t>(i)] - energies[static_cast<std::size_t>(j)]) / bath_temperature;
      rates(i, j) = driving(i, j) + 2.0 * bath(i, j) / (1.0 + std::exp(x));
    }
  }
  return RateMatrix::from_rates(rates);
}

namespace {

void normalise_columns(Eigen::MatrixXd& m) {
  for (long j = 0; j < m.cols(); ++j) m.col(j) /= m.col(j).sum();
}

}  // namespace

Eigen::MatrixXd rate_propagator(const RateMatrix& w, double t) {
  require(t >= 0.0, ErrorKind::Domain, "rate_propagator: t must be nonnegative");
  const long n = w.size();
  const double lambda = w.max_escape_rate();
  if (lambda == 0.0 || t == 0.0) return Eigen::MatrixXd::Identity(n, n);
  int squarings = 0;
  double h = t;
  while (lambda * h > 0.5) {
    h *= 0.5;
    ++squarings;
  }
  Eigen::MatrixXd jump = Eigen::MatrixXd::Identity(n, n) + w.matrix() / lambda;
  jump = jump.cwiseMax(0.0);
  const double x = lambda * h;
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
  double weight = std::exp(-x);
  Eigen::MatrixXd m = weight * term;
  for (int k = 1; weight > 1e-20 || k <= x; ++k) {
    term = jump * term;
    weight *= x / k;
    m += weight * term;
  }
  normalise_columns(m);
  for (int s = 0; s < squarings; ++s) {
    m = m * m;
    normalise_columns(m);
  }
  return m;
}

Eigen::VectorXd rate_evolve(const RateMatrix& w, const Eigen::VectorXd& p0, double t) {
  require(p0.size() == w.size(), ErrorKind::Domain, "rate_evolve: p0 size must match W");
  require((p0.array() >= 0.0).all() && std::abs(p0.sum() - 1.0) < 1e-12, ErrorKind::Domain,
          "rate_evolve: p0 must be a probability vector");
  Eigen::VectorXd p = rate_propagator(w, t) * p0;
  return p / p.sum();
}

std::vector<std::vector<long>> closed_classes(const RateMatrix& w) {
  const long n = w.size();
  // reach(a, b): b reachable from a.
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> reach(n, n);
  for (long a = 0; a < n; ++a) {
    for (long b = 0; b < n; ++b) reach(a, b) = a == b || w.matrix()(b, a) > 0.0;
  }
  for (long k = 0; k < n; ++k) {
    for (long a = 0; a < n; ++a) {
      if (!reach(a, k)) continue;
      for (long b = 0; b < n; ++b) reach(a, b) = reach(a, b) || reach(k, b);
    }
  }
  std::vector<std::vector<long>> classes;
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (long a = 0; a < n; ++a) {
    if (seen[static_cast<std::size_t>(a)]) continue;
    std::vector<long> cls;
    for (long b = 0; b < n; ++b) {
      if (reach(a, b) && reach(b, a)) {
        cls.push_back(b);
        seen[static_cast<std::size_t>(b)] = true;
      }
    }
    bool closed = true;
    for (long b = 0; b < n && closed; ++b) closed = !(reach(a, b) && !reach(b, a));
    if (closed) classes.push_back(std::move(cls));
  }
  return classes;
}

Eigen::VectorXd rate_steady_state(const RateMatrix& w, double tol, long max_iter) {
  const auto classes = closed_classes(w);
  if (classes.size() != 1) {
    std::string msg = "rate_steady_state: " + std::to_string(classes.size()) + " closed classes:";
    for (const auto& c : classes) {
      msg += " {";
      for (std::size_t i = 0; i < c.size(); ++i) msg += (i ? "," : "") + std::to_string(c[i]);
      msg += "}";
    }
    throw Error(ErrorKind::SingularRates, msg);
  }
  const long n = w.size();
  const double lambda = w.max_escape_rate();
  if (lambda == 0.0) return Eigen::VectorXd::Ones(1);

  // Power iteration on the propagator over a reference time, doubled every round.
  Eigen::MatrixXd m = rate_propagator(w, 1.0 / lambda);
  for (long it = 0; it < std::min<long>(max_iter, 200); ++it) {
    const Eigen::VectorXd first = m.col(0);
    double spread = 0.0;
    for (long j = 1; j < n; ++j) spread = std::max(spread, (m.col(j) - first).cwiseAbs().maxCoeff());
    if (spread <= tol) {
      Eigen::VectorXd p = m.rowwise().mean();
      return p / p.sum();
    }
    m = m * m;
    normalise_columns(m);
  }
  if (n <= 200) {
    Eigen::MatrixXd a(n + 1, n);
    a.topRows(n) = w.matrix();
    a.row(n).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
    rhs(n) = 1.0;
    Eigen::VectorXd p = a.colPivHouseholderQr().solve(rhs).cwiseMax(0.0);
    return p / p.sum();
  }
  throw NonConvergenceError("rate_steady_state", 0.0, numerics::kInf);
}

double kl_divergence(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  require(p.size() == q.size(), ErrorKind::Domain, "kl_divergence: size mismatch");
  double kl = 0.0;
  for (long i = 0; i < p.size(); ++i) {
    if (p(i) > 0.0) kl += p(i) * std::log(p(i) / q(i));
  }
  return kl;
}

Eigen::VectorXd gibbs(const std::vector<double>& energies, double T) {
  require(!energies.empty() && T > 0.0, ErrorKind::Domain, "gibbs: need levels and T > 0");
  const double lowest = *std::min_element(energies.begin(), energies.end());
  Eigen::VectorXd p(static_cast<long>(energies.size()));
  for (std::size_t i = 0; i < energies.size(); ++i) {
    p(static_cast<long>(i)) = std::isinf(T) ? 1.0 : std::exp(-(energies[i] - lowest) / T);
  }
  return p / p.sum();
}

}  // namespace statmech::stochastic
