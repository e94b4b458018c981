#include "statmech/noneq.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include <Eigen/Eigenvalues>

#include "statmech/stochastic.hpp"

namespace statmech::noneq {

using cd = std::complex<double>;

namespace {

constexpr double kExpLimit = 700.0;

double log_sum_exp(const std::vector<double>& x, const std::vector<double>* log_w = nullptr) {
  double top = -numerics::kInf;
  for (std::size_t i = 0; i < x.size(); ++i) top = std::max(top, x[i] + (log_w ? (*log_w)[i] : 0.0));
  if (!std::isfinite(top)) return top;
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += std::exp(x[i] + (log_w ? (*log_w)[i] : 0.0) - top);
  return top + std::log(sum);
}

double hermiticity_error(const Matrix& h) { return (h - h.adjoint()).cwiseAbs().maxCoeff(); }

Eigen::SelfAdjointEigenSolver<Matrix> eig(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  require(es.info() == Eigen::Success, ErrorKind::NonConvergence, "Hamiltonian diagonalisation failed");
  return es;
}

double free_energy_of(const Eigen::VectorXd& e, double T) {
  std::vector<double> x(static_cast<std::size_t>(e.size()));
  for (long i = 0; i < e.size(); ++i) x[static_cast<std::size_t>(i)] = -e(i) / T;
  return -T * log_sum_exp(x);
}

template <class Body>
void parallel_chunks(long n, int threads, Body body) {
  const long workers = std::clamp<long>(threads > 0 ? threads : static_cast<long>(std::thread::hardware_concurrency()),
                                        1, std::max<long>(1, n));
  if (workers == 1) {
    for (long i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(workers));
  for (long w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (long i = w; i < n; i += workers) body(i);
      } catch (...) {
        failures[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& f : failures)
    if (f) std::rethrow_exception(f);
}

}  // namespace

void WorkSampleSet::validate() const {
  require(beta > 0.0 && std::isfinite(beta), ErrorKind::Domain, "work samples need a positive finite beta");
  for (double s : samples) require(std::isfinite(s), ErrorKind::Domain, "work samples must be finite");
}

// ---------------------------------------------------------------------------

Matrix Protocol::hamiltonian(double lambda) const {
  if (interpolation == Interpolation::Custom) {
    require(static_cast<bool>(family), ErrorKind::Domain, "custom protocol needs an H(λ) family");
    return family(lambda);
  }
  return (1.0 - lambda) * start + lambda * end;
}

Matrix Protocol::at_time(double t) const { return at_fraction(duration > 0.0 ? t / duration : 0.0); }

Matrix Protocol::at_fraction(double u) const {
  u = std::clamp(u, 0.0, 1.0);
  if (reverse) u = 1.0 - u;
  const double lambda = schedule ? schedule(u) : u;
  const Matrix h = hamiltonian(lambda);
  return reverse ? Matrix(h.conjugate()) : h;
}

Protocol Protocol::reversed() const {
  Protocol r = *this;
  r.reverse = !reverse;
  return r;
}

void Protocol::validate() const {
  require(duration >= 0.0 && std::isfinite(duration), ErrorKind::Domain, "protocol duration must be finite and >= 0");
  if (interpolation == Interpolation::Linear) {
    require(start.rows() == start.cols() && start.rows() > 0 && start.rows() == end.rows() && end.rows() == end.cols(),
            ErrorKind::Domain, "protocol endpoints must be square matrices of equal size");
  } else {
    require(static_cast<bool>(family), ErrorKind::Domain, "custom protocol needs an H(λ) family");
  }
  double prev = -numerics::kInf;
  for (int i = 0; i <= 100; ++i) {
    const double u = i / 100.0;
    const double lambda = schedule ? schedule(u) : u;
    require(std::isfinite(lambda) && lambda >= prev - 1e-14, ErrorKind::Domain, "schedule must be monotone");
    prev = lambda;
    const Matrix h = hamiltonian(lambda);
    require(h.rows() == h.cols() && h.rows() > 0, ErrorKind::Domain, "H(λ) must be square");
    require(hermiticity_error(h) <= 1e-12 * std::max(1.0, h.cwiseAbs().maxCoeff()), ErrorKind::Domain,
            "H(λ) must be Hermitian");
  }
  const double l0 = schedule ? schedule(0.0) : 0.0, l1 = schedule ? schedule(1.0) : 1.0;
  require(std::abs(l0) < 1e-12 && std::abs(l1 - 1.0) < 1e-12, ErrorKind::Domain, "schedule must map onto [0, 1]");
}

Protocol linear_protocol(const Matrix& start, const Matrix& end, double duration) {
  Protocol p;
  p.start = start;
  p.end = end;
  p.duration = duration;
  return p;
}

Matrix evolution_operator(const Protocol& p, const EvolutionOptions& opts) {
  p.validate();
  const Matrix h0 = p.at_time(0.0);
  const long n = h0.rows();
  if (p.duration == 0.0) return Matrix::Identity(n, n);
  long steps = opts.steps;
  if (steps <= 0) {
    double spread = 0.0;
    for (int i = 0; i <= 8; ++i) {
      const Eigen::VectorXd e = eig(p.at_time(p.duration * i / 8.0)).eigenvalues();
      spread = std::max(spread, e.cwiseAbs().maxCoeff());
    }
    steps = std::max<long>(64, static_cast<long>(std::ceil(100.0 * p.duration * std::max(spread, 1e-3))));
  }
  const double h = p.duration / static_cast<double>(steps);
  const double c1 = 0.5 - std::sqrt(3.0) / 6.0, c2 = 0.5 + std::sqrt(3.0) / 6.0;
  Matrix U = Matrix::Identity(n, n);
  for (long k = 0; k < steps; ++k) {
    const double t = h * static_cast<double>(k);
    const Matrix H1 = p.at_time(t + c1 * h), H2 = p.at_time(t + c2 * h);
    // Ω = −i K with K Hermitian: K = (h/2)(H1 + H2) − i(√3/12)h²[H2, H1].
    const Matrix K = 0.5 * h * (H1 + H2) - cd(0.0, std::sqrt(3.0) / 12.0 * h * h) * (H2 * H1 - H1 * H2);
    const auto es = eig(0.5 * (K + K.adjoint()));
    Eigen::VectorXcd phase(n);
    for (long i = 0; i < n; ++i) phase(i) = std::exp(cd(0.0, -es.eigenvalues()(i)));
    U = es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint() * U;
    if ((k + 1) % 64 == 0 || k + 1 == steps) {
      // Newton-Schulz step toward the unitary polar factor; round-off otherwise accumulates.
      for (int it = 0; it < 2; ++it) U = 0.5 * U * (3.0 * Matrix::Identity(n, n) - U.adjoint() * U);
    }
  }
  return U;
}

double WorkKernel::stochasticity_error() const {
  const double rows = (transition.rowwise().sum().array() - 1.0).abs().maxCoeff();
  const double cols = (transition.colwise().sum().array() - 1.0).abs().maxCoeff();
  return std::max(rows, cols);
}

std::pair<std::vector<double>, std::vector<double>> WorkKernel::merged(double tol) const {
  std::vector<std::size_t> order(work.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return work[a] < work[b]; });
  std::vector<double> w, p;
  for (auto i : order) {
    if (!w.empty() && work[i] - w.back() <= tol) {
      p.back() += weight[i];
    } else {
      w.push_back(work[i]);
      p.push_back(weight[i]);
    }
  }
  return {w, p};
}

WorkKernel work_distribution(const Protocol& p, double T0, const EvolutionOptions& opts) {
  require(T0 > 0.0 && std::isfinite(T0), ErrorKind::Domain, "work_distribution: temperature must be positive");
  const Matrix U = evolution_operator(p, opts);
  const long n = U.rows();
  require(n <= 20, ErrorKind::Domain, "work_distribution: exact kernel limited to dimension 20");
  const auto a = eig(p.at_fraction(0.0));
  const auto b = eig(p.at_fraction(1.0));

  WorkKernel k;
  k.temperature = T0;
  k.initial_energies = a.eigenvalues();
  k.final_energies = b.eigenvalues();
  const double fa = free_energy_of(k.initial_energies, T0);
  k.free_energy = free_energy_of(k.final_energies, T0) - fa;
  k.initial_populations = ((-(k.initial_energies.array() - fa)) / T0).exp().matrix();
  k.transition = (b.eigenvectors().adjoint() * U * a.eigenvectors()).cwiseAbs2();
  for (long m = 0; m < n; ++m)
    for (long i = 0; i < n; ++i) {
      k.work.push_back(k.final_energies(m) - k.initial_energies(i));
      k.weight.push_back(k.initial_populations(i) * k.transition(m, i));
    }
  return k;
}

WorkSampleSet sample_work(const WorkKernel& k, long n, numerics::RandomStream& rng) {
  require(n > 0, ErrorKind::Domain, "sample_work: sample count must be positive");
  std::vector<double> cdf(k.weight.size());
  std::partial_sum(k.weight.begin(), k.weight.end(), cdf.begin());
  WorkSampleSet set;
  set.beta = 1.0 / k.temperature;
  set.free_energy = k.free_energy;
  set.samples.reserve(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    const double u = rng.uniform() * cdf.back();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
    set.samples.push_back(k.work[idx]);
  }
  return set;
}

// ---------------------------------------------------------------------------

CrooksCheck crooks_check(const WorkKernel& forward, const WorkKernel& reverse, double floor) {
  require(std::abs(forward.temperature - reverse.temperature) <= 1e-12 * forward.temperature, ErrorKind::Domain,
          "crooks_check: forward and reverse temperatures differ");
  const double T = forward.temperature;
  const auto [wf, pf] = forward.merged();
  const auto [wr, pr] = reverse.merged();
  CrooksCheck out;
  out.free_energy = forward.free_energy;
  for (std::size_t i = 0; i < wf.size(); ++i) {
    if (pf[i] <= floor) continue;
    const double target = -wf[i];
    const double tol = 1e-9 * (1.0 + std::abs(target));
    const auto it = std::lower_bound(wr.begin(), wr.end(), target - tol);
    if (it == wr.end() || std::abs(*it - target) > tol)
      throw Error(ErrorKind::SupportMismatch, "reverse kernel has no atom at W = " + std::to_string(target));
    const double mirror = pr[static_cast<std::size_t>(it - wr.begin())];
    if (mirror <= floor) continue;
    out.work.push_back(wf[i]);
    out.log_ratio.push_back(std::log(pf[i]) - std::log(mirror));
    out.expected.push_back((wf[i] - out.free_energy) / T);
    out.error.push_back(0.0);
    out.residual = std::max(out.residual, std::abs(out.log_ratio.back() - out.expected.back()));
  }
  return out;
}

CrooksCheck crooks_check(const WorkSampleSet& forward, const WorkSampleSet& reverse, long min_count) {
  forward.validate();
  reverse.validate();
  require(!forward.samples.empty() && !reverse.samples.empty(), ErrorKind::EmptyInput,
          "crooks_check: both sample sets must be nonempty");
  require(std::abs(forward.beta - reverse.beta) <= 1e-12 * forward.beta, ErrorKind::Domain,
          "crooks_check: forward and reverse temperatures differ");
  const double T = forward.temperature();
  CrooksCheck out;
  if (forward.free_energy) {
    out.free_energy = *forward.free_energy;
  } else if (reverse.free_energy) {
    out.free_energy = -*reverse.free_energy;
  } else {
    out.free_energy = jarzynski_estimate(forward).free_energy;
  }

  std::vector<double> mirrored(reverse.samples.size());
  std::transform(reverse.samples.begin(), reverse.samples.end(), mirrored.begin(), [](double w) { return -w; });
  std::vector<double> pooled = forward.samples;
  pooled.insert(pooled.end(), mirrored.begin(), mirrored.end());
  std::sort(pooled.begin(), pooled.end());
  const auto quantile = [&](double q) { return pooled[static_cast<std::size_t>(q * (pooled.size() - 1))]; };
  const double iqr = quantile(0.75) - quantile(0.25);
  const double lo = pooled.front(), hi = pooled.back();
  double width = 2.0 * iqr / std::cbrt(static_cast<double>(pooled.size()));
  if (!(width > 0.0)) width = std::max(hi - lo, 1.0) / std::sqrt(static_cast<double>(pooled.size()));
  const long bins = std::max<long>(1, static_cast<long>(std::ceil((hi - lo) / width)) + 1);

  std::vector<long> nf(static_cast<std::size_t>(bins), 0), nr(static_cast<std::size_t>(bins), 0);
  std::vector<double> work_sum(static_cast<std::size_t>(bins), 0.0);
  std::vector<std::vector<double>> boltz(static_cast<std::size_t>(bins));
  const auto bin_of = [&](double w) {
    return std::clamp<long>(static_cast<long>(std::floor((w - lo) / width)), 0, bins - 1);
  };
  for (double w : forward.samples) {
    const auto b = static_cast<std::size_t>(bin_of(w));
    ++nf[b];
    work_sum[b] += w;
  }
  for (double w : mirrored) {
    const auto b = static_cast<std::size_t>(bin_of(w));
    ++nr[b];
    boltz[b].push_back(w / T);
  }
  const double Nf = static_cast<double>(forward.samples.size()), Nr = static_cast<double>(mirrored.size());
  for (long b = 0; b < bins; ++b) {
    const auto i = static_cast<std::size_t>(b);
    if (nf[i] < min_count || nr[i] < min_count) continue;
    // Within one bin the ratio of probabilities equals the reverse-weighted mean of e^{(W−ΔF)/T}.
    const double expected =
        log_sum_exp(boltz[i]) - std::log(static_cast<double>(boltz[i].size())) - out.free_energy / T;
    out.work.push_back(work_sum[i] / static_cast<double>(nf[i]));
    out.log_ratio.push_back(std::log(nf[i] / Nf) - std::log(nr[i] / Nr));
    out.expected.push_back(expected);
    out.error.push_back(std::sqrt(1.0 / nf[i] + 1.0 / nr[i]));
    const double dev = std::abs(out.log_ratio.back() - expected);
    out.residual = std::max(out.residual, dev);
    out.max_z = std::max(out.max_z, dev / out.error.back());
  }
  return out;
}

// ---------------------------------------------------------------------------

JarzynskiEstimate jarzynski_estimate(const WorkSampleSet& w) {
  w.validate();
  require(!w.samples.empty(), ErrorKind::EmptyInput, "jarzynski_estimate: no samples");
  const double T = w.temperature();
  const auto n = static_cast<double>(w.samples.size());
  std::vector<double> x(w.samples.size());
  std::transform(w.samples.begin(), w.samples.end(), x.begin(), [&](double s) { return -s / T; });
  const double top = *std::max_element(x.begin(), x.end());
  double sum = 0.0;
  for (double v : x) sum += std::exp(v - top);

  JarzynskiEstimate out;
  out.free_energy = -T * (top + std::log(sum / n));
  out.mean_work = std::accumulate(w.samples.begin(), w.samples.end(), 0.0) / n;
  if (w.samples.size() > 1) {
    std::vector<double> loo(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double rest = std::max(sum - std::exp(x[i] - top), std::numeric_limits<double>::min());
      loo[i] = -T * (top + std::log(rest / (n - 1.0)));
    }
    const double mean_loo = std::accumulate(loo.begin(), loo.end(), 0.0) / n;
    double var = 0.0;
    for (double v : loo) var += (v - mean_loo) * (v - mean_loo);
    out.error = std::sqrt((n - 1.0) / n * var);
    out.bias = (n - 1.0) * (mean_loo - out.free_energy);
  }
  out.dissipated = out.mean_work - out.free_energy;
  out.max_work_principle = out.dissipated >= -1e-12 * std::max(1.0, std::abs(out.mean_work));
  return out;
}

JarzynskiEstimate jarzynski_estimate(const WorkKernel& k) {
  std::vector<double> x, logw;
  JarzynskiEstimate out;
  for (std::size_t i = 0; i < k.work.size(); ++i) {
    if (k.weight[i] <= 0.0) continue;
    x.push_back(-k.work[i] / k.temperature);
    logw.push_back(std::log(k.weight[i]));
    out.mean_work += k.weight[i] * k.work[i];
  }
  require(!x.empty(), ErrorKind::EmptyInput, "jarzynski_estimate: empty kernel");
  out.free_energy = -k.temperature * log_sum_exp(x, &logw);
  out.dissipated = out.mean_work - out.free_energy;
  out.max_work_principle = out.dissipated >= -1e-12 * std::max(1.0, std::abs(out.mean_work));
  return out;
}

// ---------------------------------------------------------------------------

namespace {

BetaSymmetry beta_symmetry_impl(const std::vector<double>& values, const std::vector<double>& log_w, double beta,
                                long grid, double half_width, bool sampled) {
  require(beta >= 0.0 && std::isfinite(beta), ErrorKind::Domain, "beta_symmetry: beta must be finite and >= 0");
  require(grid >= 1, ErrorKind::Domain, "beta_symmetry: grid needs at least one point");
  require(!values.empty(), ErrorKind::EmptyInput, "beta_symmetry: empty distribution");
  const double half = half_width > 0.0 ? half_width : 0.5 * beta;
  const double centre = 0.5 * beta;
  double extreme = 0.0;
  for (double s : values) {
    require(std::isfinite(s), ErrorKind::Domain, "beta_symmetry: values must be finite");
    extreme = std::max(extreme, std::abs(s));
  }
  require((centre + half) * extreme < kExpLimit, ErrorKind::Overflow,
          "beta_symmetry: λ·|s| beyond the exponent range of double");

  const double norm = log_sum_exp(log_w);
  BetaSymmetry out;
  std::vector<double> x(values.size());
  for (long k = 0; k < grid; ++k) {
    const double lambda = grid == 1 ? centre : centre - half + 2.0 * half * static_cast<double>(k) / (grid - 1);
    for (std::size_t i = 0; i < values.size(); ++i) x[i] = -lambda * values[i];
    out.lambda.push_back(lambda);
    out.g.push_back(log_sum_exp(x, &log_w) - norm);
  }
  for (std::size_t k = 0; k < out.g.size(); ++k)
    out.symmetry_residual = std::max(out.symmetry_residual, std::abs(out.g[out.g.size() - 1 - k] - out.g[k]));
  for (std::size_t i = 0; i < values.size(); ++i) x[i] = -beta * values[i];
  out.convex_average = log_sum_exp(x, &log_w) - norm;

  double mean = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) mean += std::exp(log_w[i] - norm) * values[i];
  double var = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    var += std::exp(log_w[i] - norm) * (values[i] - mean) * (values[i] - mean);
  const auto n = static_cast<double>(values.size());
  if (sampled && n > 1) var *= n / (n - 1.0);
  out.mean = mean;
  out.variance = var;
  out.gaussian_residual = mean - 0.5 * beta * var;
  if (sampled && n > 1) out.gaussian_error = std::sqrt(var / n + 0.25 * beta * beta * 2.0 * var * var / (n - 1.0));
  return out;
}

}  // namespace

BetaSymmetry beta_symmetry(const std::vector<double>& samples, double beta, long grid, double half_width) {
  return beta_symmetry_impl(samples, std::vector<double>(samples.size(), 0.0), beta, grid, half_width, true);
}

BetaSymmetry beta_symmetry(const std::vector<double>& values, const std::vector<double>& weights, double beta,
                           long grid, double half_width) {
  require(values.size() == weights.size(), ErrorKind::Domain, "beta_symmetry: one weight per value");
  std::vector<double> v, logw;
  for (std::size_t i = 0; i < values.size(); ++i) {
    require(weights[i] >= 0.0, ErrorKind::Domain, "beta_symmetry: weights must be nonnegative");
    if (weights[i] == 0.0) continue;
    v.push_back(values[i]);
    logw.push_back(std::log(weights[i]));
  }
  return beta_symmetry_impl(v, logw, beta, grid, half_width, false);
}

// ---------------------------------------------------------------------------

void TwoBathModel::validate() const {
  const long n = size();
  require(n >= 2, ErrorKind::Domain, "two-bath model needs at least two levels");
  require(t_hot > 0.0 && t_cold > 0.0, ErrorKind::Domain, "bath temperatures must be positive");
  for (const auto* c : {&hot_coupling, &cold_coupling}) {
    require(c->rows() == n && c->cols() == n, ErrorKind::Domain, "bath couplings must be n × n");
    require(((*c) - c->transpose()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, c->cwiseAbs().maxCoeff()),
            ErrorKind::Domain, "bath couplings must be symmetric");
    require(c->minCoeff() >= 0.0, ErrorKind::Domain, "bath couplings must be nonnegative");
  }
}

Eigen::MatrixXd TwoBathModel::rates(int bath) const {
  require(bath == 0 || bath == 1, ErrorKind::Domain, "bath index must be 0 (hot) or 1 (cold)");
  const Eigen::MatrixXd& c = bath == 0 ? hot_coupling : cold_coupling;
  const double T = bath == 0 ? t_hot : t_cold;
  const long n = size();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (long to = 0; to < n; ++to)
    for (long from = 0; from < n; ++from) {
      if (to == from) continue;
      const double x = (energies[static_cast<std::size_t>(to)] - energies[static_cast<std::size_t>(from)]) / T;
      // 2/(1 + e^x) written to stay finite for large |x|.
      w(to, from) = c(to, from) * (x > 0.0 ? 2.0 * std::exp(-x) / (1.0 + std::exp(-x)) : 2.0 / (1.0 + std::exp(x)));
    }
  return w;
}

Eigen::MatrixXd TwoBathModel::generator() const {
  Eigen::MatrixXd w = rates(0) + rates(1);
  for (long m = 0; m < w.cols(); ++m) w(m, m) = -w.col(m).sum();
  return w;
}

double entropy_production(const TwoBathModel& m, const std::vector<Jump>& path) {
  double s = 0.0;
  for (const auto& j : path) {
    require(j.from >= 0 && j.from < m.size() && j.to >= 0 && j.to < m.size() && (j.bath == 0 || j.bath == 1),
            ErrorKind::Domain, "entropy_production: jump out of range");
    const double q = m.energies[static_cast<std::size_t>(j.to)] - m.energies[static_cast<std::size_t>(j.from)];
    s -= q / (j.bath == 0 ? m.t_hot : m.t_cold);
  }
  return s;
}

double path_log_weight(const TwoBathModel& m, const std::vector<Jump>& path, const std::vector<double>& dwell) {
  require(dwell.size() == path.size() + 1, ErrorKind::Domain, "path_log_weight: one dwell time per visited state");
  const Eigen::MatrixXd w[2] = {m.rates(0), m.rates(1)};
  const Eigen::VectorXd escape = (w[0] + w[1]).colwise().sum().transpose();
  if (path.empty()) return 0.0;
  double logp = -escape(path.front().from) * dwell.front();
  for (std::size_t k = 0; k < path.size(); ++k) {
    const auto& j = path[k];
    require(k == 0 || path[k - 1].to == j.from, ErrorKind::Domain, "path_log_weight: jumps are not contiguous");
    logp += std::log(w[j.bath](j.to, j.from)) - escape(j.to) * dwell[k + 1];
  }
  return logp;
}

HeatHistogram symmetric_histogram(const std::vector<double>& x) {
  require(!x.empty(), ErrorKind::EmptyInput, "symmetric_histogram: no data");
  std::vector<double> sorted = x;
  std::sort(sorted.begin(), sorted.end());
  const auto quantile = [&](double q) { return sorted[static_cast<std::size_t>(q * (sorted.size() - 1))]; };
  const double reach = std::max(std::abs(sorted.front()), std::abs(sorted.back()));
  HeatHistogram h;
  h.width = 2.0 * (quantile(0.75) - quantile(0.25)) / std::cbrt(static_cast<double>(sorted.size()));
  if (!(h.width > 0.0)) h.width = reach > 0.0 ? reach / std::sqrt(static_cast<double>(sorted.size())) : 1.0;
  const long K = static_cast<long>(std::floor(reach / h.width + 0.5));
  for (long k = -K; k <= K; ++k) h.centers.push_back(static_cast<double>(k) * h.width);
  h.counts.assign(h.centers.size(), 0);
  for (double v : x) {
    const long k = std::clamp<long>(static_cast<long>(std::floor(v / h.width + 0.5)), -K, K);
    ++h.counts[static_cast<std::size_t>(k + K)];
  }
  return h;
}

HeatConduction heat_conduction_ft(const TwoBathModel& m, double t, long n_traj, const numerics::RandomStream& stream,
                                  const HeatConductionOptions& opts) {
  m.validate();
  require(t > 0.0 && std::isfinite(t), ErrorKind::Domain, "heat_conduction_ft: duration must be positive");
  require(n_traj >= 2, ErrorKind::Domain, "heat_conduction_ft: need at least two trajectories");
  const long n = m.size();
  const Eigen::MatrixXd w[2] = {m.rates(0), m.rates(1)};
  const Eigen::VectorXd escape = (w[0] + w[1]).colwise().sum().transpose();
  Eigen::VectorXd start = Eigen::VectorXd::Zero(n);
  if (opts.stationary_start) {
    start = stochastic::rate_steady_state(stochastic::RateMatrix(m.generator()));
  } else {
    start(0) = 1.0;
  }

  HeatConduction out;
  out.hot.assign(static_cast<std::size_t>(n_traj), 0.0);
  out.cold.assign(static_cast<std::size_t>(n_traj), 0.0);
  parallel_chunks(n_traj, opts.threads, [&](long i) {
    numerics::RandomStream rng = stream.split(static_cast<std::uint64_t>(i));
    double u = rng.uniform();
    long x = 0;
    while (x < n - 1 && u >= start(x)) u -= start(x++);
    double clock = 0.0, qh = 0.0, qc = 0.0;
    while (true) {
      if (escape(x) <= 0.0) break;
      clock += rng.exponential(escape(x));
      if (clock > t) break;
      double pick = rng.uniform() * escape(x);
      int bath = 0;
      long to = -1;
      for (int b = 0; b < 2 && to < 0; ++b)
        for (long y = 0; y < n; ++y) {
          if (y == x) continue;
          pick -= w[b](y, x);
          if (pick < 0.0) {
            bath = b;
            to = y;
            break;
          }
        }
      if (to < 0) {  // rounding at the top of the cumulative sum
        for (int b = 1; b >= 0 && to < 0; --b)
          for (long y = n - 1; y >= 0; --y)
            if (y != x && w[b](y, x) > 0.0) {
              bath = b;
              to = y;
              break;
            }
      }
      const double q = m.energies[static_cast<std::size_t>(to)] - m.energies[static_cast<std::size_t>(x)];
      (bath == 0 ? qh : qc) += q;
      x = to;
    }
    out.hot[static_cast<std::size_t>(i)] = qh;
    out.cold[static_cast<std::size_t>(i)] = qc;
  });

  out.heat.resize(out.hot.size());
  for (std::size_t i = 0; i < out.hot.size(); ++i) out.heat[i] = 0.5 * (out.hot[i] - out.cold[i]);
  const auto N = static_cast<double>(n_traj);
  out.mean = std::accumulate(out.heat.begin(), out.heat.end(), 0.0) / N;
  for (double q : out.heat) out.variance += (q - out.mean) * (q - out.mean);
  out.variance /= N - 1.0;
  out.mean_error = std::sqrt(out.variance / N);

  out.histogram = symmetric_histogram(out.heat);
  out.ft_expected = m.affinity();
  const long K = static_cast<long>(out.histogram.centers.size() / 2);
  const double window = std::abs(out.mean) + 2.0 * std::sqrt(out.variance);
  std::vector<double> abs_sum(out.histogram.centers.size(), 0.0);
  for (double q : out.heat) {
    const long k = std::clamp<long>(static_cast<long>(std::floor(q / out.histogram.width + 0.5)), -K, K);
    abs_sum[static_cast<std::size_t>(k + K)] += std::abs(q);
  }
  double sxx = 0.0, sxy = 0.0;
  for (long k = 1; k <= K; ++k) {
    const long cp = out.histogram.counts[static_cast<std::size_t>(K + k)];
    const long cm = out.histogram.counts[static_cast<std::size_t>(K - k)];
    if (cp < opts.min_count || cm < opts.min_count) continue;
    if (static_cast<double>(k) * out.histogram.width > window) continue;
    const double x =
        (abs_sum[static_cast<std::size_t>(K + k)] + abs_sum[static_cast<std::size_t>(K - k)]) / static_cast<double>(cp + cm);
    const double y = std::log(static_cast<double>(cp) / static_cast<double>(cm));
    const double err = std::sqrt(1.0 / cp + 1.0 / cm);
    out.ft_heat.push_back(x);
    out.ft_log_ratio.push_back(y);
    out.ft_error.push_back(err);
    out.ft_residual = std::max(out.ft_residual, std::abs(y - out.ft_expected * x));
    sxx += x * x / (err * err);
    sxy += x * y / (err * err);
  }
  if (sxx > 0.0) {
    out.ft_slope = sxy / sxx;
    out.ft_slope_error = 1.0 / std::sqrt(sxx);
  }
  const double eps = m.t_hot - m.t_cold;
  out.conductance = eps != 0.0 ? out.mean / (eps * t) : std::numeric_limits<double>::quiet_NaN();
  out.intensity = out.variance / t;
  const double T = m.mean_temperature();
  out.conductance_from_noise = out.intensity / (2.0 * T * T);
  return out;
}

}  // namespace statmech::noneq
