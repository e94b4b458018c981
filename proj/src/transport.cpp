#include "statmech/transport.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <Eigen/QR>

namespace statmech::transport {

using numerics::kPi;
using cd = std::complex<double>;

namespace {

constexpr double kTwoPi = 2.0 * kPi;

double max_entry(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

void check_square(const Matrix& S) {
  require(S.rows() == S.cols() && S.rows() > 0, ErrorKind::Domain, "scattering matrix must be square and nonempty");
}

template <class Body>
void parallel_for(long n, Body body) {
  const long workers = std::clamp<long>(static_cast<long>(std::thread::hardware_concurrency()), 1, 8);
  if (n < 64 || workers == 1) {
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

double unitarity_error(const Matrix& S) {
  check_square(S);
  return max_entry(S.adjoint() * S - Matrix::Identity(S.rows(), S.cols()));
}

void check_unitary(const Matrix& S, double tol) {
  const double err = unitarity_error(S);
  require(err < tol, ErrorKind::Unitarity, "‖S†S − 1‖ = " + std::to_string(err));
}

ScatteringMatrix::ScatteringMatrix(Matrix S, std::vector<Lead> leads, double tol)
    : S_(std::move(S)), leads_(std::move(leads)) {
  check_unitary(S_, tol);
  require(!leads_.empty(), ErrorKind::Domain, "at least one lead is required");
  std::vector<int> seen(static_cast<std::size_t>(S_.rows()), 0);
  for (const auto& lead : leads_) {
    require(!lead.channels.empty(), ErrorKind::Domain, "lead '" + lead.name + "' has no channels");
    for (long c : lead.channels) {
      require(c >= 0 && c < S_.rows(), ErrorKind::Domain, "channel index out of range in lead '" + lead.name + "'");
      ++seen[static_cast<std::size_t>(c)];
    }
  }
  for (int count : seen) require(count == 1, ErrorKind::Domain, "leads must cover every channel exactly once");
}

long ScatteringMatrix::lead_index(const std::string& name) const {
  for (std::size_t i = 0; i < leads_.size(); ++i)
    if (leads_[i].name == name) return static_cast<long>(i);
  throw Error(ErrorKind::Domain, "unknown lead '" + name + "'");
}

Matrix ScatteringMatrix::projector(long lead) const {
  require(lead >= 0 && lead < static_cast<long>(leads_.size()), ErrorKind::Domain, "lead index out of range");
  return transport::projector(leads_[static_cast<std::size_t>(lead)].channels, S_.rows());
}

std::vector<Lead> split_leads(long channels, long first) {
  require(first > 0 && first < channels, ErrorKind::Domain, "split_leads: both leads need channels");
  Lead a{"A", {}}, b{"B", {}};
  for (long c = 0; c < channels; ++c) (c < first ? a : b).channels.push_back(c);
  return {a, b};
}

Matrix projector(const std::vector<long>& channels, long n) {
  Matrix P = Matrix::Zero(n, n);
  for (long c : channels) {
    require(c >= 0 && c < n, ErrorKind::Domain, "projector: channel index out of range");
    P(c, c) = 1.0;
  }
  return P;
}

Matrix random_unitary(long n, numerics::RandomStream& rng) {
  require(n > 0, ErrorKind::Domain, "random_unitary: dimension must be positive");
  Matrix Z(n, n);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) Z(i, j) = cd(rng.gaussian(), rng.gaussian()) / std::sqrt(2.0);
  Eigen::HouseholderQR<Matrix> qr(Z);
  Matrix Q = qr.householderQ();
  const Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (long j = 0; j < n; ++j) {
    const double mag = std::abs(R(j, j));
    if (mag > 0.0) Q.col(j) *= R(j, j) / mag;
  }
  return Q;
}

// ---------------------------------------------------------------------------

Conductance landauer_conductance(const ScatteringMatrix& S, long from, long to) {
  const Matrix& s = S.matrix();
  const Matrix PA = S.projector(from), PB = S.projector(to);
  Conductance g;
  g.value = (PB * s * PA * s.adjoint()).trace().real();
  const auto& a = S.leads()[static_cast<std::size_t>(from)].channels;
  const auto& b = S.leads()[static_cast<std::size_t>(to)].channels;
  for (long bi : b)
    for (long ai : a) g.double_sum += std::norm(s(bi, ai));
  g.discrepancy = std::abs(g.value - g.double_sum);
  return g;
}

Conductance landauer_conductance(const ScatteringMatrix& S, const std::string& from, const std::string& to) {
  return landauer_conductance(S, S.lead_index(from), S.lead_index(to));
}

std::vector<double> multi_lead_currents(const ScatteringMatrix& S, const std::vector<double>& potentials) {
  const auto& leads = S.leads();
  require(potentials.size() == leads.size(), ErrorKind::Domain, "one potential per lead is required");
  const Eigen::MatrixXd g = S.probabilities();
  std::vector<double> v(static_cast<std::size_t>(S.channels()));
  for (std::size_t l = 0; l < leads.size(); ++l)
    for (long c : leads[l].channels) v[static_cast<std::size_t>(c)] = potentials[l];
  std::vector<double> currents(leads.size(), 0.0);
  for (std::size_t l = 0; l < leads.size(); ++l)
    for (long b : leads[l].channels)
      for (long a = 0; a < S.channels(); ++a)
        currents[l] -= g(b, a) * (v[static_cast<std::size_t>(b)] - v[static_cast<std::size_t>(a)]);
  return currents;
}

// ---------------------------------------------------------------------------

MatrixDerivative derivative(const MatrixFamily& S, double x, double step, double tol) {
  require(step > 0.0 && std::isfinite(step), ErrorKind::Domain, "derivative: step must be positive");
  const auto central = [&](double h) -> Matrix { return (S(x + h) - S(x - h)) / (2.0 * h); };
  double h = step;
  Matrix coarse = central(h);
  h *= 0.5;
  Matrix fine = central(h);
  Matrix best = (4.0 * fine - coarse) / 3.0;
  double last_err = numerics::kInf;
  for (int halving = 0; halving < 10; ++halving) {
    coarse = std::move(fine);
    h *= 0.5;
    fine = central(h);
    Matrix next = (4.0 * fine - coarse) / 3.0;
    const double err = max_entry(next - best);
    const double scale = std::max(1.0, max_entry(next));
    if (err <= tol * scale) return {std::move(next), err, h};
    if (halving >= 2 && err >= last_err)
      throw Error(ErrorKind::Step, "derivative estimates stopped improving (" + std::to_string(err) + ")");
    last_err = err;
    best = std::move(next);
  }
  throw Error(ErrorKind::Step, "derivative did not settle after repeated halving");
}

namespace {

struct TraceSample {
  double value = 0.0;      ///< −(i/2π) trace(P ∂S S†), real part
  double imaginary = 0.0;
  double hermiticity = 0.0;
  double error = 0.0;
};

TraceSample bpt_trace(const MatrixFamily& S, double x, const Matrix* P, double step) {
  const MatrixDerivative d = derivative(S, x, step);
  const Matrix s = S(x);
  const Matrix gen = cd(0.0, 1.0) * d.value * s.adjoint();
  const cd tr = P ? (*P * d.value * s.adjoint()).trace() : (d.value * s.adjoint()).trace();
  const cd g = cd(0.0, -1.0 / kTwoPi) * tr;
  return {g.real(), std::abs(g.imag()), 0.5 * max_entry(gen - gen.adjoint()), d.error};
}

}  // namespace

BptResult bpt_conductance(const MatrixFamily& S, double x0, const std::vector<long>& lead, double step) {
  if (step <= 0.0) step = 1e-4 * std::max(1.0, std::abs(x0));
  const Matrix s0 = S(x0);
  check_unitary(s0);
  const Matrix P = projector(lead, s0.rows());
  const TraceSample t = bpt_trace(S, x0, &P, step);
  return {t.value, t.imaginary, t.hermiticity, t.error};
}

PumpedCharge pumped_charge(const ParameterCycle& cycle, const std::vector<long>& lead, double tol, long max_samples) {
  require(static_cast<bool>(cycle.path) && static_cast<bool>(cycle.scattering), ErrorKind::Domain,
          "pumped_charge: cycle needs a path and a scattering evaluator");
  require(cycle.samples >= 8, ErrorKind::Domain, "pumped_charge: at least 8 samples per cycle");
  require(cycle.scale > 0.0, ErrorKind::Domain, "pumped_charge: scale must be positive");
  const Eigen::VectorXd start = cycle.path(0.0), end = cycle.path(1.0);
  require(start.size() == end.size() && (start - end).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, cycle.scale),
          ErrorKind::Domain, "pumped_charge: path is not closed");

  const MatrixFamily along = [&](double s) { return cycle.scattering(cycle.path(s - std::floor(s))); };
  const Matrix s0 = along(0.0);
  check_unitary(s0);
  const Matrix P = projector(lead, s0.rows());
  const double step = 1e-4 / cycle.scale;

  PumpedCharge out;
  std::vector<double> values;
  const auto sample = [&](long n, long first, long stride) {
    std::vector<TraceSample> fresh(static_cast<std::size_t>((n - first + stride - 1) / stride));
    parallel_for(static_cast<long>(fresh.size()), [&](long i) {
      const double s = static_cast<double>(first + i * stride) / static_cast<double>(n);
      fresh[static_cast<std::size_t>(i)] = bpt_trace(along, s, &P, step);
    });
    for (const auto& t : fresh) {
      values.push_back(t.value);
      out.imaginary_residue = std::max(out.imaginary_residue, t.imaginary);
      out.hermiticity_error = std::max(out.hermiticity_error, t.hermiticity);
    }
  };

  long n = cycle.samples;
  sample(n, 0, 1);
  const auto charge = [&] {
    double sum = 0.0;
    for (double v : values) sum += v;
    return -sum / static_cast<double>(values.size());
  };
  double q = charge();
  while (true) {
    if (2 * n > max_samples)
      throw Error(ErrorKind::NonConvergence, "pumped_charge: no convergence within " + std::to_string(max_samples) +
                                                 " samples");
    sample(2 * n, 1, 2);
    n *= 2;
    const double next = charge();
    out.convergence = std::abs(next - q);
    q = next;
    if (out.convergence < tol) break;
  }
  out.charge = q;
  out.samples = n;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

double phase_winding(const MatrixFamily& S, double lo, double hi, long grid) {
  const auto det_phase = [&](double e) {
    const Matrix s = S(e);
    const cd d = s.determinant();
    require(std::abs(std::abs(d) - 1.0) < 1e-6, ErrorKind::Unitarity, "det S off the unit circle");
    return d;
  };
  const double min_width = 1e-12 * std::max(1.0, hi - lo);
  double total = 0.0;
  std::function<void(double, cd, double, cd, int)> walk = [&](double a, cd da, double b, cd db, int depth) {
    const double jump = std::arg(db / da);
    if (std::abs(jump) <= 0.5) {
      total += jump;
      return;
    }
    if (depth > 60 || b - a < min_width)
      throw Error(ErrorKind::Branch, "eigenphase jump of " + std::to_string(jump) + " near E = " + std::to_string(a));
    const double m = 0.5 * (a + b);
    const cd dm = det_phase(m);
    walk(a, da, m, dm, depth + 1);
    walk(m, dm, b, db, depth + 1);
  };
  double prev_e = lo;
  cd prev = det_phase(lo);
  for (long i = 1; i <= grid; ++i) {
    const double e = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid);
    const cd cur = det_phase(e);
    walk(prev_e, prev, e, cur, 0);
    prev_e = e;
    prev = cur;
  }
  return total / kTwoPi;
}

}  // namespace

FriedelCount friedel_counting(const MatrixFamily& S, double e_lo, double e_hi, const FriedelOptions& opts) {
  require(e_hi > e_lo, ErrorKind::Domain, "friedel_counting: empty energy range");
  require(opts.initial_grid >= 1 && opts.energy_scale > 0.0, ErrorKind::Domain, "friedel_counting: bad options");
  check_unitary(S(e_lo));
  check_unitary(S(e_hi));
  const double step = 1e-4 * opts.energy_scale;
  FriedelCount out;
  out.winding_route = phase_winding(S, e_lo, e_hi, opts.initial_grid);
  out.trace_route = numerics::integrate([&](double e) { return bpt_trace(S, e, nullptr, step).value; }, e_lo, e_hi,
                                        opts.tolerance);
  out.discrepancy = std::abs(out.trace_route - out.winding_route);
  require(out.discrepancy <= opts.agreement, ErrorKind::NonConvergence,
          "Friedel routes disagree by " + std::to_string(out.discrepancy));
  return out;
}

// ---------------------------------------------------------------------------

std::vector<double> channel_current(const std::vector<Occupation>& occupations, const MatrixFamily& S, double e_lo,
                                    double e_hi, const ChannelCurrentOptions& opts) {
  require(e_hi > e_lo, ErrorKind::Domain, "channel_current: empty energy range");
  const long n = static_cast<long>(occupations.size());
  require(S(e_lo).rows() == n, ErrorKind::Domain, "channel_current: one occupation per channel is required");
  std::vector<double> cuts{e_lo};
  for (double b : opts.breakpoints)
    if (b > e_lo && b < e_hi) cuts.push_back(b);
  cuts.push_back(e_hi);
  std::sort(cuts.begin(), cuts.end());

  std::vector<double> current(static_cast<std::size_t>(n), 0.0);
  for (long b = 0; b < n; ++b) {
    const auto integrand = [&](double e) {
      const Matrix s = S(e);
      const double fb = occupations[static_cast<std::size_t>(b)](e);
      double sum = 0.0;
      for (long a = 0; a < n; ++a) sum += std::norm(s(b, a)) * (occupations[static_cast<std::size_t>(a)](e) - fb);
      return sum;
    };
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
      if (cuts[k + 1] > cuts[k]) total += numerics::integrate(integrand, cuts[k], cuts[k + 1], opts.tolerance);
    current[static_cast<std::size_t>(b)] = total / kTwoPi;
  }
  return current;
}

std::vector<double> per_lead(const std::vector<double>& channel_values, const std::vector<Lead>& leads) {
  std::vector<double> out(leads.size(), 0.0);
  for (std::size_t l = 0; l < leads.size(); ++l)
    for (long c : leads[l].channels) {
      require(c >= 0 && c < static_cast<long>(channel_values.size()), ErrorKind::Domain,
              "per_lead: channel index out of range");
      out[l] += channel_values[static_cast<std::size_t>(c)];
    }
  return out;
}

double fermi(double energy, double mu, double T) {
  require(T >= 0.0, ErrorKind::Domain, "fermi: negative temperature");
  const double x = energy - mu;
  if (T == 0.0) return x < 0.0 ? 1.0 : (x > 0.0 ? 0.0 : 0.5);
  const double z = x / T;
  return z > 0.0 ? std::exp(-z) / (1.0 + std::exp(-z)) : 1.0 / (1.0 + std::exp(z));
}

// ---------------------------------------------------------------------------

Matrix delta_barriers(double k, const std::vector<double>& strengths, const std::vector<double>& positions) {
  require(k > 0.0, ErrorKind::Domain, "delta_barriers: wavenumber must be positive");
  require(strengths.size() == positions.size(), ErrorKind::Domain, "delta_barriers: one position per barrier");
  Eigen::Matrix2cd M = Eigen::Matrix2cd::Identity();
  const cd ik(0.0, k);
  for (std::size_t i = 0; i < strengths.size(); ++i) {
    const cd c = strengths[i] / (2.0 * ik);
    const cd e = std::exp(2.0 * ik * positions[i]);
    Eigen::Matrix2cd step;
    step << 1.0 + c, c / e, -c * e, 1.0 - c;
    M = step * M;
  }
  const cd r = -M(1, 0) / M(1, 1);
  const cd t = M.determinant() / M(1, 1);
  const cd tp = 1.0 / M(1, 1);
  const cd rp = M(0, 1) / M(1, 1);
  Matrix S(2, 2);
  S << r, tp, t, rp;
  return S;
}

cd breit_wigner(double energy, double resonance, double width) {
  require(width > 0.0, ErrorKind::Domain, "breit_wigner: width must be positive");
  const double x = energy - resonance;
  return cd(x, -0.5 * width) / cd(x, 0.5 * width);
}

}  // namespace statmech::transport
