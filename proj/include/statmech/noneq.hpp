#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "statmech/numerics.hpp"

// Fluctuation theorems for driven quantum systems and for heat conduction
// between two baths.
namespace statmech::noneq {

using Matrix = Eigen::MatrixXcd;

struct WorkSampleSet {
  std::vector<double> samples;
  double beta = 1.0;
  std::optional<double> free_energy;  ///< known F(B) − F(A), if any

  void validate() const;
  double temperature() const { return 1.0 / beta; }
};

// ---------------------------------------------------------------------------
// Driving protocols and exact work statistics

enum class Interpolation { Linear, Custom };

/// H(λ) over λ ∈ [0, 1] driven by λ = schedule(t/t_f).
struct Protocol {
  Matrix start;  ///< H(0)
  Matrix end;    ///< H(1)
  Interpolation interpolation = Interpolation::Linear;
  std::function<Matrix(double)> family;     ///< H(λ) for Custom
  std::function<double(double)> schedule;   ///< monotone onto [0, 1]; empty means λ = t/t_f
  double duration = 1.0;                    ///< t_f; zero is a sudden quench
  bool reverse = false;                     ///< run B → A under time reversal

  /// Hermitian to 1e-12 at the endpoints and on a probe grid; schedule monotone.
  void validate() const;
  Matrix hamiltonian(double lambda) const;
  /// Hamiltonian at time t ∈ [0, t_f], taking `reverse` into account.
  Matrix at_time(double t) const;
  /// Hamiltonian at the fraction u = t/t_f of the protocol; meaningful also for t_f = 0.
  Matrix at_fraction(double u) const;
  /// The time-reversed protocol: H(λ) conjugated, traversed from B to A.
  Protocol reversed() const;
};

Protocol linear_protocol(const Matrix& start, const Matrix& end, double duration);

struct EvolutionOptions {
  long steps = 0;  ///< 0 chooses from t_f and the spectral spread
};

/// Time-ordered U(t_f) by a fourth-order commutator-free Magnus scheme;
/// exactly unitary at every step.
Matrix evolution_operator(const Protocol& p, const EvolutionOptions& opts = {});

struct WorkKernel {
  double temperature = 1.0;
  Eigen::VectorXd initial_energies;     ///< Eₙ at the start of the protocol
  Eigen::VectorXd final_energies;       ///< E_m at the end
  Eigen::VectorXd initial_populations;  ///< canonical pₙ
  Eigen::MatrixXd transition;           ///< 𝖯(m|n), rows m, columns n
  std::vector<double> work;             ///< E_m − Eₙ for every (m, n) pair
  std::vector<double> weight;           ///< pₙ 𝖯(m|n)
  double free_energy = 0.0;             ///< exact −T ln(Z_end/Z_start)

  /// Largest deviation of the row and column sums of 𝖯 from one.
  double stochasticity_error() const;
  /// Atoms merged when their work values agree to `tol`, sorted by work.
  std::pair<std::vector<double>, std::vector<double>> merged(double tol = 1e-9) const;
};

/// Two-point measurement work distribution for dimension ≤ 20.
WorkKernel work_distribution(const Protocol& p, double T0, const EvolutionOptions& opts = {});

/// Draws work samples from an exact kernel.
WorkSampleSet sample_work(const WorkKernel& k, long n, numerics::RandomStream& rng);

// ---------------------------------------------------------------------------
// Crooks relation

struct CrooksCheck {
  std::vector<double> work;
  std::vector<double> log_ratio;  ///< ln P_f(𝒲) − ln P_r(−𝒲)
  std::vector<double> expected;   ///< (𝒲 − ΔF)/T
  std::vector<double> error;      ///< statistical error of log_ratio (zero for exact kernels)
  double residual = 0.0;          ///< max |log_ratio − expected|
  double max_z = 0.0;             ///< max |log_ratio − expected|/error (sampled mode)
  double free_energy = 0.0;       ///< ΔF used
};

/// Exact mode. Compares atoms whose weight exceeds `floor` in both kernels;
/// throws SupportMismatch when a forward atom has no mirror in the reverse kernel.
CrooksCheck crooks_check(const WorkKernel& forward, const WorkKernel& reverse, double floor = 1e-8);

/// Histogram mode with Freedman-Diaconis bins, using bin pairs with at least
/// `min_count` samples on both sides. ΔF comes from the forward set, or from
/// the Jarzynski estimate when absent.
CrooksCheck crooks_check(const WorkSampleSet& forward, const WorkSampleSet& reverse, long min_count = 20);

// ---------------------------------------------------------------------------
// Jarzynski estimator

struct JarzynskiEstimate {
  double free_energy = 0.0;  ///< −T ln⟨e^{−𝒲/T}⟩
  double error = 0.0;        ///< jackknife standard error
  double bias = 0.0;         ///< jackknife bias estimate
  double mean_work = 0.0;
  double dissipated = 0.0;   ///< ⟨𝒲⟩ − ΔF̂
  bool max_work_principle = true;  ///< ⟨𝒲⟩ ≥ ΔF̂ up to rounding
};

JarzynskiEstimate jarzynski_estimate(const WorkSampleSet& w);
JarzynskiEstimate jarzynski_estimate(const WorkKernel& k);

// ---------------------------------------------------------------------------
// β-symmetric distributions

struct BetaSymmetry {
  std::vector<double> lambda;     ///< uniform grid symmetric about β/2
  std::vector<double> g;          ///< ln⟨e^{−λs}⟩
  double symmetry_residual = 0.0; ///< max |g(β − λ) − g(λ)|
  double convex_average = 0.0;    ///< g(β) = ln⟨e^{−βs}⟩
  double mean = 0.0;
  double variance = 0.0;
  double gaussian_residual = 0.0; ///< ⟨s⟩ − ½β Var(s)
  double gaussian_error = 0.0;    ///< its standard error (samples only)
};

/// The λ grid is symmetric about β/2 with half width `half_width` (0 means β/2,
/// i.e. the interval [0, β]). Throws Overflow when λ|s| leaves the double
/// exponent range.
BetaSymmetry beta_symmetry(const std::vector<double>& samples, double beta, long grid = 41, double half_width = 0.0);
/// Discrete distribution given by atoms and weights.
BetaSymmetry beta_symmetry(const std::vector<double>& values, const std::vector<double>& weights, double beta,
                           long grid = 41, double half_width = 0.0);

// ---------------------------------------------------------------------------
// Heat conduction between two baths

/// Conductor levels coupled to a hot and a cold bath with symmetric couplings;
/// the bath-b rate m → n is c^b_{nm}·2/(1 + e^{(Eₙ − E_m)/T_b}).
struct TwoBathModel {
  std::vector<double> energies;
  Eigen::MatrixXd hot_coupling;
  Eigen::MatrixXd cold_coupling;
  double t_hot = 1.0;
  double t_cold = 1.0;

  void validate() const;
  long size() const { return static_cast<long>(energies.size()); }
  /// Rates of one bath (0 hot, 1 cold), W_{nm} for m → n, zero diagonal.
  Eigen::MatrixXd rates(int bath) const;
  /// Full generator with columns summing to zero.
  Eigen::MatrixXd generator() const;
  double mean_temperature() const { return 0.5 * (t_hot + t_cold); }
  /// 1/T_C − 1/T_H.
  double affinity() const { return 1.0 / t_cold - 1.0 / t_hot; }
};

struct Jump {
  long from = 0;
  long to = 0;
  int bath = 0;
};

/// Σ over jumps of −q_b/T_b with q_b = E_to − E_from the heat drawn from bath b.
double entropy_production(const TwoBathModel& m, const std::vector<Jump>& path);

/// ln of the path density for given jumps and dwell times (dwell.size() = path.size() + 1),
/// conditioned on the initial state.
double path_log_weight(const TwoBathModel& m, const std::vector<Jump>& path, const std::vector<double>& dwell);

struct HeatHistogram {
  double width = 0.0;
  std::vector<double> centers;  ///< k·width, symmetric about zero
  std::vector<long> counts;
};

/// Freedman-Diaconis bins centred on multiples of the width, so bin k mirrors bin −k.
HeatHistogram symmetric_histogram(const std::vector<double>& x);

struct HeatConductionOptions {
  bool stationary_start = true;  ///< draw the initial level from the steady state
  long min_count = 20;
  int threads = 0;               ///< 0 uses the hardware concurrency
};

struct HeatConduction {
  std::vector<double> heat;  ///< Q = (Q_H − Q_C)/2 per trajectory
  std::vector<double> hot;   ///< Q_H, heat drawn from the hot bath
  std::vector<double> cold;  ///< Q_C
  double mean = 0.0;
  double mean_error = 0.0;
  double variance = 0.0;
  HeatHistogram histogram;
  std::vector<double> ft_heat;       ///< mean |Q| of each bin pair used
  std::vector<double> ft_log_ratio;  ///< ln[P(Q)/P(−Q)]
  std::vector<double> ft_error;
  double ft_slope = 0.0;             ///< fitted through the origin
  double ft_slope_error = 0.0;
  double ft_expected = 0.0;          ///< 1/T_C − 1/T_H
  double ft_residual = 0.0;          ///< max |ln ratio − expected·Q| over the bins used
  double conductance = 0.0;          ///< K = ⟨Q⟩/(ε t); NaN at ε = 0
  double intensity = 0.0;            ///< ν = Var(Q)/t
  double conductance_from_noise = 0.0;  ///< ν/(2T²), T the mean temperature
};

/// Gillespie trajectories over [0, t]; trajectory i draws from stream.split(i),
/// so the result does not depend on the thread count.
HeatConduction heat_conduction_ft(const TwoBathModel& m, double t, long n_traj, const numerics::RandomStream& stream,
                                  const HeatConductionOptions& opts = {});

}  // namespace statmech::noneq
