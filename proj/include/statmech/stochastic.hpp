#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "statmech/numerics.hpp"

// Classical stochastic dynamics: random walks, Langevin, Fokker-Planck and rate equations.
namespace statmech::stochastic {

struct Hop {
  double displacement = 0.0;
  double rate = 0.0;
};

/// D = ½ Σ r² w(r) over every signed hop.
double random_walk_diffusion(const std::vector<Hop>& hops);

struct Estimate {
  double value = 0.0;
  double error = 0.0;  ///< one standard deviation
};

/// D = Var[x(t)]/(2t) from continuous-time walkers.
Estimate random_walk_simulate(const std::vector<Hop>& hops, long walkers, double t,
                              const numerics::RandomStream& stream);

// ---------------------------------------------------------------------------
// Langevin dynamics m ẍ = −η ẋ + F(x) + 𝓕(t), ⟨𝓕𝓕⟩ = ν δ(t)

struct LangevinParams {
  double mass = 1.0;
  double friction = 1.0;  ///< η
  double noise = 2.0;     ///< ν
  double dt = 1e-2;
  std::function<double(double)> force;  ///< −V′(x); empty for a free particle

  void validate() const;
  double temperature() const { return noise / (2.0 * friction); }
  double damping_time() const { return mass / friction; }
  /// dt well below the damping time.
  bool stable() const { return dt <= 0.1 * damping_time(); }
};

struct LangevinOptions {
  double x0 = 0.0;
  double v0 = 0.0;
  bool thermal_start = true;  ///< draw v0 from the Maxwell distribution at ν/(2η)
  long correlation_lags = 0;  ///< 0 picks five damping times
  long msd_lags = 0;          ///< 0 picks twenty damping times, at most a tenth of the run
  int chunks = 64;            ///< fixed work partition, independent of thread count
  int threads = 0;            ///< 0 uses the hardware concurrency
};

struct LangevinStats {
  bool stable = true;
  double temperature = 0.0;
  double kinetic = 0.0;  ///< ⟨½mv²⟩ over all samples
  double kinetic_error = 0.0;
  double v2 = 0.0, v2_error = 0.0;
  double v4 = 0.0, v4_error = 0.0;
  std::vector<double> lag_times;
  std::vector<double> velocity_correlation;  ///< C_vv at lag_times
  double correlation_rate = 0.0;             ///< fitted decay rate of C_vv
  std::vector<double> msd_times;
  std::vector<double> msd;                   ///< time-averaged ⟨(x(t+τ) − x(t))²⟩
  double diffusion_msd = 0.0;                ///< late-time MSD slope / 2
  double diffusion_msd_error = 0.0;
  double diffusion_green_kubo = 0.0;         ///< ∫₀^∞ C_vv
  double diffusion_spectrum = 0.0;           ///< ½ C̃_vv(0)
  std::vector<double> final_velocities;
  std::vector<double> final_positions;
};

/// Symmetric splitting per step: half force kick, half drift, then friction
/// integrated exactly with the noise impulse √(ν·dt)·g applied at the step
/// midpoint, then half drift and half kick. Trajectory i draws from
/// stream.split(i), so results do not depend on the thread count.
LangevinStats langevin_simulate(const LangevinParams& params, long n_traj, long n_steps,
                                const numerics::RandomStream& stream, const LangevinOptions& opts = {});

// ---------------------------------------------------------------------------
// Fokker-Planck ∂ρ/∂t = −∂ₓ[uρ − D∂ₓρ] on a uniform grid, zero flux at the walls

struct Grid1D {
  double lo = 0.0;
  double hi = 1.0;
  long cells = 100;

  double spacing() const { return (hi - lo) / static_cast<double>(cells); }
  double center(long i) const { return lo + (static_cast<double>(i) + 0.5) * spacing(); }
  std::vector<double> centers() const;
};

struct FokkerPlanckResult {
  std::vector<double> density;
  double mass = 0.0;  ///< Σρ·dx
  double dt = 0.0;
  long steps = 0;
};

/// Conservative finite-volume update with exponentially fitted face fluxes and
/// explicit Euler steps. dt = 0 chooses 0.45 of the stability limit; a larger
/// dt throws Stability.
FokkerPlanckResult fokker_planck_1d(const Grid1D& grid, const std::function<double(double)>& drift,
                                    double diffusion, const std::vector<double>& rho0, double t,
                                    double dt = 0.0);

/// Largest stable explicit step.
double fokker_planck_max_step(const Grid1D& grid, const std::function<double(double)>& drift, double diffusion);

double mean(const Grid1D& grid, const std::vector<double>& rho);
double variance(const Grid1D& grid, const std::vector<double>& rho);
/// Σ p ln(p/q) dx over cells where p > 0.
double kl_divergence(const Grid1D& grid, const std::vector<double>& p, const std::vector<double>& q);

// ---------------------------------------------------------------------------
// Rate equations ṗ = W p, W_{nm} the rate m → n

class RateMatrix {
 public:
  RateMatrix() = default;
  /// Takes a full matrix whose columns already sum to zero.
  explicit RateMatrix(Eigen::MatrixXd w);
  /// Off-diagonal rates only; the diagonal is set to −Γₙ.
  static RateMatrix from_rates(const Eigen::MatrixXd& rates);

  const Eigen::MatrixXd& matrix() const { return w_; }
  long size() const { return w_.rows(); }
  double max_escape_rate() const;

 private:
  Eigen::MatrixXd w_;
};

/// W_{nm} = w^ε_{nm} + 2w^β_{nm}/(1 + e^{(Eₙ−E_m)/T_B}) from symmetric driving and bath couplings.
RateMatrix bath_rates(const std::vector<double>& energies, const Eigen::MatrixXd& driving,
                      const Eigen::MatrixXd& bath, double bath_temperature);

/// Propagator e^{Wt}, built by uniformisation over a short step and repeated squaring,
/// so every entry stays nonnegative.
Eigen::MatrixXd rate_propagator(const RateMatrix& w, double t);

Eigen::VectorXd rate_evolve(const RateMatrix& w, const Eigen::VectorXd& p0, double t);

/// Communicating classes that no rate leads out of.
std::vector<std::vector<long>> closed_classes(const RateMatrix& w);

/// Unique stationary distribution. Throws SingularRates listing the closed
/// classes when there is more than one.
Eigen::VectorXd rate_steady_state(const RateMatrix& w, double tol = 1e-15, long max_iter = 100'000);

/// Σ p ln(p/q).
double kl_divergence(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

Eigen::VectorXd gibbs(const std::vector<double>& energies, double T);

}  // namespace statmech::stochastic
