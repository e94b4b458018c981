#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "statmech/numerics.hpp"

// Scattering-matrix transport through mesoscopic conductors (e = ħ = 1).
// Conductances are in units of e²/2πħ; S_{ba} maps incoming channel a to
// outgoing channel b.
namespace statmech::transport {

using Matrix = Eigen::MatrixXcd;

/// Conductance quantum e²/2πħ in siemens, for SI presentation.
inline constexpr double kConductanceQuantum = 3.874045846e-5;

struct Lead {
  std::string name;
  std::vector<long> channels;
};

/// ‖S†S − 1‖ (largest absolute entry).
double unitarity_error(const Matrix& S);

/// Throws Unitarity when unitarity_error(S) ≥ tol.
void check_unitary(const Matrix& S, double tol = 1e-10);

class ScatteringMatrix {
 public:
  /// Validates unitarity and that the leads cover every channel exactly once.
  ScatteringMatrix(Matrix S, std::vector<Lead> leads, double tol = 1e-10);

  const Matrix& matrix() const { return S_; }
  const std::vector<Lead>& leads() const { return leads_; }
  long channels() const { return S_.rows(); }
  long lead_index(const std::string& name) const;

  /// Diagonal projector onto the channels of one lead.
  Matrix projector(long lead) const;
  /// g_{ba} = |S_{ba}|².
  Eigen::MatrixXd probabilities() const { return S_.cwiseAbs2(); }

 private:
  Matrix S_;
  std::vector<Lead> leads_;
};

/// Two leads, channels [0, first) and [first, n).
std::vector<Lead> split_leads(long channels, long first);

Matrix projector(const std::vector<long>& channels, long n);

/// Haar-distributed unitary from the QR factorisation of a complex Gaussian matrix.
Matrix random_unitary(long n, numerics::RandomStream& rng);

// ---------------------------------------------------------------------------
// Landauer conductance and currents

struct Conductance {
  double value = 0.0;        ///< trace(P_B S P_A S†)
  double double_sum = 0.0;   ///< Σ_{b∈B} Σ_{a∈A} |S_{ba}|²
  double discrepancy = 0.0;  ///< |value − double_sum|
};

Conductance landauer_conductance(const ScatteringMatrix& S, long from, long to);
Conductance landauer_conductance(const ScatteringMatrix& S, const std::string& from, const std::string& to);

/// I_B = −Σ_{b∈B} Σ_a g_{ba}(V_B − V_a), one potential and one current per lead.
std::vector<double> multi_lead_currents(const ScatteringMatrix& S, const std::vector<double>& potentials);

// ---------------------------------------------------------------------------
// Adiabatic pumping

using MatrixFamily = std::function<Matrix(double)>;

struct MatrixDerivative {
  Matrix value;
  double error = 0.0;  ///< difference between the last two Richardson tableaux
  double step = 0.0;   ///< step that met the tolerance
};

/// dS/dX by Richardson-extrapolated central differences starting at `step`
/// and halving until two successive estimates agree to `tol`·max(1, ‖dS‖).
/// Throws Step when the estimates stop improving.
MatrixDerivative derivative(const MatrixFamily& S, double x, double step, double tol = 1e-7);

struct BptResult {
  double conductance = 0.0;        ///< G(X) = −(i/2π) trace(P_A ∂S/∂X S†)
  double imaginary_residue = 0.0;  ///< |Im| of the trace before discarding it
  double hermiticity_error = 0.0;  ///< largest entry of the anti-Hermitian part of i ∂S/∂X S†
  double derivative_error = 0.0;
};

/// step = 0 uses 1e-4·max(1, |x0|).
BptResult bpt_conductance(const MatrixFamily& S, double x0, const std::vector<long>& lead, double step = 0.0);

/// Closed loop X(s), s ∈ [0, 1], in a parameter space of any dimension.
struct ParameterCycle {
  std::function<Eigen::VectorXd(double)> path;
  std::function<Matrix(const Eigen::VectorXd&)> scattering;
  long samples = 16;  ///< initial trapezoid points, at least 8
  double scale = 1.0; ///< typical size of dX/ds, sets the difference step
};

struct PumpedCharge {
  double charge = 0.0;  ///< Q = −∮ G·dX
  long samples = 0;
  double convergence = 0.0;  ///< |Q_n − Q_{n/2}|
  double imaginary_residue = 0.0;
  double hermiticity_error = 0.0;
};

/// Periodic trapezoid rule over s, doubling the sample count until two
/// successive estimates differ by less than `tol`. Throws NonConvergence
/// beyond `max_samples`.
PumpedCharge pumped_charge(const ParameterCycle& cycle, const std::vector<long>& lead, double tol = 1e-9,
                           long max_samples = 1L << 14);

// ---------------------------------------------------------------------------
// Friedel sum rule

struct FriedelOptions {
  numerics::Tolerance tolerance{1e-12, 1e-11};
  double energy_scale = 1.0;  ///< sets the difference step 1e-4·energy_scale
  long initial_grid = 256;    ///< samples for phase unwrapping before refinement
  double agreement = 1e-6;    ///< required match between the two routes
};

struct FriedelCount {
  double trace_route = 0.0;    ///< −(i/2π) ∫ trace(∂S/∂E S†) dE
  double winding_route = 0.0;  ///< Σ_r Δθ_r / 2π from the unwrapped phase of det S
  double discrepancy = 0.0;
};

/// Throws Branch when the phase cannot be unwrapped and NonConvergence when
/// the routes disagree by more than `agreement`.
FriedelCount friedel_counting(const MatrixFamily& S, double e_lo, double e_hi, const FriedelOptions& opts = {});

// ---------------------------------------------------------------------------
// Channel currents from occupations

using Occupation = std::function<double(double)>;

struct ChannelCurrentOptions {
  numerics::Tolerance tolerance{1e-12, 1e-9};
  std::vector<double> breakpoints;  ///< discontinuities of the occupations inside the range
};

/// I_b = (1/2π) ∫ Σ_a g_{ba}(E)[f_a(E) − f_b(E)] dE over [e_lo, e_hi], one entry per channel.
std::vector<double> channel_current(const std::vector<Occupation>& occupations, const MatrixFamily& S, double e_lo,
                                    double e_hi, const ChannelCurrentOptions& opts = {});

/// Sums channel values over each lead.
std::vector<double> per_lead(const std::vector<double>& channel_values, const std::vector<Lead>& leads);

/// Fermi occupation 1/(e^{(E−μ)/T} + 1); T = 0 gives a step with f(μ) = ½.
double fermi(double energy, double mu, double T);

// ---------------------------------------------------------------------------
// Model scatterers

/// 1D wire with delta barriers u_i δ(x − x_i) at wavenumber k (E = k²).
/// Channel 0 is the left lead, channel 1 the right lead.
Matrix delta_barriers(double k, const std::vector<double>& strengths, const std::vector<double>& positions);

/// Single-channel Breit-Wigner resonance (E − E_r − iΓ/2)/(E − E_r + iΓ/2).
std::complex<double> breit_wigner(double energy, double resonance, double width);

}  // namespace statmech::transport
