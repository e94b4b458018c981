#include <cmath>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "cli.hpp"
#include "io.hpp"
#include "output.hpp"
#include "statmech/chemical.hpp"
#include "statmech/ensembles.hpp"
#include "statmech/error.hpp"
#include "statmech/interactions.hpp"
#include "statmech/ising.hpp"
#include "statmech/master_eq.hpp"
#include "statmech/noneq.hpp"
#include "statmech/quantum_gases.hpp"
#include "statmech/response.hpp"
#include "statmech/stochastic.hpp"
#include "statmech/transport.hpp"

#ifndef STATMECH_VERSION
#define STATMECH_VERSION "0.0.0"
#endif

namespace statmech::cli {

const char* version() { return STATMECH_VERSION; }

namespace {

using CMatrix = Eigen::MatrixXcd;

struct Globals {
  std::uint64_t seed = 0;
  double tol_rel = 1e-10;
  double tol_abs = 1e-12;
  std::string out;
  std::string format = "csv";

  numerics::Tolerance tolerance() const { return {tol_abs, tol_rel}; }
};

/// The message without the "<kind>: " prefix that Error adds.
std::string bare_message(const Error& e) {
  const std::string text = e.what();
  const std::string prefix = std::string(to_string(e.kind())) + ": ";
  return text.rfind(prefix, 0) == 0 ? text.substr(prefix.size()) : text;
}

void summary_row(Table& t, const std::string& name, double value) { t.add({name, value}); }

Table& summary(Output& o, const std::string& name = "summary") { return o.table(name, {"quantity", "value"}); }

class Command {
 public:
  virtual ~Command() = default;
  virtual void run(const Globals& g, Output& o) = 0;
  CLI::App* app = nullptr;
};

// ---------------------------------------------------------------------------

class EnsembleCommand : public Command {
 public:
  explicit EnsembleCommand(CLI::App& root) {
    app = root.add_subcommand("ensemble", "Canonical thermodynamics of a level spectrum or a model system");
    app->add_option("--spectrum", spectrum_, "CSV file of energy,degeneracy rows")->check(CLI::ExistingFile);
    app->add_option("--model", model_, "Built-in system when no spectrum is given")
        ->check(CLI::IsMember({"oscillator", "spin"}));
    app->add_option("--omega", omega_, "Level spacing of the built-in system");
    app->add_option("--T-min", t_min_, "Lowest temperature");
    app->add_option("--T-max", t_max_, "Highest temperature");
    app->add_option("--T-points", t_points_, "Number of temperatures");
  }

  void run(const Globals&, Output& o) override {
    std::optional<ensembles::LevelSpectrum> spec;
    if (!spectrum_.empty()) {
      std::ifstream in(spectrum_);
      try {
        spec = ensembles::read_spectrum_csv(in);
      } catch (const Error& e) {
        throw Error(ErrorKind::Config, "'" + spectrum_ + "': " + bare_message(e));
      }
    }
    Table& t = o.table("thermo", {"T", "lnZ", "F", "E", "S", "C", "VarE"});
    for (double T : linspace(t_min_, t_max_, t_points_)) {
      const auto pt = ensembles::ThermoPoint::at_temperature(T);
      const auto r = spec ? ensembles::partition(*spec, pt)
                          : model_ == "oscillator" ? ensembles::oscillator_observables(omega_, pt)
                                                   : ensembles::spin_observables(omega_, pt);
      t.add({T, r.lnZ, r.F, r.E, r.S, r.C, r.VarE});
    }
  }

 private:
  std::string spectrum_;
  std::string model_ = "oscillator";
  double omega_ = 1.0, t_min_ = 0.1, t_max_ = 5.0;
  long t_points_ = 50;
};

// ---------------------------------------------------------------------------

class GasCommand : public Command {
 public:
  explicit GasCommand(CLI::App& root) {
    app = root.add_subcommand("gas", "Ideal quantum gas with a power-law density of states");
    app->add_option("--kind", kind_, "Particle statistics")->check(CLI::IsMember({"bose", "fermi", "boltzmann"}));
    app->add_option("--alpha", alpha_, "Exponent of the density of states c V e^(alpha-1)");
    app->add_option("--c", c_, "Prefactor of the density of states");
    app->add_option("--volume", volume_, "Volume");
    app->add_option("--density", density_, "Number density (fixed when sweeping T)");
    app->add_option("--T", temperature_, "Temperature (fixed when sweeping n)");
    app->add_option("--sweep", sweep_, "Swept variable")->check(CLI::IsMember({"T", "n"}));
    app->add_option("--from", from_, "Start of the sweep; 0 with --to 0 picks a range from the natural scale");
    app->add_option("--to", to_, "End of the sweep");
    app->add_option("--points", points_, "Number of sweep points");
  }

  void run(const Globals& g, Output& o) override {
    const ensembles::PowerLawDos dos{c_, alpha_, volume_};
    const auto kind = kind_ == "bose"    ? quantum_gases::GasKind::Bose
                      : kind_ == "fermi" ? quantum_gases::GasKind::Fermi
                                         : quantum_gases::GasKind::Boltzmann;
    Table& scales = summary(o, "scales");
    double scale = 1.0;
    if (kind == quantum_gases::GasKind::Bose && alpha_ > 1.0) {
      scale = quantum_gases::bec_tc(dos, density_);
      summary_row(scales, "bec_tc", scale);
    } else if (kind == quantum_gases::GasKind::Fermi) {
      scale = quantum_gases::fermi_energy(dos, density_);
      summary_row(scales, "fermi_energy", scale);
    }
    double lo = from_, hi = to_;
    if (lo == 0.0 && hi == 0.0) {
      const double base = sweep_ == "T" ? scale : density_;
      lo = 0.2 * base;
      hi = 2.0 * base;
    }
    Table& t = o.table("state", {"T", "n", "mu", "z", "e", "P", "condensate_fraction"});
    for (double x : linspace(lo, hi, points_)) {
      const double T = sweep_ == "T" ? x : temperature_;
      const double n = sweep_ == "T" ? density_ : x;
      const auto s = quantum_gases::invert_mu(dos, kind, n, T, g.tolerance());
      t.add({T, s.n, s.mu, s.z, s.e, s.P, s.condensate_fraction});
    }
  }

 private:
  std::string kind_ = "bose", sweep_ = "T";
  double alpha_ = 1.5, c_ = 1.0, volume_ = 1.0, density_ = 1.0, temperature_ = 1.0, from_ = 0.0, to_ = 0.0;
  long points_ = 20;
};

// ---------------------------------------------------------------------------

class ChemCommand : public Command {
 public:
  explicit ChemCommand(CLI::App& root) {
    app = root.add_subcommand("chem", "Most probable extent of a reaction between ideal species");
    app->add_option("--reaction", reaction_, "JSON file with species, stoichiometry and counts")
        ->required()
        ->check(CLI::ExistingFile);
    app->add_option("--T", temperature_, "Temperature");
    app->add_option("--V", volume_, "Volume");
  }

  void run(const Globals&, Output& o) override {
    const auto j = load_json(reaction_);
    chemical::Reaction r;
    try {
      for (const auto& s : member(j, "species")) {
        const auto name = member(s, "name").get<std::string>();
        const double binding = s.value("binding", 0.0);
        chemical::Species sp;
        if (s.contains("mass")) {
          sp = chemical::ideal_gas_species(name, s["mass"].get<double>(), temperature_, volume_,
                                           s.value("degeneracy", 1.0), binding);
        } else {
          sp.name = name;
          sp.z1 = member(s, "z1").get<double>();
          sp.binding_energy = binding;
        }
        sp.bath = s.value("bath", false);
        sp.bath_mu = s.value("bath_mu", 0.0);
        r.species.push_back(sp);
      }
      r.stoichiometry = member(j, "stoichiometry").get<std::vector<int>>();
      r.counts = member(j, "counts").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::Config, "'" + reaction_ + "': " + e.what());
    }
    const auto eq = chemical::equilibrium_coordinate(r, temperature_, volume_);
    Table& t = o.table("species", {"name", "stoichiometry", "initial_count", "count", "rounded_count",
                                   "chemical_potential"});
    for (std::size_t i = 0; i < r.species.size(); ++i) {
      t.add({r.species[i].name, static_cast<long long>(r.stoichiometry[i]), r.counts[i], eq.counts[i],
             eq.rounded_counts[i], r.species[i].chemical_potential(eq.counts[i], temperature_)});
    }
    Table& s = summary(o);
    summary_row(s, "extent", eq.extent);
    summary_row(s, "rounded_extent", static_cast<double>(eq.rounded_extent));
    summary_row(s, "log_kappa", eq.log_kappa);
    summary_row(s, "affinity", eq.affinity);
  }

 private:
  std::string reaction_;
  double temperature_ = 1.0, volume_ = 1.0;
};

// ---------------------------------------------------------------------------

class IsingCommand : public Command {
 public:
  explicit IsingCommand(CLI::App& root) {
    app = root.add_subcommand("ising", "Ising chain, Onsager lattice, mean field and Lee-Yang zeros");
    app->add_option("--mode", mode_, "Solver")->check(CLI::IsMember({"1d", "2d", "meanfield", "leeyang"}));
    app->add_option("--N", sites_, "Number of sites (1d, leeyang)");
    app->add_option("--beta-eps", beta_eps_, "Coupling over temperature (1d, leeyang)");
    app->add_option("--beta-h", beta_h_, "Field over temperature (1d)");
    app->add_flag("--open", open_, "Open chain instead of a ring (1d)");
    app->add_flag("--enumerate", enumerate_, "Also sum all configurations (1d)");
    app->add_option("--geometry", geometry_, "Lattice for the zeros (leeyang)")
        ->check(CLI::IsMember({"chain", "ring", "complete"}));
    app->add_option("--eps", eps_, "Coupling (meanfield)");
    app->add_option("--field", field_, "Field (meanfield)");
    app->add_option("--coordination", coordination_, "Neighbour count (meanfield)");
    app->add_option("--from", from_, "Start of the sweep over beta-eps (2d) or T (meanfield)");
    app->add_option("--to", to_, "End of the sweep");
    app->add_option("--points", points_, "Number of sweep points");
  }

  void run(const Globals&, Output& o) override {
    if (mode_ == "1d") {
      ising::IsingParams p;
      p.eps = beta_eps_;
      p.h = beta_h_;
      p.T = 1.0;
      const auto r = ising::ising1d_solve(p, sites_, !open_);
      std::vector<std::string> cols = {"N",     "lnZ",          "F",           "F_thermodynamic",
                                       "magnetization", "susceptibility", "correlation_length",
                                       "lambda_plus",   "lambda_minus"};
      std::vector<Cell> row = {static_cast<long long>(sites_), r.lnZ, r.F, r.F_thermodynamic, r.magnetization,
                               r.susceptibility, r.correlation_length, r.lambda_plus, r.lambda_minus};
      if (enumerate_) {
        cols.push_back("lnZ_enumerated");
        row.push_back(ising::ising1d_enumerate(p, sites_, !open_));
      }
      o.table("chain", cols).add(row);
    } else if (mode_ == "2d") {
      const bool automatic = from_ == 0.0 && to_ == 0.0;
      Table& t = o.table("onsager", {"beta_eps", "lnZ_per_site", "kappa", "heat_capacity"});
      for (double x : linspace(automatic ? 0.2 : from_, automatic ? 0.7 : to_, points_)) {
        const auto r = ising::onsager2d(x);
        t.add({x, r.lnZ_per_site, r.kappa, ising::onsager2d_heat_capacity(x)});
      }
      const auto c = ising::onsager2d_tc();
      Table& s = summary(o, "critical");
      summary_row(s, "beta_eps_c", c.eps_tilde);
      summary_row(s, "Tc_over_eps", c.Tc_over_eps);
    } else if (mode_ == "meanfield") {
      const double tc = coordination_ * eps_;
      const bool automatic = from_ == 0.0 && to_ == 0.0;
      Table& t = o.table("meanfield", {"T", "magnetization", "energy", "heat_capacity", "susceptibility",
                                       "symmetry_broken", "solutions"});
      for (double T : linspace(automatic ? 0.5 * tc : from_, automatic ? 1.5 * tc : to_, points_)) {
        ising::IsingParams p;
        p.eps = eps_;
        p.h = field_;
        p.T = T;
        p.coordination = coordination_;
        const auto r = ising::mean_field_magnetization(p);
        t.add({T, r.magnetization, r.energy, r.heat_capacity, r.susceptibility,
               static_cast<long long>(r.symmetry_broken), static_cast<long long>(r.solutions.size())});
      }
    } else {
      const auto geom = geometry_ == "chain"  ? ising::Geometry::Chain
                        : geometry_ == "ring" ? ising::Geometry::Ring
                                              : ising::Geometry::Complete;
      const auto r = ising::lee_yang_zeros(sites_, beta_eps_, geom);
      Table& t = o.table("zeros", {"index", "re", "im", "modulus"});
      for (std::size_t i = 0; i < r.roots.size(); ++i)
        t.add({static_cast<long long>(i), r.roots[i].real(), r.roots[i].imag(), r.moduli[i]});
    }
  }

 private:
  std::string mode_ = "1d", geometry_ = "ring";
  int sites_ = 8, coordination_ = 4;
  double beta_eps_ = 0.3, beta_h_ = 0.0, eps_ = 1.0, field_ = 0.0, from_ = 0.0, to_ = 0.0;
  bool open_ = false, enumerate_ = false;
  long points_ = 21;
};

// ---------------------------------------------------------------------------

class RgCommand : public Command {
 public:
  explicit RgCommand(CLI::App& root) {
    app = root.add_subcommand("rg", "Renormalisation-group flow of the quartic field theory");
    app->add_option("--d", dimension_, "Spatial dimension");
    app->add_option("--r0", r0_, "Initial dimensionless mass");
    app->add_option("--u0", u0_, "Initial dimensionless coupling");
    app->add_option("--tau-end", tau_end_, "Final log scale factor");
    app->add_option("--step", step_, "Sampling interval of the flow");
  }

  void run(const Globals&, Output& o) override {
    Table& flow = o.table("flow", {"tau", "r", "u"});
    for (const auto& p : ising::rg_flow({r0_, u0_, dimension_, 0.0}, tau_end_, step_)) flow.add({p.tau, p.r, p.u});
    const auto fp = ising::rg_fixed_points(dimension_);
    Table& f = o.table("fixed_points", {"name", "r", "u", "eigenvalue_1", "eigenvalue_2", "relevant_directions"});
    for (const auto& [name, p] : {std::pair{"gaussian", fp.gaussian}, std::pair{"nontrivial", fp.nontrivial}}) {
      f.add({std::string(name), p.r, p.u, p.eigenvalues[0], p.eigenvalues[1],
             static_cast<long long>(p.relevant_directions)});
    }
    const auto e = ising::rg_exponents(dimension_);
    Table& x = summary(o, "exponents");
    summary_row(x, "nu", e.nu);
    summary_row(x, "eta", e.eta);
    summary_row(x, "alpha", e.alpha);
    summary_row(x, "beta", e.beta);
    summary_row(x, "gamma", e.gamma);
    summary_row(x, "delta", e.delta);
  }

 private:
  double dimension_ = 3.0, r0_ = -0.15, u0_ = 0.12, tau_end_ = 10.0, step_ = 0.05;
};

// ---------------------------------------------------------------------------

class VirialCommand : public Command {
 public:
  explicit VirialCommand(CLI::App& root) {
    app = root.add_subcommand("virial", "Second and third virial coefficients of a pair potential");
    app->add_option("--potential", potential_, "Pair potential")
        ->check(CLI::IsMember({"hard-sphere", "square-well", "lennard-jones"}));
    app->add_option("--radius", radius_, "Particle radius (hard-sphere, square-well)");
    app->add_option("--range-factor", range_factor_, "Well range over contact distance (square-well)");
    app->add_option("--depth", depth_, "Well depth (square-well, lennard-jones)");
    app->add_option("--sigma", sigma_, "Length scale (lennard-jones)");
    app->add_option("--T-min", t_min_, "Lowest temperature");
    app->add_option("--T-max", t_max_, "Highest temperature");
    app->add_option("--T-points", t_points_, "Number of temperatures");
    app->add_option("--b3-samples", b3_samples_, "Monte Carlo samples for the third coefficient; 0 skips it");
  }

  void run(const Globals& g, Output& o) override {
    const auto pot = potential_ == "hard-sphere"   ? interactions::hard_sphere(radius_)
                     : potential_ == "square-well" ? interactions::square_well(radius_, range_factor_, depth_)
                                                   : interactions::lennard_jones(depth_, sigma_);
    const double cutoff = std::isfinite(pot.range) ? pot.range : 4.0 * sigma_;
    const auto temps = linspace(t_min_, t_max_, t_points_);
    std::vector<std::string> cols = {"T", "b2", "a2"};
    if (b3_samples_ > 0) cols.insert(cols.end(), {"b3", "b3_error"});
    Table& t = o.table("clusters", cols);
    for (std::size_t i = 0; i < temps.size(); ++i) {
      const double T = temps[i];
      const auto b2 = interactions::mayer_b2(pot, T, {g.tol_abs, g.tol_rel});
      std::vector<Cell> row = {T, b2.b2, b2.a2};
      if (b3_samples_ > 0) {
        const numerics::RandomStream stream(g.seed, i);
        const auto b3 = interactions::mayer_b3(pot, T, [&](const interactions::PairPotential& p, double temp) {
          return interactions::triangle_integral_mc(p, temp, cutoff, b3_samples_, stream);
        });
        row.insert(row.end(), {b3.value, b3.error});
      }
      t.add(row);
    }
    if (temps.size() >= 2) {
      const auto vdw = interactions::fit_van_der_waals(pot, temps);
      Table& s = summary(o, "van_der_waals");
      summary_row(s, "a", vdw.a);
      summary_row(s, "b", vdw.b);
    }
  }

 private:
  std::string potential_ = "hard-sphere";
  double radius_ = 0.5, range_factor_ = 1.5, depth_ = 1.0, sigma_ = 1.0, t_min_ = 0.5, t_max_ = 5.0;
  long t_points_ = 20, b3_samples_ = 0;
};

// ---------------------------------------------------------------------------

class LangevinCommand : public Command {
 public:
  explicit LangevinCommand(CLI::App& root) {
    app = root.add_subcommand("langevin", "Langevin trajectories of a free or harmonically bound particle");
    app->add_option("--mass", mass_, "Particle mass");
    app->add_option("--friction", friction_, "Friction coefficient");
    app->add_option("--noise", noise_, "Noise intensity");
    app->add_option("--dt", dt_, "Time step");
    app->add_option("--steps", steps_, "Steps per trajectory");
    app->add_option("--trajectories", trajectories_, "Number of trajectories");
    app->add_option("--omega", omega_, "Frequency of a harmonic trap; 0 for a free particle");
  }

  void run(const Globals& g, Output& o) override {
    stochastic::LangevinParams p;
    p.mass = mass_;
    p.friction = friction_;
    p.noise = noise_;
    p.dt = dt_;
    if (omega_ > 0.0) {
      const double k = mass_ * omega_ * omega_;
      p.force = [k](double x) { return -k * x; };
    }
    const auto s = stochastic::langevin_simulate(p, trajectories_, steps_, numerics::RandomStream(g.seed));
    Table& sum = summary(o);
    summary_row(sum, "temperature", s.temperature);
    summary_row(sum, "kinetic", s.kinetic);
    summary_row(sum, "kinetic_error", s.kinetic_error);
    summary_row(sum, "kinetic_expected", noise_ / (4.0 * friction_));
    summary_row(sum, "stable", s.stable ? 1.0 : 0.0);
    summary_row(sum, "correlation_rate", s.correlation_rate);
    if (omega_ <= 0.0) {
      summary_row(sum, "diffusion_msd", s.diffusion_msd);
      summary_row(sum, "diffusion_msd_error", s.diffusion_msd_error);
      summary_row(sum, "diffusion_green_kubo", s.diffusion_green_kubo);
      summary_row(sum, "diffusion_spectrum", s.diffusion_spectrum);
      summary_row(sum, "diffusion_expected", p.temperature() / friction_);
    }
    Table& c = o.table("velocity_correlation", {"lag", "C_vv"});
    for (std::size_t i = 0; i < s.lag_times.size(); ++i) c.add({s.lag_times[i], s.velocity_correlation[i]});
    Table& m = o.table("msd", {"lag", "msd"});
    for (std::size_t i = 0; i < s.msd_times.size(); ++i) m.add({s.msd_times[i], s.msd[i]});
  }

 private:
  double mass_ = 1.0, friction_ = 1.0, noise_ = 2.0, dt_ = 0.01, omega_ = 0.0;
  long steps_ = 10000, trajectories_ = 100;
};

// ---------------------------------------------------------------------------

class RatesCommand : public Command {
 public:
  explicit RatesCommand(CLI::App& root) {
    app = root.add_subcommand("rates", "Classical rate equations from a table of transition rates");
    app->add_option("--rates", rates_, "CSV matrix whose entry (n, m) is the rate m -> n; diagonal ignored")
        ->required()
        ->check(CLI::ExistingFile);
    app->add_option("--initial", initial_, "Initial probabilities; default is state 0")->delimiter(',');
    app->add_option("--t-max", t_max_, "Final time");
    app->add_option("--t-points", t_points_, "Number of output times");
  }

  void run(const Globals&, Output& o) override {
    Eigen::MatrixXd rates = read_matrix_csv(rates_);
    require(rates.rows() == rates.cols(), ErrorKind::Config, "rate matrix must be square");
    rates.diagonal().setZero();
    const auto w = stochastic::RateMatrix::from_rates(rates);
    const long n = w.size();
    Eigen::VectorXd p0 = Eigen::VectorXd::Zero(n);
    if (initial_.empty()) {
      p0(0) = 1.0;
    } else {
      require(static_cast<long>(initial_.size()) == n, ErrorKind::Config, "--initial needs one entry per state");
      p0 = Eigen::Map<const Eigen::VectorXd>(initial_.data(), n);
    }
    std::vector<std::string> cols = {"t"};
    for (long i = 0; i < n; ++i) cols.push_back("p" + std::to_string(i));
    Table& t = o.table("populations", cols);
    for (double time : linspace(0.0, t_max_, t_points_)) {
      const auto p = stochastic::rate_evolve(w, p0, time);
      std::vector<Cell> row = {time};
      for (long i = 0; i < n; ++i) row.push_back(p(i));
      t.add(row);
    }
    const auto ss = stochastic::rate_steady_state(w);
    Table& s = o.table("steady_state", {"state", "probability"});
    for (long i = 0; i < n; ++i) s.add({static_cast<long long>(i), ss(i)});
  }

 private:
  std::string rates_;
  std::vector<double> initial_;
  double t_max_ = 10.0;
  long t_points_ = 51;
};

// ---------------------------------------------------------------------------

master_eq::BathSpectrum parse_bath(const nlohmann::json& j) {
  master_eq::BathSpectrum b;
  const auto kind = j.value("kind", std::string("white-noise"));
  if (kind == "ohmic-harmonic") b.kind = master_eq::BathKind::OhmicHarmonic;
  else if (kind == "ohmic-spin") b.kind = master_eq::BathKind::OhmicSpin;
  else if (kind == "white-noise") b.kind = master_eq::BathKind::WhiteNoise;
  else throw Error(ErrorKind::Config, "unknown bath kind '" + kind + "'");
  b.temperature = j.value("temperature", numerics::kInf);
  b.cutoff = j.value("cutoff", numerics::kInf);
  b.intensity = j.value("intensity", 1.0);
  return b;
}

class MasterCommand : public Command {
 public:
  explicit MasterCommand(CLI::App& root) {
    app = root.add_subcommand("master", "Quantum master equations: explicit Lindblad, secular bath or Pauli rates");
    app->add_option("--model", model_, "JSON file with H, the jump operators or bath coupling, and the initial state")
        ->required()
        ->check(CLI::ExistingFile);
    app->add_option("--t-max", t_max_, "Final time");
    app->add_option("--samples", samples_, "Number of output times after t = 0");
    app->add_option("--step", step_, "Integration step; 0 chooses one from the generator norm");
  }

  void run(const Globals&, Output& o) override {
    const auto j = load_json(model_);
    const CMatrix H = complex_matrix(member(j, "H"), "H");
    const auto basis = master_eq::diagonalise(H);
    const long n = H.rows();
    CMatrix rho0;
    const auto& init = member(j, "initial");
    if (init.is_number_integer()) {
      const long k = init.get<long>();
      require(k >= 0 && k < n, ErrorKind::Config, "initial level out of range");
      rho0 = basis.vectors.col(k) * basis.vectors.col(k).adjoint();
    } else {
      rho0 = complex_matrix(init, "initial");
    }
    const auto method = j.value("method", std::string(j.contains("jumps") ? "lindblad" : "secular"));
    std::vector<std::string> cols = {"t", "trace"};
    for (long i = 0; i < n; ++i) cols.push_back("p" + std::to_string(i));
    if (method == "pauli") {
      const auto model = master_eq::pauli_master(H, complex_matrix(member(j, "coupling"), "coupling"),
                                                 parse_bath(member(j, "bath")));
      const Eigen::VectorXd p0 = master_eq::populations(rho0, basis);
      Table& t = o.table("populations", cols);
      for (double time : linspace(0.0, t_max_, samples_ + 1)) {
        const auto p = stochastic::rate_evolve(model.rates, p0, time);
        std::vector<Cell> row = {time, p.sum()};
        for (long i = 0; i < n; ++i) row.push_back(p(i));
        t.add(row);
      }
      const auto ss = stochastic::rate_steady_state(model.rates);
      Table& s = o.table("steady_state", {"level", "energy", "population"});
      for (long i = 0; i < n; ++i) s.add({static_cast<long long>(i), basis.energies(i), ss(i)});
      return;
    }
    master_eq::Generator gen;
    double validity = 0.0;
    if (method == "lindblad") {
      std::vector<CMatrix> jumps;
      for (const auto& m : member(j, "jumps")) jumps.push_back(complex_matrix(m, "jump"));
      gen = master_eq::lindblad_generator(H, jumps);
    } else if (method == "secular") {
      const auto model = master_eq::secular_generator(H, complex_matrix(member(j, "coupling"), "coupling"),
                                                      parse_bath(member(j, "bath")), j.value("group_degenerate", false));
      gen = model.generator;
      validity = model.validity;
    } else {
      throw Error(ErrorKind::Config, "unknown method '" + method + "'");
    }
    master_eq::PropagationOptions opts;
    opts.step = step_;
    opts.samples = samples_ - 1;
    const auto prop = master_eq::propagate(gen, rho0, t_max_, opts);
    if (n >= 2) cols.push_back("coherence_01");
    Table& t = o.table("populations", cols);
    auto add_state = [&](double time, const CMatrix& rho) {
      const auto p = master_eq::populations(rho, basis);
      std::vector<Cell> row = {time, rho.trace().real()};
      for (long i = 0; i < n; ++i) row.push_back(p(i));
      if (n >= 2) row.push_back(std::abs((basis.vectors.adjoint() * rho * basis.vectors)(0, 1)));
      t.add(row);
    };
    for (std::size_t i = 0; i < prop.times.size(); ++i) add_state(prop.times[i], prop.states[i]);
    const auto ss = master_eq::populations(master_eq::generator_steady_state(gen), basis);
    Table& s = o.table("steady_state", {"level", "energy", "population"});
    for (long i = 0; i < n; ++i) s.add({static_cast<long long>(i), basis.energies(i), ss(i)});
    Table& d = summary(o, "diagnostics");
    summary_row(d, "max_trace_drift", prop.max_trace_drift);
    summary_row(d, "max_hermiticity_error", prop.max_hermiticity_error);
    summary_row(d, "min_eigenvalue", prop.min_eigenvalue);
    summary_row(d, "steps", static_cast<double>(prop.steps));
    if (method == "secular") summary_row(d, "secular_validity", validity);
  }

 private:
  std::string model_;
  double t_max_ = 10.0, step_ = 0.0;
  long samples_ = 100;
};

// ---------------------------------------------------------------------------

class ResponseCommand : public Command {
 public:
  explicit ResponseCommand(CLI::App& root) {
    app = root.add_subcommand("response", "Fluctuation spectra and linear response of a finite quantum system");
    app->add_option("--model", model_, "JSON file with H, the observable A and optionally B")
        ->required()
        ->check(CLI::ExistingFile);
    app->add_option("--T", temperature_, "Temperature of the canonical preparation");
    app->add_option("--broadening", broadening_, "Gaussian line width; 0 picks five mean level spacings");
    app->add_option("--points", points_, "Frequency grid size (odd)");
    app->add_option("--range", range_, "Half width of the frequency grid; 0 picks one from the spectrum");
    app->add_flag("--kubo", kubo_, "Also compute the susceptibility");
  }

  void run(const Globals&, Output& o) override {
    const auto j = load_json(model_);
    const CMatrix H = complex_matrix(member(j, "H"), "H");
    const CMatrix A = complex_matrix(member(j, "A"), "A");
    const CMatrix B = j.contains("B") ? complex_matrix(j["B"], "B") : A;
    const auto sys = response::prepare(H, response::Preparation::canonical(temperature_), broadening_);
    response::SpectralOptions opts;
    opts.points = points_;
    opts.range = range_;
    const auto s = response::spectral_functions(sys, A, B, opts);
    Table& t = o.table("spectrum", {"omega", "power_re", "power_im", "symmetric_re", "symmetric_im", "response_re",
                                    "response_im"});
    for (std::size_t i = 0; i < s.frequency.size(); ++i) {
      t.add({s.frequency[i], s.power[i].real(), s.power[i].imag(), s.symmetric[i].real(), s.symmetric[i].imag(),
             s.response[i].real(), s.response[i].imag()});
    }
    if (kubo_) {
      const auto k = response::kubo_susceptibility(s);
      Table& kt = o.table("susceptibility", {"omega", "chi_re", "chi_im", "dissipation", "dissipation_fgr"});
      for (std::size_t i = 0; i < k.frequency.size(); ++i) {
        kt.add({k.frequency[i], k.susceptibility[i].real(), k.susceptibility[i].imag(), k.dissipation[i],
                k.dissipation_fgr[i]});
      }
    }
    Table& sum = summary(o);
    summary_row(sum, "broadening", sys.broadening);
    summary_row(sum, "mean_spacing", sys.mean_spacing);
    summary_row(sum, "smooth", sys.smooth() ? 1.0 : 0.0);
    summary_row(sum, "detailed_balance_residual", response::detailed_balance_residual(s, temperature_));
    if (!j.contains("B")) {
      const auto fd = response::fd_check(sys, A);
      summary_row(sum, "friction", fd.friction);
      summary_row(sum, "noise_intensity", fd.intensity);
      summary_row(sum, "fd_ratio", fd.ratio);
    }
  }

 private:
  std::string model_;
  double temperature_ = 1.0, broadening_ = 0.0, range_ = 0.0;
  long points_ = 801;
  bool kubo_ = false;
};

// ---------------------------------------------------------------------------

class TransportCommand : public Command {
 public:
  explicit TransportCommand(CLI::App& root) {
    app = root.add_subcommand("transport", "Scattering-matrix conductances, adiabatic pumping and Friedel counting");
    app->add_option("--mode", mode_, "Calculation")->check(CLI::IsMember({"landauer", "pump", "friedel"}));
    app->add_option("--smatrix", smatrix_, "JSON file with S and its leads (landauer)")->check(CLI::ExistingFile);
    app->add_option("--potentials", potentials_, "One potential per lead (landauer)")->delimiter(',');
    app->add_flag("--si", si_, "Add conductances in siemens (landauer)");
    app->add_option("--k", wavenumber_, "Wavenumber (pump)");
    app->add_option("--separation", separation_, "Distance between the two barriers (pump)");
    app->add_option("--U0", centre_, "Mean barrier strength along the cycle (pump)");
    app->add_option("--amplitude", amplitude_, "Radius of the cycle in barrier strengths (pump)");
    app->add_option("--lead", lead_, "Lead receiving the charge (pump)")->check(CLI::IsMember({"left", "right"}));
    app->add_option("--strengths", strengths_, "Barrier strengths (friedel)")->delimiter(',');
    app->add_option("--positions", positions_, "Barrier positions (friedel)")->delimiter(',');
    app->add_option("--E-min", e_min_, "Lower energy (friedel)");
    app->add_option("--E-max", e_max_, "Upper energy (friedel)");
  }

  void run(const Globals& g, Output& o) override {
    if (mode_ == "landauer") landauer(o);
    else if (mode_ == "pump") pump(g, o);
    else friedel(o);
  }

 private:
  void landauer(Output& o) {
    require(!smatrix_.empty(), ErrorKind::Config, "--smatrix is required in landauer mode");
    const auto j = load_json(smatrix_);
    const CMatrix S = complex_matrix(member(j, "S"), "S");
    std::vector<transport::Lead> leads;
    if (j.contains("leads")) {
      try {
        for (const auto& l : j["leads"])
          leads.push_back({member(l, "name").get<std::string>(), member(l, "channels").get<std::vector<long>>()});
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Config, "'" + smatrix_ + "': " + e.what());
      }
    } else {
      leads = transport::split_leads(S.rows(), S.rows() / 2);
    }
    const transport::ScatteringMatrix sm(S, leads);
    std::vector<std::string> cols = {"from", "to", "G", "double_sum", "discrepancy"};
    if (si_) cols.push_back("G_siemens");
    Table& t = o.table("conductance", cols);
    for (std::size_t a = 0; a < leads.size(); ++a) {
      for (std::size_t b = 0; b < leads.size(); ++b) {
        if (a == b) continue;
        const auto c = transport::landauer_conductance(sm, static_cast<long>(a), static_cast<long>(b));
        std::vector<Cell> row = {leads[a].name, leads[b].name, c.value, c.double_sum, c.discrepancy};
        if (si_) row.push_back(c.value * transport::kConductanceQuantum);
        t.add(row);
      }
    }
    if (!potentials_.empty()) {
      require(potentials_.size() == leads.size(), ErrorKind::Config, "--potentials needs one value per lead");
      const auto currents = transport::multi_lead_currents(sm, potentials_);
      Table& c = o.table("currents", {"lead", "potential", "current"});
      for (std::size_t i = 0; i < leads.size(); ++i) c.add({leads[i].name, potentials_[i], currents[i]});
    }
  }

  void pump(const Globals& g, Output& o) {
    transport::ParameterCycle cycle;
    const double c = centre_, a = amplitude_, k = wavenumber_, sep = separation_;
    cycle.path = [c, a](double s) {
      Eigen::VectorXd x(2);
      x << c + a * std::cos(2.0 * numerics::kPi * s), c + a * std::sin(2.0 * numerics::kPi * s);
      return x;
    };
    cycle.scattering = [k, sep](const Eigen::VectorXd& x) {
      return transport::delta_barriers(k, {x(0), x(1)}, {0.0, sep});
    };
    cycle.scale = 2.0 * numerics::kPi * std::abs(a);
    const auto q = transport::pumped_charge(cycle, {lead_ == "left" ? 0L : 1L}, g.tol_abs * 1e3);
    Table& s = summary(o, "pump");
    summary_row(s, "charge", q.charge);
    summary_row(s, "samples", static_cast<double>(q.samples));
    summary_row(s, "convergence", q.convergence);
    summary_row(s, "imaginary_residue", q.imaginary_residue);
    summary_row(s, "hermiticity_error", q.hermiticity_error);
  }

  void friedel(Output& o) {
    require(strengths_.size() == positions_.size(), ErrorKind::Config,
            "--strengths and --positions need the same length");
    require(e_min_ > 0.0 && e_max_ > e_min_, ErrorKind::Config, "friedel needs 0 < E-min < E-max");
    const auto strengths = strengths_;
    const auto positions = positions_;
    const auto r = transport::friedel_counting(
        [strengths, positions](double e) { return transport::delta_barriers(std::sqrt(e), strengths, positions); },
        e_min_, e_max_);
    Table& s = summary(o, "friedel");
    summary_row(s, "trace_route", r.trace_route);
    summary_row(s, "winding_route", r.winding_route);
    summary_row(s, "discrepancy", r.discrepancy);
  }

  std::string mode_ = "landauer", smatrix_, lead_ = "right";
  std::vector<double> potentials_, strengths_ = {1.0}, positions_ = {0.0};
  bool si_ = false;
  double wavenumber_ = 1.0, separation_ = 1.0, centre_ = 1.0, amplitude_ = 0.5, e_min_ = 0.01, e_max_ = 4.0;
};

// ---------------------------------------------------------------------------

class NoneqCommand : public Command {
 public:
  explicit NoneqCommand(CLI::App& root) {
    app = root.add_subcommand("noneq", "Work fluctuation theorems and heat conduction between two baths");
    app->add_option("--mode", mode_, "Calculation")->check(CLI::IsMember({"work", "heat"}));
    app->add_option("--protocol", protocol_, "JSON file with H_start, H_end and schedule (work)")
        ->check(CLI::ExistingFile);
    app->add_option("--T", temperature_, "Initial temperature (work)");
    app->add_option("--duration", duration_, "Protocol duration; 0 is a sudden quench (work)");
    app->add_option("--samples", samples_, "Sampled work values for a Jarzynski estimate; 0 skips it (work)");
    app->add_option("--energies", energies_, "Conductor levels (heat)")->delimiter(',');
    app->add_option("--T-hot", t_hot_, "Hot bath temperature (heat)");
    app->add_option("--T-cold", t_cold_, "Cold bath temperature (heat)");
    app->add_option("--coupling-hot", coupling_hot_, "Coupling of every level pair to the hot bath (heat)");
    app->add_option("--coupling-cold", coupling_cold_, "Coupling of every level pair to the cold bath (heat)");
    app->add_option("--time", time_, "Trajectory length (heat)");
    app->add_option("--trajectories", trajectories_, "Number of trajectories (heat)");
  }

  void run(const Globals& g, Output& o) override {
    if (mode_ == "work") work(g, o);
    else heat(g, o);
  }

 private:
  void work(const Globals& g, Output& o) {
    CMatrix start(2, 2), end(2, 2);
    start << 0.5, 0.0, 0.0, -0.5;
    end << 0.0, 1.0, 1.0, 0.0;
    std::string schedule = "linear";
    if (!protocol_.empty()) {
      const auto j = load_json(protocol_);
      start = complex_matrix(member(j, "H_start"), "H_start");
      end = complex_matrix(member(j, "H_end"), "H_end");
      schedule = j.value("schedule", schedule);
    }
    auto p = noneq::linear_protocol(start, end, duration_);
    if (schedule == "smoothstep") p.schedule = [](double u) { return u * u * (3.0 - 2.0 * u); };
    else require(schedule == "linear", ErrorKind::Config, "unknown schedule '" + schedule + "'");

    const auto forward = noneq::work_distribution(p, temperature_);
    const auto reverse = noneq::work_distribution(p.reversed(), temperature_);
    const auto [work, weight] = forward.merged();
    Table& k = o.table("work_distribution", {"work", "probability"});
    for (std::size_t i = 0; i < work.size(); ++i) k.add({work[i], weight[i]});
    const auto crooks = noneq::crooks_check(forward, reverse);
    Table& c = o.table("crooks", {"work", "log_ratio", "expected"});
    for (std::size_t i = 0; i < crooks.work.size(); ++i) c.add({crooks.work[i], crooks.log_ratio[i], crooks.expected[i]});
    const auto jz = noneq::jarzynski_estimate(forward);
    Table& s = summary(o);
    summary_row(s, "free_energy", forward.free_energy);
    summary_row(s, "jarzynski_free_energy", jz.free_energy);
    summary_row(s, "mean_work", jz.mean_work);
    summary_row(s, "dissipated_work", jz.dissipated);
    summary_row(s, "stochasticity_error", forward.stochasticity_error());
    summary_row(s, "crooks_residual", crooks.residual);
    if (samples_ > 0) {
      numerics::RandomStream rng(g.seed);
      const auto est = noneq::jarzynski_estimate(noneq::sample_work(forward, samples_, rng));
      summary_row(s, "sampled_free_energy", est.free_energy);
      summary_row(s, "sampled_error", est.error);
      summary_row(s, "sampled_bias", est.bias);
    }
  }

  void heat(const Globals& g, Output& o) {
    noneq::TwoBathModel m;
    m.energies = energies_;
    const long n = static_cast<long>(energies_.size());
    const Eigen::MatrixXd pairs = Eigen::MatrixXd::Ones(n, n) - Eigen::MatrixXd::Identity(n, n);
    m.hot_coupling = coupling_hot_ * pairs;
    m.cold_coupling = coupling_cold_ * pairs;
    m.t_hot = t_hot_;
    m.t_cold = t_cold_;
    const auto r = noneq::heat_conduction_ft(m, time_, trajectories_, numerics::RandomStream(g.seed));
    Table& h = o.table("histogram", {"heat", "count"});
    for (std::size_t i = 0; i < r.histogram.centers.size(); ++i)
      h.add({r.histogram.centers[i], static_cast<long long>(r.histogram.counts[i])});
    Table& f = o.table("fluctuation_theorem", {"heat", "log_ratio", "error"});
    for (std::size_t i = 0; i < r.ft_heat.size(); ++i) f.add({r.ft_heat[i], r.ft_log_ratio[i], r.ft_error[i]});
    Table& s = summary(o);
    summary_row(s, "mean_heat", r.mean);
    summary_row(s, "mean_heat_error", r.mean_error);
    summary_row(s, "variance", r.variance);
    summary_row(s, "ft_slope", r.ft_slope);
    summary_row(s, "ft_slope_error", r.ft_slope_error);
    summary_row(s, "ft_expected", r.ft_expected);
    summary_row(s, "conductance", r.conductance);
    summary_row(s, "noise_intensity", r.intensity);
    summary_row(s, "conductance_from_noise", r.conductance_from_noise);
  }

  std::string mode_ = "work", protocol_;
  double temperature_ = 1.0, duration_ = 1.0, t_hot_ = 1.25, t_cold_ = 0.75, coupling_hot_ = 1.0,
         coupling_cold_ = 1.0, time_ = 40.0;
  long samples_ = 0, trajectories_ = 1000;
  std::vector<double> energies_ = {0.0, 1.0};
};

// ---------------------------------------------------------------------------

std::string option_value(const CLI::Option* opt) {
  if (opt->count() == 0) return opt->get_default_str();
  std::string s;
  for (const auto& r : opt->results()) s += (s.empty() ? "" : ",") + r;
  return s;
}

std::string config_fingerprint(const CLI::App& root, const CLI::App& sub) {
  std::string text = sub.get_name() + "\n";
  for (const CLI::App* a : {&root, &sub}) {
    for (const CLI::Option* opt : a->get_options()) {
      const auto& name = opt->get_name(false, true);
      if (name == "--help" || name == "--config" || name == "--out" || name == "--format" || name == "--version")
        continue;
      text += opt->get_single_name() + "=" + option_value(opt) + "\n";
    }
  }
  return fnv1a_hex(text);
}

void report(std::ostream& err, int code, const std::string& kind, const std::string& message) {
  nlohmann::ordered_json j;
  j["error"] = code == kExitConfig ? "ConfigError" : "ComputeError";
  j["kind"] = kind;
  j["message"] = message;
  j["exit_code"] = code;
  err << j.dump() << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Statistical mechanics toolkit: equilibrium ensembles, fluctuations and transport", "statmech");
  app.option_defaults()->always_capture_default();
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", version());
  app.set_config("--config", "", "TOML file mirroring the command-line flags");

  Globals g;
  app.add_option("--seed", g.seed, "Seed of the random streams");
  app.add_option("--tol-rel", g.tol_rel, "Relative tolerance of quadratures and root finders");
  app.add_option("--tol-abs", g.tol_abs, "Absolute tolerance of quadratures and root finders");
  app.add_option("--out", g.out, "Output file; standard output when empty or '-'");
  app.add_option("--format", g.format, "Output encoding")->check(CLI::IsMember({"csv", "json"}));

  std::vector<std::unique_ptr<Command>> commands;
  commands.push_back(std::make_unique<EnsembleCommand>(app));
  commands.push_back(std::make_unique<GasCommand>(app));
  commands.push_back(std::make_unique<ChemCommand>(app));
  commands.push_back(std::make_unique<IsingCommand>(app));
  commands.push_back(std::make_unique<RgCommand>(app));
  commands.push_back(std::make_unique<VirialCommand>(app));
  commands.push_back(std::make_unique<LangevinCommand>(app));
  commands.push_back(std::make_unique<RatesCommand>(app));
  commands.push_back(std::make_unique<MasterCommand>(app));
  commands.push_back(std::make_unique<ResponseCommand>(app));
  commands.push_back(std::make_unique<TransportCommand>(app));
  commands.push_back(std::make_unique<NoneqCommand>(app));
  for (auto& c : commands) c->app->configurable();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    report(err, kExitConfig, "ConfigError", e.what());
    return kExitConfig;
  }

  try {
    for (auto& c : commands) {
      if (!c->app->parsed()) continue;
      Output o;
      o.version = version();
      o.command = c->app->get_name();
      o.seed = g.seed;
      o.config_hash = config_fingerprint(app, *c->app);
      c->run(g, o);
      std::ostringstream text;
      if (g.format == "json") write_json(text, o);
      else write_csv(text, o);
      if (g.out.empty() || g.out == "-") {
        out << text.str();
      } else {
        std::ofstream file(g.out, std::ios::binary);
        require(static_cast<bool>(file), ErrorKind::Config, "cannot write '" + g.out + "'");
        file << text.str();
        require(static_cast<bool>(file), ErrorKind::Config, "error writing '" + g.out + "'");
      }
    }
  } catch (const Error& e) {
    const int code = e.kind() == ErrorKind::Config ? kExitConfig : kExitCompute;
    report(err, code, std::string(to_string(e.kind())), bare_message(e));
    return code;
  } catch (const std::exception& e) {
    report(err, kExitCompute, "InternalError", e.what());
    return kExitCompute;
  }
  return 0;
}

}  // namespace statmech::cli
