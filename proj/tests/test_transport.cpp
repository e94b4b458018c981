#include <doctest.h>

#include <cmath>

#include "statmech/error.hpp"
#include "statmech/transport.hpp"

using namespace statmech;
using namespace statmech::transport;
using cd = std::complex<double>;

namespace {

constexpr double kTwoPi = 2.0 * numerics::kPi;

Matrix beam_splitter(double g, double phase = 0.3) {
  const double t = std::sqrt(g), r = std::sqrt(1.0 - g);
  Matrix S(2, 2);
  S << cd(r, 0), cd(0, t) * std::exp(cd(0, phase)), cd(0, t) * std::exp(cd(0, -phase)), cd(r, 0);
  return S;
}

Matrix block_diag(const Matrix& a, const Matrix& b) {
  Matrix m = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  m.topLeftCorner(a.rows(), a.cols()) = a;
  m.bottomRightCorner(b.rows(), b.cols()) = b;
  return m;
}

/// Transmission phases winding in opposite directions, as for flux through a ring.
Matrix winding_model(double phi) {
  Matrix S = Matrix::Zero(2, 2);
  S(0, 1) = std::exp(cd(0, -phi));
  S(1, 0) = std::exp(cd(0, phi));
  return S;
}

Eigen::VectorXd point(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("unitarity is enforced") {
  Matrix S = beam_splitter(0.4);
  CHECK_NOTHROW(ScatteringMatrix(S, split_leads(2, 1)));
  S(0, 0) *= 1.0 + 1e-8;
  try {
    ScatteringMatrix bad(S, split_leads(2, 1));
    FAIL("expected UnitarityError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Unitarity);
  }
}

TEST_CASE("leads must partition the channels") {
  const Matrix S = Matrix::Identity(3, 3);
  CHECK_THROWS_AS(ScatteringMatrix(S, {{"A", {0, 1}}, {"B", {1, 2}}}), Error);
  CHECK_THROWS_AS(ScatteringMatrix(S, {{"A", {0}}, {"B", {2}}}), Error);
  CHECK_NOTHROW(ScatteringMatrix(S, {{"A", {0, 2}}, {"B", {1}}}));
}

TEST_CASE("perfect transmission gives one conductance quantum") {
  Matrix S = Matrix::Zero(2, 2);
  S(0, 1) = cd(0, 1);
  S(1, 0) = cd(0, 1);
  const ScatteringMatrix sm(S, split_leads(2, 1));
  CHECK(landauer_conductance(sm, 0, 1).value == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(landauer_conductance(sm, "B", "A").value == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("beam splitter conductance equals its transmission") {
  for (double g : {0.0, 0.1, 0.37, 0.5, 0.99}) {
    const ScatteringMatrix sm(beam_splitter(g), split_leads(2, 1));
    const Conductance c = landauer_conductance(sm, 0, 1);
    CHECK(std::abs(c.value - g) < 1e-14);
    CHECK(std::abs(c.double_sum - g) < 1e-14);
    CHECK(c.discrepancy < 1e-14);
  }
}

TEST_CASE("random unitaries respect the conductance bounds") {
  numerics::RandomStream rng(2024, 7);
  for (int trial = 0; trial < 200; ++trial) {
    const Matrix U = random_unitary(6, rng);
    REQUIRE(unitarity_error(U) < 1e-13);
    const ScatteringMatrix sm(U, split_leads(6, 3));
    const Conductance c = landauer_conductance(sm, 0, 1);
    CHECK(c.value >= -1e-14);
    CHECK(c.value <= 3.0 + 1e-14);
    CHECK(c.discrepancy < 1e-14);
    CHECK(std::abs(c.value - landauer_conductance(sm, 1, 0).value) < 1e-13);
  }
}

TEST_CASE("conductance is invariant under channel rotations within each lead") {
  numerics::RandomStream rng(99, 1);
  const Matrix S = random_unitary(5, rng);
  const ScatteringMatrix base(S, split_leads(5, 2));
  const double g0 = landauer_conductance(base, 0, 1).value;
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix left = block_diag(random_unitary(2, rng), random_unitary(3, rng));
    const Matrix right = block_diag(random_unitary(2, rng), random_unitary(3, rng));
    const ScatteringMatrix rotated(left * S * right, split_leads(5, 2));
    CHECK(std::abs(landauer_conductance(rotated, 0, 1).value - g0) < 1e-13);
  }
}

TEST_CASE("multi-lead currents") {
  numerics::RandomStream rng(5, 2);
  const Matrix S = random_unitary(6, rng);
  const ScatteringMatrix sm(S, {{"A", {0, 1}}, {"B", {2, 3}}, {"C", {4, 5}}});

  SUBCASE("equal potentials carry no current") {
    for (double I : multi_lead_currents(sm, {0.7, 0.7, 0.7})) CHECK(std::abs(I) < 1e-15);
  }
  SUBCASE("currents are conserved") {
    const auto I = multi_lead_currents(sm, {0.3, -1.1, 0.45});
    CHECK(std::abs(I[0] + I[1] + I[2]) < 1e-12);
  }
  SUBCASE("two leads reduce to the Landauer conductance") {
    const ScatteringMatrix two(S, split_leads(6, 3));
    const double VA = 0.2, VB = -0.35;
    const auto I = multi_lead_currents(two, {VA, VB});
    const double G = landauer_conductance(two, 0, 1).value;
    CHECK(I[1] == doctest::Approx(-G * (VB - VA)).epsilon(1e-13));
    CHECK(I[0] == doctest::Approx(-I[1]).epsilon(1e-13));
  }
}

TEST_CASE("delta barriers give unitary scattering with the known single-barrier transmission") {
  for (double k : {0.3, 1.0, 2.7}) {
    const Matrix S1 = delta_barriers(k, {1.5}, {0.4});
    CHECK(unitarity_error(S1) < 1e-14);
    const double T = 4 * k * k / (4 * k * k + 1.5 * 1.5);
    CHECK(std::norm(S1(1, 0)) == doctest::Approx(T).epsilon(1e-13));
    const Matrix S2 = delta_barriers(k, {2.0, 3.0}, {-0.5, 0.8});
    CHECK(unitarity_error(S2) < 1e-13);
  }
}

TEST_CASE("Richardson derivative of a matrix family") {
  const MatrixFamily S = [](double x) { return winding_model(std::sin(x)); };
  const MatrixDerivative d = derivative(S, 0.4, 1e-4);
  Matrix exact = Matrix::Zero(2, 2);
  exact(0, 1) = cd(0, -std::cos(0.4)) * std::exp(cd(0, -std::sin(0.4)));
  exact(1, 0) = cd(0, std::cos(0.4)) * std::exp(cd(0, std::sin(0.4)));
  CHECK((d.value - exact).cwiseAbs().maxCoeff() < 1e-10);

  SUBCASE("noise triggers StepError") {
    numerics::RandomStream rng(3, 0);
    const MatrixFamily noisy = [&](double x) {
      Matrix m = winding_model(x);
      m(0, 0) += 1e-6 * rng.gaussian();
      return m;
    };
    try {
      derivative(noisy, 0.0, 1e-4);
      FAIL("expected StepError");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Step);
    }
  }
}

TEST_CASE("BPT conductance") {
  SUBCASE("parameter-independent S has no pumping") {
    const Matrix fixed = beam_splitter(0.3);
    const MatrixFamily S = [&](double) { return fixed; };
    const BptResult r = bpt_conductance(S, 0.5, {0});
    CHECK(std::abs(r.conductance) < 1e-14);
    ParameterCycle cycle{[](double s) { return point(std::cos(kTwoPi * s), std::sin(kTwoPi * s)); },
                         [&](const Eigen::VectorXd&) { return fixed; }};
    CHECK(std::abs(pumped_charge(cycle, {0}).charge) < 1e-14);
  }
  SUBCASE("generator i dS/dX S† is Hermitian") {
    const MatrixFamily S = [](double x) { return delta_barriers(1.3, {x, 2.0 - x}, {0.0, 1.1}); };
    for (double x : {0.2, 0.9, 1.7}) {
      const BptResult r = bpt_conductance(S, x, {1});
      CHECK(r.hermiticity_error < 1e-9);
      CHECK(r.imaginary_residue < 1e-8);
    }
  }
  SUBCASE("analytic phase derivative") {
    const MatrixFamily S = [](double x) { return winding_model(kTwoPi * x * x); };
    const BptResult r = bpt_conductance(S, 0.3, {0});
    CHECK(r.conductance == doctest::Approx(-2.0 * 0.3).epsilon(1e-9));
  }
}

TEST_CASE("a full transmission-phase winding pumps one charge") {
  ParameterCycle cycle{[](double s) { return point(std::cos(kTwoPi * s), std::sin(kTwoPi * s)); },
                       [](const Eigen::VectorXd& x) { return winding_model(std::atan2(x(1), x(0))); }};
  cycle.scale = kTwoPi;
  const PumpedCharge q = pumped_charge(cycle, {0});
  CHECK(q.charge == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(q.convergence < 1e-9);
  CHECK(q.hermiticity_error < 1e-9);
}

TEST_CASE("pumped charge does not depend on how the cycle is sampled") {
  const auto model = [](const Eigen::VectorXd& x) { return delta_barriers(1.1, {x(0), x(1)}, {0.0, 2.0}); };
  const auto loop = [](double s) {
    return point(1.0 + 0.8 * std::cos(kTwoPi * s), 1.0 + 0.8 * std::sin(kTwoPi * s));
  };
  ParameterCycle uniform{loop, model, 16, 5.0};
  ParameterCycle warped{[&](double s) { return loop(s + 0.12 * std::sin(kTwoPi * s)); }, model, 24, 7.0};
  const double q1 = pumped_charge(uniform, {1}, 1e-10).charge;
  const double q2 = pumped_charge(warped, {1}, 1e-10).charge;
  CHECK(std::abs(q1 - q2) < 1e-6);
  CHECK(std::abs(q1) > 1e-4);

  SUBCASE("reversing the loop flips the charge") {
    ParameterCycle reversed{[&](double s) { return loop(1.0 - s); }, model, 16, 5.0};
    CHECK(pumped_charge(reversed, {1}, 1e-10).charge == doctest::Approx(-q1).epsilon(1e-8));
  }
  SUBCASE("left and right leads receive opposite charge") {
    CHECK(pumped_charge(uniform, {0}, 1e-10).charge == doctest::Approx(-q1).epsilon(1e-8));
  }
}

TEST_CASE("cycle validation") {
  ParameterCycle open{[](double s) { return point(s, 0.0); },
                      [](const Eigen::VectorXd&) { return Matrix(Matrix::Identity(2, 2)); }};
  CHECK_THROWS_AS(pumped_charge(open, {0}), Error);
  ParameterCycle sparse{[](double s) { return point(std::cos(kTwoPi * s), 0.0); },
                        [](const Eigen::VectorXd&) { return Matrix(Matrix::Identity(2, 2)); }, 4};
  CHECK_THROWS_AS(pumped_charge(sparse, {0}), Error);
}

TEST_CASE("Friedel sum rule") {
  SUBCASE("single channel phase shift") {
    const auto delta = [](double e) { return 0.4 * std::atan(e) + 0.1 * e * e; };
    const MatrixFamily S = [&](double e) { return Matrix::Constant(1, 1, std::exp(cd(0, 2.0 * delta(e)))); };
    const FriedelCount n = friedel_counting(S, -1.0, 2.0);
    const double exact = (delta(2.0) - delta(-1.0)) / numerics::kPi;
    CHECK(n.trace_route == doctest::Approx(exact).epsilon(1e-9));
    CHECK(n.winding_route == doctest::Approx(exact).epsilon(1e-12));
    CHECK(n.discrepancy < 1e-8);
  }
  SUBCASE("energy-independent S counts nothing") {
    numerics::RandomStream rng(8, 0);
    const Matrix U = random_unitary(3, rng);
    const FriedelCount n = friedel_counting([&](double) { return U; }, 0.0, 1.0);
    CHECK(std::abs(n.trace_route) < 1e-14);
    CHECK(std::abs(n.winding_route) < 1e-14);
  }
  SUBCASE("a resonance adds one state") {
    const double Er = 0.3, width = 0.01, half = 5.0;
    const MatrixFamily S = [&](double e) { return Matrix::Constant(1, 1, breit_wigner(e, Er, width)); };
    FriedelOptions opts;
    opts.energy_scale = width;
    const FriedelCount n = friedel_counting(S, Er - half, Er + half, opts);
    const double exact = 2.0 / numerics::kPi * std::atan(2.0 * half / width);
    CHECK(n.winding_route == doctest::Approx(exact).epsilon(1e-12));
    CHECK(n.discrepancy < 1e-8);
    CHECK(std::abs(n.trace_route - 1.0) < 1e-3);
  }
  SUBCASE("two-channel resonance mixed with a rotating background") {
    numerics::RandomStream rng(11, 4);
    const Matrix V = random_unitary(2, rng);
    const MatrixFamily S = [&](double e) {
      Matrix d = Matrix::Zero(2, 2);
      d(0, 0) = breit_wigner(e, 0.0, 0.05);
      d(1, 1) = std::exp(cd(0, 0.2 * e));
      return Matrix(V * d * V.adjoint());
    };
    FriedelOptions opts;
    opts.energy_scale = 0.05;
    const FriedelCount n = friedel_counting(S, -2.0, 2.0, opts);
    const double exact = 2.0 / numerics::kPi * std::atan(2.0 * 2.0 / 0.05) + 0.2 * 4.0 / kTwoPi;
    CHECK(n.winding_route == doctest::Approx(exact).epsilon(1e-11));
    CHECK(n.discrepancy < 1e-8);
  }
  SUBCASE("a discontinuous phase cannot be unwrapped") {
    const MatrixFamily S = [](double e) { return Matrix::Constant(1, 1, e < 0.5 ? cd(1, 0) : cd(-1, 0)); };
    try {
      friedel_counting(S, 0.0, 1.0);
      FAIL("expected BranchError");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Branch);
    }
  }
}

TEST_CASE("channel currents from occupations") {
  const MatrixFamily S = [](double e) { return delta_barriers(std::sqrt(e), {0.8, 0.8}, {0.0, 1.5}); };

  SUBCASE("equal occupations carry no current") {
    const Occupation f = [](double e) { return fermi(e, 1.0, 0.05); };
    for (double I : channel_current({f, f}, S, 0.2, 2.0)) CHECK(std::abs(I) < 1e-14);
  }
  SUBCASE("zero-temperature window") {
    const double E1 = 1.0, E2 = 1.4;
    const Occupation window = [&](double e) { return e > E1 && e < E2 ? 1.0 : 0.0; };
    const Occupation empty = [](double) { return 0.0; };
    ChannelCurrentOptions opts;
    opts.breakpoints = {E1, E2};
    const auto I = channel_current({window, empty}, S, 0.5, 2.0, opts);
    const double mean_g =
        numerics::integrate([&](double e) { return std::norm(S(e)(1, 0)); }, E1, E2, {1e-13, 1e-11}) / (E2 - E1);
    CHECK(I[1] == doctest::Approx((E2 - E1) / kTwoPi * mean_g).epsilon(1e-9));
    CHECK(I[0] == doctest::Approx(-I[1]).epsilon(1e-9));
  }
  SUBCASE("fully transmitting window gives (E2 - E1)/2π") {
    const MatrixFamily clear = [](double) {
      Matrix m = Matrix::Zero(2, 2);
      m(0, 1) = m(1, 0) = 1.0;
      return m;
    };
    const Occupation window = [](double e) { return e > 0.2 && e < 0.9 ? 1.0 : 0.0; };
    ChannelCurrentOptions opts;
    opts.breakpoints = {0.2, 0.9};
    const auto I = channel_current({window, [](double) { return 0.0; }}, clear, 0.0, 1.0, opts);
    CHECK(I[1] == doctest::Approx(0.7 / kTwoPi).epsilon(1e-12));
  }
  SUBCASE("small bias reproduces the linear Landauer currents") {
    const double EF = 1.2, T = 0.01, bandwidth = 1.0, bias = 1e-3 * bandwidth;
    const Occupation left = [&](double e) { return fermi(e, EF + bias, T); };
    const Occupation right = [&](double e) { return fermi(e, EF, T); };
    const auto I = channel_current({left, right}, S, EF - 40 * T, EF + 40 * T);
    const ScatteringMatrix at_fermi(S(EF), split_leads(2, 1));
    const auto linear = multi_lead_currents(at_fermi, {bias, 0.0});
    CHECK(I[1] == doctest::Approx(linear[1]).epsilon(0.01));
    CHECK(I[0] == doctest::Approx(linear[0]).epsilon(0.01));
  }
}
