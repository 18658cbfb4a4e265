#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "stmpc/reference.hpp"
#include "test_support.hpp"

using namespace stmpc;

TEST_CASE("matrix exponential of the zero matrix is the identity") {
  const Eigen::MatrixXd E = matrix_exponential(Eigen::MatrixXd::Zero(2, 2), 1.0);
  CHECK((E - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("matrix exponential matches the truncated Taylor oracle") {
  Eigen::MatrixXd A(2, 2);
  A << 0.0, 1.0, -2.0, 0.0;
  const Eigen::MatrixXd expected = reference::matrix_exponential_taylor(A, 0.1);
  const Eigen::MatrixXd actual = matrix_exponential(A, 0.1);
  CHECK((actual - expected).cwiseAbs().maxCoeff() <= 1e-12 * expected.cwiseAbs().maxCoeff());
}

TEST_CASE("scalar exponential") {
  const Eigen::MatrixXd A = Eigen::MatrixXd::Constant(1, 1, -1.0);
  CHECK(matrix_exponential(A, 2.0)(0, 0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-13));
}

TEST_CASE("matrix exponential rejects non-finite input") {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, 2);
  A(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(matrix_exponential(A, 1.0), InvalidInputError);
  CHECK_THROWS_AS(matrix_exponential(Eigen::MatrixXd::Zero(2, 2), -1.0), InvalidInputError);
}

TEST_CASE("matrix exponential vs Taylor on random contractions") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 4);
    Eigen::MatrixXd A = testing::random_matrix(rng, n, n, 1.0);
    const double t = 0.9 / std::max(1.0, A.cwiseAbs().rowwise().sum().maxCoeff());
    const Eigen::MatrixXd expected = reference::matrix_exponential_taylor(A, t);
    const Eigen::MatrixXd actual = matrix_exponential(A, t);
    CHECK((actual - expected).cwiseAbs().maxCoeff() <=
          1e-12 * std::max(1.0, expected.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("integrator discretizes exactly") {
  const DiscreteMap map = discretize(testing::integrator(), 0.5);
  CHECK(map.A(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(map.B(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("spring-mass discretization matches the high-order ODE oracle") {
  const LinearSystem sys = testing::spring_mass();
  for (const double h : {0.1, 1.0, 3.0}) {
    const DiscreteMap fast = discretize(sys, h);
    const DiscreteMap slow = reference::discretize_ode(sys, h);
    CHECK((fast.A - slow.A).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((fast.B - slow.B).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("discretize rejects nonpositive horizons") {
  CHECK_THROWS_AS(discretize(testing::spring_mass(), 0.0), InvalidInputError);
  CHECK_THROWS_AS(discretize(testing::spring_mass(), -0.1), InvalidInputError);
}

TEST_CASE("semigroup identity on random systems") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 3);
    LinearSystem sys;
    sys.A = testing::random_matrix(rng, n, n, 1.5);
    sys.B = testing::random_matrix(rng, n, 2, 1.0);
    sys.u_bounds = Eigen::VectorXd::Constant(2, 1.0);
    const double h1 = 0.1, h2 = 0.2;
    const DiscreteMap m1 = discretize(sys, h1);
    const DiscreteMap m2 = discretize(sys, h2);
    const DiscreteMap m12 = discretize(sys, h1 + h2);
    const double scale = std::max(1.0, m12.A.cwiseAbs().maxCoeff());
    CHECK((m12.A - m2.A * m1.A).cwiseAbs().maxCoeff() <= 1e-10 * scale);
    CHECK((m12.B - (m2.A * m1.B + m2.B)).cwiseAbs().maxCoeff() <= 1e-10 * scale);
  }
}

TEST_CASE("integrator kernel has the closed form [[d, d^2/2],[d^2/2, d^3/3 + d]]") {
  const double d = 0.3;
  const Eigen::MatrixXd G =
      stage_cost_kernel(testing::integrator(), testing::unit_weights(1, 1), d);
  CHECK(G(0, 0) == doctest::Approx(d).epsilon(1e-12));
  CHECK(G(0, 1) == doctest::Approx(d * d / 2.0).epsilon(1e-12));
  CHECK(G(1, 0) == doctest::Approx(d * d / 2.0).epsilon(1e-12));
  CHECK(G(1, 1) == doctest::Approx(d * d * d / 3.0 + d).epsilon(1e-12));
}

TEST_CASE("spring-mass kernel matches the dense trapezoid oracle") {
  const LinearSystem sys = testing::spring_mass();
  const CostWeights w = testing::spring_mass_weights();
  const Eigen::MatrixXd G = stage_cost_kernel(sys, w, 0.1);
  const Eigen::MatrixXd oracle = reference::stage_cost_kernel_trapezoid(sys, w, 0.1, 1e-5);
  CHECK((G - oracle).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("kernel is symmetric positive definite and rejects h <= 0") {
  const LinearSystem sys = testing::spring_mass();
  const CostWeights w = testing::spring_mass_weights();
  for (const double h : {0.05, 0.8, 2.5}) {
    const Eigen::MatrixXd G = stage_cost_kernel(sys, w, h);
    CHECK(symmetry_error(G) == 0.0);
    CHECK(min_eigenvalue(G) > 1e-12);
  }
  CHECK_THROWS_AS(stage_cost_kernel(sys, w, 0.0), InvalidInputError);
}

TEST_CASE("stage cost basics") {
  const Eigen::MatrixXd G =
      stage_cost_kernel(testing::integrator(), testing::unit_weights(1, 1), 0.4);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);
  CHECK(stage_cost(zero, zero, G) == 0.0);
  CHECK(stage_cost(Eigen::VectorXd::Constant(1, 1.0), zero, G) ==
        doctest::Approx(0.4).epsilon(1e-12));
  CHECK_THROWS_AS(stage_cost(Eigen::VectorXd::Zero(2), zero, G), InvalidInputError);
}

TEST_CASE("cost-splitting identity on random inputs") {
  std::mt19937_64 rng(3);
  const LinearSystem sys = testing::spring_mass();
  const CostWeights w = testing::spring_mass_weights();
  const DiscretizationTable table = DiscretizationTable::build(sys, w, 0.1, 20, 6);
  std::normal_distribution<double> gauss(0.0, 2.0);
  for (int trial = 0; trial < 40; ++trial) {
    Eigen::VectorXd x(2), u(1);
    x << gauss(rng), gauss(rng);
    u << gauss(rng);
    for (int i = 2; i <= table.patterns(); ++i) {
      const double whole = stage_cost(x, u, table.kernel(i));
      const Eigen::VectorXd x_mid = table.map(i - 1).A * x + table.map(i - 1).B * u;
      const double split =
          stage_cost(x, u, table.kernel(i - 1)) + stage_cost(x_mid, u, table.kernel(1));
      CHECK(std::abs(whole - split) <= 1e-9 * std::max(1.0, std::abs(whole)));
    }
  }
}

TEST_CASE("table construction validates its inputs") {
  const LinearSystem sys = testing::spring_mass();
  const CostWeights w = testing::spring_mass_weights();
  CHECK_THROWS_AS(DiscretizationTable::build(sys, w, 0.1, 10, 10), InvalidInputError);
  CHECK_THROWS_AS(DiscretizationTable::build(sys, w, -0.1, 10, 3), InvalidInputError);
  CostWeights bad = w;
  bad.Q(0, 1) = 0.5;  // asymmetric
  CHECK_THROWS_AS(DiscretizationTable::build(sys, bad, 0.1, 10, 3), InvalidInputError);
}

TEST_CASE("parallel and serial table builds are identical") {
  const LinearSystem sys = testing::spring_mass();
  const CostWeights w = testing::spring_mass_weights();
  const DiscretizationTable serial =
      DiscretizationTable::build(sys, w, 0.1, 40, 12, Execution::serial);
  const DiscretizationTable parallel =
      DiscretizationTable::build(sys, w, 0.1, 40, 12, Execution::parallel);
  for (int i = 1; i <= 12; ++i) {
    CHECK((serial.map(i).A - parallel.map(i).A).cwiseAbs().maxCoeff() == 0.0);
    CHECK((serial.map(i).B - parallel.map(i).B).cwiseAbs().maxCoeff() == 0.0);
    CHECK((serial.kernel(i) - parallel.kernel(i)).cwiseAbs().maxCoeff() == 0.0);
  }
}
