#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "qiso/error.hpp"
#include "qiso/hadamard.hpp"

using namespace qiso;

namespace {
const Grid kGrid{8.0, 7999};
}

TEST_CASE("zero and constant directions") {
  const PotentialSpec p = PotentialSpec::plus(0.05, 0.05);
  BumpSpec flat = p.beta;
  flat.amplitude = 0.0;
  CHECK(variational_derivative(p, 1.0, 1, flat, false, kGrid) == 0.0);
  CHECK(fd_oracle(p, 1.0, 1, flat, false, 1e-5, kGrid) == 0.0);
  const TridiagonalOperator T = discretize(p, 1.0, kGrid);
  const std::vector<double> ones(kGrid.n, 1.0);
  for (std::size_t j : {1, 2, 5}) CHECK(std::abs(variational_derivative(T, j, ones) - 1.0) <= 1e-10);
}

TEST_CASE("harmonic ground state against the Gaussian closed form") {
  const BumpSpec beta{3.5, 0.5, 1.0};
  const double formula = variational_derivative(PotentialSpec::harmonic(), 1.0, 1, beta, false, kHadamardGrid);
  const double exact = oracle::simpson(
      [](double x) {
        const double g = oracle::gaussian_ground_state(x);
        return oracle::mollifier(3.5, 0.5, 1.0, x) * g * g;
      },
      3.0, 4.0, 20000);
  CHECK(std::abs(formula - exact) <= 1e-5 * exact);
}

TEST_CASE("formula against central differences") {
  const PotentialSpec p = PotentialSpec::plus(0.05, 0.05);
  const VariationResult r = hadamard_check(p, 1.0, 1, p.beta, false);
  CHECK(r.relative_discrepancy <= 1e-4);
  CHECK(r.formula_value > 0.0);
  CHECK(r.formula_value <= p.beta.amplitude);

  const std::vector<double> steps{0.4, 0.2, 0.1};
  const auto rows = fd_convergence(p, 1.0, 1, p.beta, false, steps);
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double ratio = rows[i - 1].discrepancy / rows[i].discrepancy;
    CHECK(ratio > 3.0);
    CHECK(ratio < 5.0);
  }
}

TEST_CASE("monotonicity for a nonnegative direction") {
  const PotentialSpec p = PotentialSpec::plus(0.05, 0.05);
  const TridiagonalOperator T = discretize(p, 0.5, kGrid);
  for (bool reflected : {false, true}) {
    const auto dir = sample_direction(p.beta, reflected, kGrid);
    for (std::size_t j = 1; j <= 6; ++j) CHECK(variational_derivative(T, j, dir) >= 0.0);
  }
}

TEST_CASE("ordering change is reported") {
  const PotentialSpec p = PotentialSpec::harmonic();
  const BumpSpec wide{0.0, 7.0, 1.0};
  CHECK_THROWS_AS(fd_oracle(p, 1.0, 2, wide, false, 50.0, kGrid), ConvergenceError);
}

TEST_CASE("asymmetry witness") {
  const BumpSpec beta{3.5, 0.5, 1.0};
  const AsymmetryWitness w0 = asymmetry_witness(PotentialSpec::plus(0.0, 0.05), 1.0, beta);
  CHECK(std::abs(w0.gap) <= 1e-12);
  const AsymmetryWitness w = asymmetry_witness(PotentialSpec::plus(0.05, 0.05), 1.0, beta);
  CHECK(std::abs(w.gap) > 100.0 * w.error_estimate);
  CHECK(w.gap > 0.0);
  CHECK(w.d_plus - w.d_minus == w.gap);
}

TEST_CASE("variation csv") {
  const std::vector<VariationResult> rows{{1, 1.0, 0.5, 0.5, 1e-5, 0.0, 0.0}};
  const CsvTable t = variation_csv(rows);
  CHECK(t.columns().front() == "j");
  CHECK(t.size() == 1);
}
