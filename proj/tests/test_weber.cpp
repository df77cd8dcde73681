#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "qiso/eigensolve.hpp"
#include "qiso/error.hpp"
#include "qiso/weber.hpp"

using namespace qiso;

namespace {
const Grid kCoarse{8.0, 7999};
const Grid kFine{8.0, 15999};

bool all_applicable_pass(const WeberPropertyReport& r) {
  for (const auto& c : r.checks) {
    if (c.applicable && !c.passed) return false;
  }
  return true;
}
}  // namespace

TEST_CASE("lambda = 1 gives the Gaussian") {
  const WeberSolution w = solve_weber(1.0, -8.0, 8.0, 0.0, 1.0);
  CHECK(w.boundary_case);
  CHECK(w.zeros.empty());
  REQUIRE(w.critical_points.size() == 1);
  CHECK(std::abs(w.a) <= 1e-9);
  for (double x = -8.0; x <= 4.0; x += 0.5) {
    CHECK(w.sample_at(x).w > 0.0);
    CHECK(std::abs(w.sample_at(x).w - std::exp(-x * x / 2)) <= 1e-9 * std::exp(-x * x / 2) + 1e-11);
  }
  const WeberPropertyReport r = check_properties(w);
  CHECK(all_applicable_pass(r));
  CHECK(std::abs(w.decay_slope) < 1e-6);
}

TEST_CASE("properties hold for lambda reached by small t") {
  for (double lam : {1.00001, 1.00005, 1.0001, 1.0002}) {
    const WeberSolution w = solve_weber(lam, -8.0, 8.0, -3.0, 0.01);
    CAPTURE(lam);
    CHECK(all_applicable_pass(check_properties(w)));
    CHECK(w.a > 0.0);
    CHECK(w.a < std::sqrt(lam));
    REQUIRE(w.z0.has_value());
    CHECK(*w.z0 > 3.0);
    CHECK(w.samples.back().w < 0.0);
    CHECK(w.max_residual <= 1e-8);
    CHECK(w.sample_at(-3.0).w == doctest::Approx(0.01).epsilon(1e-14));
  }
}

TEST_CASE("zero moves inside (-inf, 3] once lambda leaves the small-t regime") {
  const WeberSolution w = solve_weber(1.5, -8.0, 8.0, -3.0, 1.0);
  REQUIRE(w.zeros.size() == 1);
  CHECK(w.zeros.front() < 3.0);
  CHECK(w.critical_points.size() == 1);
  CHECK(w.a > 0.0);
  bool positivity = true;
  for (const auto& c : check_properties(w).checks) {
    if (c.name.rfind("(i)", 0) == 0) positivity = c.passed;
  }
  CHECK_FALSE(positivity);
}

TEST_CASE("Weber samples agree with a fixed-step integrator") {
  const double lam = 1.4;
  const WeberSolution w = solve_weber(lam, -8.0, 8.0, -3.0, 1.0);
  const auto q = [lam](double x) { return lam - x * x; };
  const WeberSample& s = w.sample_at(-3.0);
  for (double x : {-2.0, -0.5, 0.0, 1.0, 2.5, 3.5}) {
    const auto y = oracle::second_order(q, {s.w, s.dw}, -3.0, x, 40000);
    CHECK(std::abs(w.sample_at(x).w - y[0]) <= 1e-9 * std::max(1.0, std::abs(y[0])));
    CHECK(std::abs(w.sample_at(x).dw - y[1]) <= 1e-9 * std::max(1.0, std::abs(y[1])));
  }
  const State2 mid = w.evaluate(0.12345);
  const auto y = oracle::second_order(q, {w.sample_at(0.123).w, w.sample_at(0.123).dw}, 0.123, 0.12345, 100);
  CHECK(std::abs(mid[0] - y[0]) < 1e-11);
}

TEST_CASE("preconditions") {
  CHECK_THROWS_AS(solve_weber(3.0, -8.0, 8.0, -3.0, 1.0), PreconditionError);
  CHECK_THROWS_AS(solve_weber(0.5, -8.0, 8.0, -3.0, 1.0), PreconditionError);
  CHECK_THROWS_AS(solve_weber(1.5, -7.0, 8.0, -3.0, 1.0), PreconditionError);
  CHECK_THROWS_AS(solve_weber(1.5, -8.0, 7.0, -3.0, 1.0), PreconditionError);
  CHECK_THROWS_AS(solve_weber(1.5, -8.0, 40.0, -3.0, 1.0), PreconditionError);
}

TEST_CASE("matching constant is 1 for the symmetric problem") {
  const Eigenfunction u1 = refined_eigenfunction(PotentialSpec::harmonic(), 1.0, 1, kCoarse, kFine);
  const WeberSolution w = solve_weber(u1.eigenvalue, -8.0, 8.0, u1);
  const MatchingReport m = compute_c(w, u1);
  CHECK(std::abs(m.c - 1.0) <= 1e-9);
  CHECK(m.holds());
}

TEST_CASE("matching for x^2 + t alpha") {
  const PotentialSpec p = PotentialSpec::plus(0.05, 0.0);
  const Eigenfunction u1 = refined_eigenfunction(p, 1.0, 1, kCoarse, kFine);
  CHECK(u1.eigenvalue > 1.0 + 10.0 * u1.eigenvalue_error);
  const WeberSolution w = solve_weber(u1.eigenvalue, -8.0, 8.0, u1);
  CHECK(all_applicable_pass(check_properties(w)));
  const MatchingReport m = compute_c(w, u1);
  CHECK(m.holds());
  CHECK(m.c > 1.0 + 1e-7);
  CHECK(m.sup_left <= 1e-7);
  CHECK(m.sup_right <= 1e-7);

  WeberOptions dense;
  dense.samples_per_unit = 2000.0;
  CHECK(std::abs(compute_c(solve_weber(u1.eigenvalue, -8.0, 8.0, u1, dense), u1).c - m.c) <= 1e-9);
  CHECK(std::abs(compute_c(solve_weber(u1.eigenvalue, -10.0, 8.0, u1), u1).c - m.c) <= 1e-9);

  const WeberSolution other = solve_weber(u1.eigenvalue, -8.0, 8.0, -3.0, 2.0 * u1.at(-3.0));
  CHECK_THROWS_AS(compute_c(other, u1), PreconditionError);
}

TEST_CASE("csv export") {
  const WeberSolution w = solve_weber(1.5, -8.0, 8.0, -3.0, 1.0);
  const CsvTable t = w.csv();
  CHECK(t.columns() == std::vector<std::string>{"x", "W", "dW"});
  CHECK(t.size() == w.samples.size());
  CHECK(t.size() == 16001);
}
