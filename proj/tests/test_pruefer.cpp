#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "qiso/eigensolve.hpp"
#include "qiso/error.hpp"
#include "qiso/pruefer.hpp"

using namespace qiso;

TEST_CASE("coefficient ordering") {
  const PotentialSpec p = PotentialSpec::plus(0.05, 0.0);
  const CoefficientQ big = CoefficientQ::harmonic(1.2);
  const CoefficientQ small = CoefficientQ::of(p, 1.2);
  for (double x = -5.0; x <= 5.0; x += 0.01) CHECK(small(x) <= big(x));
  CHECK(small(-2.5) == doctest::Approx(1.2 - 6.25 - 0.05));
  CHECK(CoefficientQ::constant(2.0)(17.0) == 2.0);
}

TEST_CASE("unit coefficient advances the angle at unit speed") {
  const PrueferTrace tr = integrate_angle(CoefficientQ::constant(1.0), -1.0, 0.3, 2.0);
  CHECK(tr.samples.front().x == -1.0);
  CHECK(tr.samples.back().x == 2.0);
  for (const auto& s : tr.samples) CHECK(std::abs(s.theta - (0.3 + s.x + 1.0)) < 1e-11);
  for (const auto& s : tr.samples) CHECK(std::abs(s.log_r) < 1e-11);
}

TEST_CASE("zero coefficient: tan theta grows linearly") {
  const double theta0 = 0.4;
  const PrueferTrace tr = integrate_angle(CoefficientQ::constant(0.0), 0.0, theta0, 3.0);
  for (const auto& s : tr.samples) {
    const double exact = std::atan(std::tan(theta0) + s.x);
    CHECK(std::abs(s.theta - exact) < 1e-11);
    CHECK(s.theta < std::numbers::pi / 2);
  }
  const auto q0 = [](double) { return 0.0; };
  CHECK(std::abs(tr.theta_end() - oracle::angle(q0, theta0, 0.0, 3.0, 30000)) < 1e-11);
}

TEST_CASE("angle matches a fixed-step integrator for a varying coefficient") {
  const CoefficientQ q = CoefficientQ::of(PotentialSpec::plus(0.05, 0.05), 1.7, 0.8);
  const double a = end_angle(q, -4.0, 0.2, 4.0);
  const double b = oracle::angle([&q](double x) { return q(x); }, 0.2, -4.0, 4.0, 80000);
  CHECK(std::abs(a - b) < 1e-9);
}

TEST_CASE("integration is deterministic") {
  const CoefficientQ q = CoefficientQ::harmonic(2.5);
  const PrueferTrace a = integrate_angle(q, -3.0, 0.5, 3.0);
  const PrueferTrace b = integrate_angle(q, -3.0, 0.5, 3.0);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) CHECK(a.samples[i].theta == b.samples[i].theta);
  CHECK_THROWS_AS(integrate_angle(q, 1.0, 0.5, 0.0), PreconditionError);
}

TEST_CASE("node count and continuity") {
  const PrueferTrace tr = integrate_angle(CoefficientQ::harmonic(4.0), -8.0, 0.0, 8.0);
  CHECK(tr.node_count() == 2);
  CHECK(tr.theta_end() > 2.0 * std::numbers::pi);
  CHECK(tr.theta_end() < 3.0 * std::numbers::pi);
  for (std::size_t i = 1; i < tr.samples.size(); ++i) {
    CHECK(std::abs(tr.samples[i].theta - tr.samples[i - 1].theta) < 0.1);
  }
}

TEST_CASE("shooting eigenvalues for the harmonic oscillator") {
  const PotentialSpec ho = PotentialSpec::harmonic();
  CHECK(std::abs(shoot_eigenvalue(ho, 1.0, 1, 8.0) - 1.0) < 1e-8);
  CHECK(std::abs(shoot_eigenvalue(ho, 1.0, 3, 8.0) - 5.0) < 1e-8);
  CHECK(std::abs(shoot_eigenvalue(ho, 0.5, 2, 8.0) - 1.5) < 1e-8);
  CHECK_THROWS_AS(shoot_eigenvalue(ho, 1.0, 0, 8.0), PreconditionError);
  ShootingOptions narrow;
  narrow.lambda_lo = 2.0;
  narrow.lambda_hi = 2.5;
  CHECK_THROWS_AS(shoot_eigenvalue(ho, 1.0, 1, 8.0, narrow), ConvergenceError);
}

TEST_CASE("shooting agrees with the matrix solver for V+") {
  const PotentialSpec p = PotentialSpec::plus(0.05, 0.05);
  const Spectrum s = refine(p, 1.0, 6.0, Grid{8.0, 7999}, Grid{8.0, 15999});
  const ShootingResult r = shoot(p, 1.0, 1, 8.0);
  CHECK(std::abs(r.lambda - s.eigenvalues[0]) <= 10.0 * (r.error_estimate + s.error_estimate[0]));
}

TEST_CASE("angle comparison") {
  const CoefficientQ q = CoefficientQ::harmonic(1.3);
  const AngleComparison same = compare_angles(q, q, -3.0, 0.7, 0.0);
  CHECK(same.holds);
  CHECK(same.min_margin == 0.0);

  const AngleComparison c = compare_angles(CoefficientQ::constant(1.0), CoefficientQ::constant(0.0), 0.0,
                                           std::numbers::pi / 4, 1.0);
  CHECK(c.holds);
  for (std::size_t i = 1; i < c.big.samples.size(); ++i) {
    CHECK(c.big.samples[i].theta > c.small.samples[i].theta);
  }
  const auto q1 = [](double) { return 1.0; };
  const auto q0 = [](double) { return 0.0; };
  CHECK(std::abs(c.big.theta_end() - oracle::angle(q1, std::numbers::pi / 4, 0.0, 1.0, 10000)) < 1e-11);
  CHECK(std::abs(c.small.theta_end() - oracle::angle(q0, std::numbers::pi / 4, 0.0, 1.0, 10000)) < 1e-11);

  CHECK_THROWS_AS(compare_angles(CoefficientQ::constant(0.0), CoefficientQ::constant(1.0), 0.0, 0.5, 1.0),
                  PreconditionError);
}

TEST_CASE("solution comparison rebuilds both solutions") {
  const double lam = 1.3;
  const PotentialSpec p = PotentialSpec::plus(0.05, 0.0);
  const double w0 = 0.2, dw0 = 0.3;
  const double theta0 = std::atan2(w0, dw0);
  const AngleComparison ang = compare_angles(CoefficientQ::harmonic(lam), CoefficientQ::of(p, lam), -3.0, theta0, -0.5);
  const SolutionComparison sol = compare_solutions(w0, ang.big, ang.small, -3.0, -0.5);
  CHECK(sol.holds);
  CHECK(sol.max_margin > 0.0);

  const auto qa = [lam](double x) { return lam - x * x; };
  const auto qb = [&p, lam](double x) { return lam - potential_eval(p, x); };
  for (std::size_t i = 0; i < sol.x.size(); i += 250) {
    const double x = sol.x[i];
    if (x == -3.0) continue;
    const auto ya = oracle::second_order(qa, {w0, dw0}, -3.0, x, 20000);
    const auto yb = oracle::second_order(qb, {w0, dw0}, -3.0, x, 20000);
    CHECK(std::abs(sol.u_big[i] - ya[0]) < 1e-8);
    CHECK(std::abs(sol.u_small[i] - yb[0]) < 1e-8);
  }
}

TEST_CASE("identical equations give identical solutions") {
  const CoefficientQ q = CoefficientQ::harmonic(1.0);
  const AngleComparison ang = compare_angles(q, q, -3.0, 0.3, -0.5);
  const SolutionComparison sol = compare_solutions(0.1, ang.big, ang.small, -3.0, -0.5);
  CHECK(sol.holds);
  CHECK(std::abs(sol.min_margin) < 1e-12);
  CHECK(std::abs(sol.max_margin) < 1e-12);
}

TEST_CASE("solution comparison refuses angles beyond pi/2") {
  const CoefficientQ q = CoefficientQ::constant(1.0);
  const AngleComparison ang = compare_angles(q, q, 0.0, 1.0, 2.0);
  CHECK_THROWS_AS(compare_solutions(1.0, ang.big, ang.small, 0.0, 2.0), PreconditionError);
}
