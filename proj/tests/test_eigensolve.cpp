#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "qiso/eigensolve.hpp"
#include "qiso/error.hpp"

using namespace qiso;

namespace {
const Grid kCoarse{8.0, 7999};
const Grid kFine{8.0, 15999};
const PotentialSpec kHarmonic = PotentialSpec::harmonic();
}  // namespace

TEST_CASE("grid is symmetric and nests under refinement") {
  for (const Grid& g : {kCoarse, kFine, Grid{3.0, 10}}) {
    for (std::size_t i = 0; i < g.n; ++i) CHECK(g.x(g.n - 1 - i) == -g.x(i));
  }
  CHECK(kFine.is_refinement_of(kCoarse));
  CHECK_FALSE(kCoarse.is_refinement_of(kCoarse));
  for (std::size_t i = 0; i < kCoarse.n; i += 97) CHECK(kFine.x(2 * i + 1) == kCoarse.x(i));
  CHECK(kCoarse.index_of(-3.0).has_value());
  CHECK(kCoarse.x(*kCoarse.index_of(-3.0)) == -3.0);
  CHECK_THROWS_AS((Grid{8.0, 2}.validate()), PreconditionError);
}

TEST_CASE("discretization entries") {
  const Grid g{8.0, 4000};
  const TridiagonalOperator T = discretize(kHarmonic, 1.0, g);
  const double k = 1.0 / (g.dx() * g.dx());
  CHECK(T.kinetic() == doctest::Approx(k));
  CHECK(T.offdiag() == -T.kinetic());
  for (std::size_t i = 0; i < g.n; i += 13) {
    CHECK(T.diag(i) == doctest::Approx(2 * k + g.x(i) * g.x(i)));
    CHECK(T.diag(i) >= 2 * T.kinetic());
  }
  const PotentialSpec vp = PotentialSpec::plus(0.0, 0.05);
  const TridiagonalOperator A = discretize(vp, 1.0, g);
  const TridiagonalOperator B = discretize(vp.partner(), 1.0, g);
  for (std::size_t i = 0; i < g.n; ++i) CHECK(A.diag(i) == B.diag(g.n - 1 - i));
}

TEST_CASE("discretize rejects a short interval") {
  CHECK_THROWS_AS(discretize(kHarmonic, 1.0, Grid{3.0, 999}, 5.0), PreconditionError);
  CHECK_NOTHROW(discretize(kHarmonic, 1.0, Grid{8.0, 999}, 20.0));
  CHECK_THROWS_AS(discretize(kHarmonic, 0.0, Grid{8.0, 999}), PreconditionError);
}

TEST_CASE("count below for the harmonic operator") {
  const TridiagonalOperator T1 = discretize(kHarmonic, 1.0, kFine);
  const TridiagonalOperator T5 = discretize(kHarmonic, 0.5, kFine);
  CHECK(count_below(T1, 0.0) == 0);
  CHECK(count_below(T1, 6.0) == 3);
  CHECK(count_below(T5, 2.0) == 2);
  CHECK(count_below(T1.diagonal(), T1.off_diagonal(), 6.0) == 3);
}

TEST_CASE("count below agrees with dense eigenvalues on random small matrices") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + static_cast<std::size_t>(trial % 6);
    std::vector<double> d(n), e(n - 1);
    for (auto& v : d) v = u(rng);
    for (auto& v : e) v = u(rng);
    const auto ev = oracle::dense_eigenvalues(d, e);
    for (int probe = 0; probe < 10; ++probe) {
      const double lam = u(rng) * 2.0;
      std::size_t expect = 0;
      bool near = false;
      for (double x : ev) {
        expect += x < lam;
        near |= std::abs(x - lam) < 1e-9;
      }
      if (!near) CHECK(count_below(d, e, lam) == expect);
    }
  }
}

TEST_CASE("Riccati count agrees with dense eigenvalues on a small grid") {
  const Grid g{4.0, 8};
  const PotentialSpec p = PotentialSpec::plus(0.5, 0.3);
  const TridiagonalOperator T = discretize(p, 0.7, g);
  const auto ev = oracle::dense_eigenvalues(T.diagonal(), T.off_diagonal());
  for (std::size_t k = 0; k < ev.size(); ++k) {
    CHECK(count_below(T, ev[k] - 1e-9) == k);
    CHECK(count_below(T, ev[k] + 1e-9) == k + 1);
  }
  const Spectrum s = eigenvalues_below(T, ev.back() + 1.0, 1e-13);
  REQUIRE(s.size() == ev.size());
  for (std::size_t k = 0; k < ev.size(); ++k) CHECK(s.eigenvalues[k] == doctest::Approx(ev[k]).epsilon(1e-12));
}

TEST_CASE("unrefined harmonic spectrum") {
  const Spectrum s = eigenvalues_below(discretize(kHarmonic, 1.0, kFine), 10.0, default_tolerance(10.0));
  REQUIRE(s.size() == 5);
  for (std::size_t j = 0; j < 5; ++j) CHECK(std::abs(s.eigenvalues[j] - (2.0 * j + 1.0)) < 1e-5);
  const Spectrum t = eigenvalues_below(discretize(kHarmonic, 0.1, kFine), 1.0, default_tolerance(1.0));
  REQUIRE(t.size() == 5);
  for (std::size_t j = 0; j < 5; ++j) CHECK(std::abs(t.eigenvalues[j] - (2.0 * j + 1.0) * 0.1) < 1e-5);
}

TEST_CASE("window cap") {
  CHECK_THROWS_AS(eigenvalues_below(discretize(kHarmonic, 0.1, kCoarse, 20.0), 20.0, 1e-12, 50), PreconditionError);
}

TEST_CASE("refinement") {
  const Spectrum s = refine(kHarmonic, 1.0, 10.0, kCoarse, kFine);
  REQUIRE(s.size() == 5);
  CHECK(std::abs(s.eigenvalues[0] - 1.0) < 1e-10);
  for (double e : s.error_estimate) CHECK(e >= 0.0);
  CHECK_THROWS_AS(refine(kHarmonic, 1.0, 10.0, kFine, kFine), PreconditionError);

  const Spectrum v = refine(PotentialSpec::plus(0.05, 0.05), 1.0, 10.0, kCoarse, kFine);
  REQUIRE(v.size() >= 1);
  CHECK(v.eigenvalues[0] > 1.0);
  CHECK(v.eigenvalues[0] < 3.0);
  for (std::size_t j = 1; j < v.size(); ++j) CHECK(v.eigenvalues[j] > v.eigenvalues[j - 1]);
}

TEST_CASE("eigenvectors") {
  const TridiagonalOperator T = discretize(kHarmonic, 1.0, kFine);
  const double l1 = eigenvalue(T, 1, 0.0);
  const auto u = eigenvector(T, l1);
  const std::size_t mid = kFine.n / 2;
  CHECK(kFine.x(mid) == 0.0);
  CHECK(std::abs(u[mid] * u[mid] - 1.0 / std::sqrt(std::numbers::pi)) < 1e-6);
  for (double v : u) CHECK(v >= 0.0);
  double norm = 0.0;
  for (double v : u) norm += v * v;
  CHECK(norm * kFine.dx() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(relative_residual(T, u, l1) <= 1e-10 * T.norm_inf());

  const auto u2 = eigenvector(T, eigenvalue(T, 2, 0.0));
  CHECK(std::abs(u2[mid]) < 1e-8);
  CHECK_THROWS_AS(eigenvector(T, 2.0), ConvergenceError);
}

TEST_CASE("refined eigenfunction matches the Gaussian") {
  const Eigenfunction u = refined_eigenfunction(kHarmonic, 1.0, 1, kCoarse, kFine);
  double worst = 0.0;
  for (std::size_t i = 0; i < kCoarse.n; i += 7) {
    worst = std::max(worst, std::abs(u.values[i] - oracle::gaussian_ground_state(kCoarse.x(i))));
  }
  CHECK(worst < 1e-9);
  CHECK(u.at(-8.0) == 0.0);
  CHECK(u.at(0.0) == doctest::Approx(oracle::gaussian_ground_state(0.0)).epsilon(1e-9));
  CHECK(u.interpolate(0.1234) == doctest::Approx(oracle::gaussian_ground_state(0.1234)).epsilon(1e-9));
  CHECK(u.derivative(-1.0) == doctest::Approx(std::exp(-0.5) * std::pow(std::numbers::pi, -0.25)).epsilon(1e-8));
  CHECK_THROWS(u.at(0.00037));
}

TEST_CASE("spectrum json") {
  const Spectrum s = refine(kHarmonic, 1.0, 4.0, kCoarse, kFine);
  const nlohmann::json j = to_json(s);
  CHECK(j.at("eigenvalues").size() == 2);
  CHECK(j.at("h") == 1.0);
}
