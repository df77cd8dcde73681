#include <cmath>
#include <numbers>

#include "doctest.h"
#include "qiso/error.hpp"
#include "qiso/traces.hpp"

using namespace qiso;

namespace {
const Grid kCoarse{8.0, 7999};
const Grid kFine{8.0, 15999};
const PotentialSpec kPlus = PotentialSpec::plus(0.05, 0.05);
}  // namespace

TEST_CASE("test functions") {
  const TestFunction b = TestFunction::bump(0.5, 6.0);
  CHECK(b(3.25) == doctest::Approx(1.0));
  CHECK(b(0.5) == 0.0);
  CHECK(b(6.0) == 0.0);
  CHECK(b(10.0) == 0.0);
  for (double e = 0.0; e < 7.0; e += 0.01) CHECK(b(e) >= 0.0);
  CHECK(TestFunction::exponential(2.0)(1.0) == doctest::Approx(std::exp(-2.0)));
  CHECK(TestFunction::zero()(1.0) == 0.0);
}

TEST_CASE("harmonic spectral density is a geometric series") {
  for (double h : {1.0, 0.5, 0.25}) {
    const SpectralDensity d = spectral_density(PotentialSpec::harmonic(), h, TestFunction::exponential());
    CHECK(std::abs(d.value - 1.0 / (2.0 * std::sinh(h))) <= 1e-10);
    CHECK(d.tail_bound <= 1e-14);
  }
  const SpectralDensity d1 = spectral_density(PotentialSpec::harmonic(), 1.0, TestFunction::exponential());
  CHECK(std::abs(d1.value - 0.42545906411966) < 1e-12);
  CHECK(spectral_density(kPlus, 1.0, TestFunction::zero()).value == 0.0);
  CHECK(spectral_density(kPlus, 1.0, TestFunction::bump(0.5, 6.0)).value > 0.0);
}

TEST_CASE("density decreases as the potential grows") {
  PotentialSpec a = kPlus, b = kPlus;
  b.t = 0.1;
  CHECK(spectral_density(a, 0.5, TestFunction::exponential()).value >
        spectral_density(b, 0.5, TestFunction::exponential()).value);
}

TEST_CASE("Weyl term") {
  CHECK(std::abs(weyl_term(PotentialSpec::harmonic(), TestFunction::exponential()) - std::numbers::pi) <= 1e-10);
  CHECK(std::abs(weyl_term(PotentialSpec::harmonic(), TestFunction::exponential(2.0)) - std::numbers::pi / 2) <= 1e-10);
  CHECK(weyl_term(kPlus, TestFunction::zero()) == 0.0);
  const double a = weyl_term(kPlus, TestFunction::exponential());
  const double b = weyl_term(kPlus.partner(), TestFunction::exponential());
  CHECK(std::abs(a - b) <= 2e-10);
  CHECK(a < std::numbers::pi);
}

TEST_CASE("h-expansion fit for the harmonic oscillator") {
  const WeylConsistency w = weyl_consistency(PotentialSpec::harmonic(), TestFunction::exponential());
  CHECK(std::abs(w.a0 - std::numbers::pi) <= 1e-10);
  CHECK(std::abs(w.a0_fit - std::numbers::pi) <= 1e-5 * std::numbers::pi);
  CHECK(std::abs(w.a1 + std::numbers::pi / 6) <= 0.05 * std::numbers::pi / 6);
  CHECK(w.h.size() == kWeylGrid.size());
  const std::vector<double> few{0.1, 0.2, 0.3};
  CHECK_THROWS_AS(weyl_consistency(PotentialSpec::harmonic(), TestFunction::exponential(), few), PreconditionError);
  const std::vector<double> wide{0.1, 0.2, 0.3, 0.4, 0.5, 0.9};
  CHECK_THROWS_AS(weyl_consistency(PotentialSpec::harmonic(), TestFunction::exponential(), wide), PreconditionError);
}

TEST_CASE("zero test function gives zero throughout the fit") {
  const WeylConsistency w = weyl_consistency(kPlus, TestFunction::zero());
  for (double v : w.scaled) CHECK(v == 0.0);
  CHECK(w.a0 == 0.0);
}

TEST_CASE("isospectral distance") {
  const GapEntry e0 = isospectral_distance(1.0, 20.0, PotentialSpec::plus(0.0, 0.05),
                                           PotentialSpec::minus(0.0, 0.05), kCoarse, kFine);
  CHECK(e0.D <= 1e-11);
  CHECK(e0.count == 10);

  const GapEntry e1 = isospectral_distance(1.0, 10.0, kPlus, kPlus.partner(), kCoarse, kFine);
  const GapEntry swapped = isospectral_distance(1.0, 10.0, kPlus.partner(), kPlus, kCoarse, kFine);
  CHECK(e1.D > 100.0 * std::max(1e-12, e1.error));
  CHECK(e1.D == swapped.D);
  const GapEntry e4 = isospectral_distance(0.25, 10.0, kPlus, kPlus.partner(), kCoarse, kFine);
  CHECK(e4.D < e1.D);
  CHECK(e1.differences.size() == e1.count);
}

TEST_CASE("gap fit recovers an exact exponential") {
  std::vector<double> h, D;
  for (double x : log_spaced(1.0, 0.25, 8)) {
    h.push_back(x);
    D.push_back(2.0 * std::exp(-10.0 / x));
  }
  const GapFit f = fit_gap_decay(h, D);
  CHECK(f.C == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(f.c == doctest::Approx(10.0).epsilon(1e-10));
  CHECK(std::abs(f.r_squared - 1.0) <= 1e-10);
  CHECK_FALSE(f.poor);
  CHECK(decays_faster_than(h, D, 8));
}

TEST_CASE("gap fit flags a power law") {
  std::vector<double> h, D;
  for (double x : log_spaced(1.0, 0.25, 8)) {
    h.push_back(x);
    D.push_back(std::pow(x, 4));
  }
  const GapFit f = fit_gap_decay(h, D);
  CHECK(f.poor);
  CHECK(f.prefers_power_law);
  CHECK(f.power_exponent == doctest::Approx(4.0));
  CHECK_FALSE(decays_faster_than(h, D, 4));
  CHECK(decays_faster_than(h, D, 2));
  const std::vector<double> short_h{1.0, 0.5}, short_d{1.0, 0.1};
  CHECK_THROWS_AS(fit_gap_decay(short_h, short_d), PreconditionError);
}

TEST_CASE("log spacing") {
  const auto v = log_spaced(1.0, 0.25, 12);
  REQUIRE(v.size() == 12);
  CHECK(v.front() == 1.0);
  CHECK(v.back() == 0.25);
  for (std::size_t i = 1; i < v.size(); ++i) CHECK(v[i] / v[i - 1] == doctest::Approx(std::pow(0.25, 1.0 / 11)));
}

TEST_CASE("reflection sweep stays below the noise floor") {
  const auto hs = log_spaced(1.0, 0.5, 4);
  const GapCurve c = gap_sweep(PotentialSpec::plus(0.0, 0.05), PotentialSpec::minus(0.0, 0.05), hs, 1.25, kCoarse, kFine);
  CHECK(c.usable_count() == 0);
  CHECK_FALSE(c.fit.has_value());
  CHECK(c.noise_floor >= 1e-12);
  CHECK(c.csv().size() == 4);
}
