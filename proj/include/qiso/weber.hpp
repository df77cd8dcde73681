#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qiso/csv.hpp"
#include "qiso/eigensolve.hpp"
#include "qiso/ode.hpp"

namespace qiso {

struct WeberOptions {
  double samples_per_unit = 1000.0;  // samples sit on x = m / samples_per_unit
  OdeOptions ode{1e-13, 1e-13, 1e-3, 200000};
  double boundary_band = 1e-9;  // |lambda - 1| below this is treated as lambda = 1
  double boundary_reliable_right = 4.0;
};

struct WeberSample {
  double x;
  double w;
  double dw;
  double log_abs_w;
};

/// Solution of W'' = (x^2 - lambda) W decaying as x -> -infinity, seeded from
/// (sqrt(2)|x|)^p e^{-x^2/2}, p = (lambda - 1)/2, on the left end.
struct WeberSolution {
  double lambda1 = 0.0;
  double x_left = 0.0;
  double x_right = 0.0;
  double samples_per_unit = 0.0;
  OdeOptions ode{};
  std::vector<WeberSample> samples;

  bool boundary_case = false;   // lambda1 == 1: W is the Gaussian itself
  double reliable_right = 0.0;  // rightmost x where samples are trusted

  std::vector<double> critical_points;  // zeros of W'
  std::vector<double> zeros;            // zeros of W
  double a = 0.0;                       // the critical point is -a
  std::optional<double> z0;             // first zero beyond 3
  double max_residual = 0.0;            // relative residual of W'' = (x^2 - lambda) W
  double max_residual_x = 0.0;

  double decay_slope = 0.0;   // slope of log W + x^2/2 against log|x| near x_left
  double growth_slope = 0.0;  // slope of log|W| - x^2/2 against log x near x_right
  double growth_power = 0.0;  // free fit log|W| ~ c + power log x + rate x^2
  double growth_rate = 0.0;

  /// Sample lookup at x = m / samples_per_unit.  Throws if x is not a sample.
  const WeberSample& sample_at(double x) const;
  bool has_sample(double x) const;
  /// (W, W') at an arbitrary x, integrated from the nearest sample on the left.
  State2 evaluate(double x) const;

  CsvTable csv() const;
};

/// Integrates rightward from x_left and scales so that W(norm_x) = norm_value.
/// 1 <= lambda1 < 3 (lambda1 within boundary_band of 1 is the Gaussian case).
WeberSolution solve_weber(double lambda1, double x_left, double x_right, double norm_x,
                          double norm_value, const WeberOptions& options = {});

/// Same with W(-3) = u1(-3).
WeberSolution solve_weber(double lambda1, double x_left, double x_right, const Eigenfunction& u1,
                          const WeberOptions& options = {});

struct PropertyCheck {
  std::string name;
  bool applicable = true;
  bool passed = false;
  double value = 0.0;  // measured quantity the check is about
  std::string detail;
};

struct WeberPropertyReport {
  std::vector<PropertyCheck> checks;
  bool all_passed() const;
};

/// (i) W > 0 on [x_left, 3]; (ii) one critical point, W' > 0 left of it and
/// < 0 right of it; (iii) one zero z0 > 3, W negative and decreasing beyond it;
/// (iv) decay-side slope within 5% of (lambda - 1)/2; (v) growth-side slope
/// within 5% of -(lambda + 1)/2.  Also reports the ODE residual.
WeberPropertyReport check_properties(const WeberSolution& w);

struct MatchingReport {
  double c = 0.0;
  double sup_left = 0.0;  // sup |u1 - W| on [x_left, -3]
  double sup_left_x = 0.0;
  double sup_right = 0.0;  // sup |u1(x) - c W(-x)| on [-2, 4]
  double sup_right_x = 0.0;
  double du1_at_crit = 0.0;   // u1'(-a)
  double cdw_reflected = 0.0;  // -c W'(a)
  double derivative_mismatch = 0.0;
  double tolerance = 1e-7;

  bool holds() const;
};

/// c = u1(0) / W(0) together with u1 = W left of -3, u1 = c W(-x) on [-2, 4]
/// and u1'(-a) = -c W'(a).
MatchingReport compute_c(const WeberSolution& w, const Eigenfunction& u1);

}  // namespace qiso
