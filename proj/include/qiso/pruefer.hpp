#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qiso/csv.hpp"
#include "qiso/ode.hpp"
#include "qiso/potential.hpp"

namespace qiso {

/// Coefficient of u'' + Q u = 0.
///
/// constant: Q = value.  harmonic: Q = (lambda - x^2) / h^2.
/// potential: Q = (lambda - V(x)) / h^2 for the given PotentialSpec.
struct CoefficientQ {
  enum class Kind { constant, harmonic, potential };

  Kind kind = Kind::harmonic;
  double lambda = 1.0;
  double h = 1.0;
  double value = 0.0;
  PotentialSpec potential = PotentialSpec::harmonic();

  static CoefficientQ constant(double q);
  static CoefficientQ harmonic(double lambda, double h = 1.0);
  static CoefficientQ of(const PotentialSpec& p, double lambda, double h = 1.0);

  double operator()(double x) const;
  std::string describe() const;
};

struct PrueferSample {
  double x;
  double theta;
  double log_r;
};

/// Solution written as (u, u') = r (sin theta, cos theta).  theta is carried
/// continuously, never reduced mod pi.
struct PrueferTrace {
  double x0 = 0.0;
  double theta0 = 0.0;
  std::vector<PrueferSample> samples;

  /// Interior zeros of u (crossings of a positive multiple of pi).
  std::size_t node_count() const;
  double theta_end() const { return samples.back().theta; }

  /// u(x_i) / u(x0) = r_i sin(theta_i) / (r_0 sin(theta_0)).  Requires sin(theta0) != 0.
  std::vector<double> relative_solution() const;

  CsvTable csv() const;
};

struct PrueferOptions {
  double sample_step = 1e-3;
  OdeOptions ode{};
};

/// theta' = Q sin^2 theta + cos^2 theta, (log r)' = (1 - Q) sin theta cos theta,
/// from (x0, theta0, log r = 0) to x1, sampled every sample_step (x1 included).
PrueferTrace integrate_angle(const CoefficientQ& q, double x0, double theta0, double x1,
                             const PrueferOptions& options = {});

/// theta(x1) alone, without storing samples.
double end_angle(const CoefficientQ& q, double x0, double theta0, double x1,
                 const OdeOptions& ode = {});

struct ShootingOptions {
  double tol = 1e-11;  // bracket width on lambda, relative to max(1, lambda)
  std::optional<double> lambda_lo;
  std::optional<double> lambda_hi;
  OdeOptions ode{};
};

struct ShootingResult {
  double lambda = 0.0;
  double error_estimate = 0.0;  // bracket plus integrator sensitivity
  std::size_t evaluations = 0;
};

/// Dirichlet eigenvalue j (>= 1) of -h^2 u'' + V u on [-L, L]: the lambda for
/// which theta, started at 0 on -L, reaches j pi at +L.  theta(L) increases with
/// lambda, so the root is bisected.  Without an explicit window the upper end
/// is expanded from the harmonic estimate.
double shoot_eigenvalue(const PotentialSpec& p, double h, std::size_t j, double L,
                        const ShootingOptions& options = {});

/// Shooting eigenvalue plus an error estimate from a rerun at 100x looser
/// integrator tolerance.
ShootingResult shoot(const PotentialSpec& p, double h, std::size_t j, double L,
                     const ShootingOptions& options = {});

inline constexpr double kComparisonTolerance = 1e-9;

struct AngleComparison {
  PrueferTrace big;
  PrueferTrace small;
  double min_margin = 0.0;  // min over samples of theta_big - theta_small
  double worst_x = 0.0;
  bool holds = false;  // theta_small <= theta_big + 1e-9 everywhere
};

/// Integrates both angles from the same (x0, theta0).  The coefficient ordering
/// qSmall <= qBig is checked at every sample first.
AngleComparison compare_angles(const CoefficientQ& q_big, const CoefficientQ& q_small, double x0,
                               double theta0, double x1, const PrueferOptions& options = {});

struct SolutionComparison {
  double a = 0.0, b = 0.0;
  std::vector<double> x;
  std::vector<double> u_big;
  std::vector<double> u_small;
  double min_margin = 0.0;  // min over [a, b] of u_small - u_big
  double max_margin = 0.0;
  double worst_x = 0.0;
  bool holds = false;  // u_small >= u_big - 1e-9 on [a, b]

  CsvTable csv() const;
};

/// Rebuilds both solutions from their traces (W'/W = cot theta) with the common
/// value u_start at the shared start point and compares them on [a, b].  Both
/// angles must stay in (0, pi/2] there.
SolutionComparison compare_solutions(double u_start, const PrueferTrace& big,
                                     const PrueferTrace& small, double a, double b);

}  // namespace qiso
