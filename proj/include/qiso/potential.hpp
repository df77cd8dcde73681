#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace qiso {

/// Compactly supported smooth bump a * exp(1 - 1/(1 - u^2)), u = (x - center) / half_width.
///
/// Vanishes with all derivatives at center +- half_width and peaks at the
/// center with value `amplitude`.
struct BumpSpec {
  double center = 0.0;
  double half_width = 1.0;
  double amplitude = 1.0;

  double lower() const { return center - half_width; }
  double upper() const { return center + half_width; }

  friend bool operator==(const BumpSpec&, const BumpSpec&) = default;
};

double bump_eval(const BumpSpec& b, double x);
double bump_derivative(const BumpSpec& b, double x);

/// Largest |b'(x)| over the support, closed form in the mollifier variable.
double bump_max_abs_derivative(const BumpSpec& b);

/// V(x) = x^2 + t*alpha(x) + eps*beta(+-x).
///
/// reflect_beta selects the second member of the pair: false gives V+ with
/// beta(x), true gives V- with beta(-x).  The alpha bump is never reflected.
struct PotentialSpec {
  double t = 0.05;
  double eps = 0.05;
  bool reflect_beta = false;
  BumpSpec alpha{-2.5, 0.5, 1.0};
  BumpSpec beta{3.5, 0.5, 1.0};

  static PotentialSpec harmonic();
  static PotentialSpec plus(double t, double eps);
  static PotentialSpec minus(double t, double eps);

  /// Same bumps and amplitudes with reflect_beta toggled.
  PotentialSpec partner() const;

  friend bool operator==(const PotentialSpec&, const PotentialSpec&) = default;
};

double potential_eval(const PotentialSpec& p, double x);
double potential_derivative(const PotentialSpec& p, double x);

/// Sampled perturbation b(+-x) of one bump, convenient for perturbation work.
double bump_at(const BumpSpec& b, double x, bool reflected);

struct ValidationIssue {
  std::string constraint;
  double where = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  double alpha_slope_bound = 0.0;  // t * max|alpha'|, must stay below 4
  double beta_slope_bound = 0.0;   // eps * max|beta'|, must stay below 6
  double sampling_step = 0.0;

  bool passed() const { return issues.empty(); }
  std::string summary() const;
};

/// Checks support placement, sign constraints and the absence of critical
/// points other than x = 0 (dense sampling plus the sufficient slope bound).
ValidationReport validate(const PotentialSpec& p);

void to_json(nlohmann::json& j, const BumpSpec& b);
void from_json(const nlohmann::json& j, BumpSpec& b);
void to_json(nlohmann::json& j, const PotentialSpec& p);
void from_json(const nlohmann::json& j, PotentialSpec& p);

}  // namespace qiso
