#pragma once

#include <functional>
#include <span>
#include <vector>

namespace qiso {

struct LinearFit {
  std::vector<double> coefficients;
  std::vector<double> standard_errors;
  double rss = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;

  double predict(std::span<const double> basis_values) const;
};

using Basis = std::vector<std::function<double(double)>>;

/// Ordinary least squares y ~ sum_k c_k phi_k(x) (column-pivoted QR).
/// Standard errors use the residual variance rss / (n - p); they are zero when n == p.
LinearFit least_squares(std::span<const double> x, std::span<const double> y, const Basis& basis);

/// y ~ c0 + c1 x.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

/// y ~ c0 + c1 x + ... + c_d x^d.
LinearFit fit_polynomial(std::span<const double> x, std::span<const double> y, int degree);

}  // namespace qiso
