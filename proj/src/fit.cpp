#include "qiso/fit.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "qiso/error.hpp"

namespace qiso {

double LinearFit::predict(std::span<const double> basis_values) const {
  double s = 0.0;
  for (std::size_t k = 0; k < coefficients.size(); ++k) s += coefficients[k] * basis_values[k];
  return s;
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y, const Basis& basis) {
  const auto n = static_cast<Eigen::Index>(x.size());
  const auto p = static_cast<Eigen::Index>(basis.size());
  if (x.size() != y.size()) throw PreconditionError("fit needs as many x as y values");
  if (p == 0 || n < p) throw PreconditionError("fit needs at least as many points as parameters");

  Eigen::MatrixXd A(n, p);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < p; ++k) A(i, k) = basis[static_cast<std::size_t>(k)](x[static_cast<std::size_t>(i)]);
    b(i) = y[static_cast<std::size_t>(i)];
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  if (qr.rank() < p) throw PreconditionError("fit design matrix is rank deficient");
  const Eigen::VectorXd c = qr.solve(b);
  const Eigen::VectorXd r = b - A * c;

  LinearFit f;
  f.points = x.size();
  f.coefficients.assign(c.data(), c.data() + p);
  f.rss = r.squaredNorm();
  const double mean = b.mean();
  const double tss = (b.array() - mean).square().sum();
  f.r_squared = tss > 0.0 ? 1.0 - f.rss / tss : 1.0;

  f.standard_errors.assign(static_cast<std::size_t>(p), 0.0);
  if (n > p) {
    const double sigma2 = f.rss / static_cast<double>(n - p);
    const Eigen::MatrixXd cov = (A.transpose() * A).inverse() * sigma2;
    for (Eigen::Index k = 0; k < p; ++k) f.standard_errors[static_cast<std::size_t>(k)] = std::sqrt(std::max(0.0, cov(k, k)));
  }
  return f;
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  return fit_polynomial(x, y, 1);
}

LinearFit fit_polynomial(std::span<const double> x, std::span<const double> y, int degree) {
  Basis basis;
  for (int d = 0; d <= degree; ++d) basis.push_back([d](double v) { return std::pow(v, d); });
  return least_squares(x, y, basis);
}

}  // namespace qiso
