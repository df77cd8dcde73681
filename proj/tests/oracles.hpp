#pragma once

// Independent reference computations for the unit and acceptance tests.
// Nothing here calls into the library's solvers.

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

/// All eigenvalues of a small symmetric tridiagonal matrix from a dense solve.
inline std::vector<double> dense_eigenvalues(const std::vector<double>& diag, const std::vector<double>& off) {
  const auto n = static_cast<Eigen::Index>(diag.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    A(i, i) = diag[static_cast<std::size_t>(i)];
    if (i + 1 < n) A(i, i + 1) = A(i + 1, i) = off[static_cast<std::size_t>(i)];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

using State = std::array<double, 2>;
using Rhs = std::function<State(double, const State&)>;

/// Classical fixed-step RK4 from x0 to x1.
inline State rk4(const Rhs& f, State y, double x0, double x1, std::size_t steps) {
  const double dx = (x1 - x0) / static_cast<double>(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    const double x = x0 + static_cast<double>(k) * dx;
    auto add = [](const State& a, const State& b, double s) { return State{a[0] + s * b[0], a[1] + s * b[1]}; };
    const State k1 = f(x, y);
    const State k2 = f(x + dx / 2, add(y, k1, dx / 2));
    const State k3 = f(x + dx / 2, add(y, k2, dx / 2));
    const State k4 = f(x + dx, add(y, k3, dx));
    for (int i = 0; i < 2; ++i) y[i] += dx / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  }
  return y;
}

/// (u, u') for u'' + q(x) u = 0.
inline State second_order(const std::function<double(double)>& q, State y, double x0, double x1,
                          std::size_t steps) {
  return rk4([&q](double x, const State& s) { return State{s[1], -q(x) * s[0]}; }, y, x0, x1, steps);
}

/// Pruefer angle theta' = q sin^2 + cos^2 (second slot unused).
inline double angle(const std::function<double(double)>& q, double theta0, double x0, double x1,
                    std::size_t steps) {
  auto f = [&q](double x, const State& s) {
    const double sn = std::sin(s[0]), cs = std::cos(s[0]);
    return State{q(x) * sn * sn + cs * cs, 0.0};
  };
  return rk4(f, {theta0, 0.0}, x0, x1, steps)[0];
}

/// Composite Simpson rule with an even number of panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, std::size_t panels) {
  if (panels % 2) ++panels;
  const double dx = (b - a) / static_cast<double>(panels);
  double s = f(a) + f(b);
  for (std::size_t i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + static_cast<double>(i) * dx);
  return s * dx / 3.0;
}

/// L2-normalized ground state of -u'' + x^2 u.
inline double gaussian_ground_state(double x) {
  return std::pow(std::numbers::pi, -0.25) * std::exp(-x * x / 2.0);
}

/// Mollifier exp(1 - 1/(1 - u^2)) written out directly.
inline double mollifier(double center, double half_width, double amplitude, double x) {
  const double u = (x - center) / half_width;
  if (std::abs(u) >= 1.0) return 0.0;
  return amplitude * std::exp(1.0 - 1.0 / (1.0 - u * u));
}

}  // namespace oracle
