#include "qiso/hadamard.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "qiso/error.hpp"

namespace qiso {

namespace {

PotentialSpec base_of(const PotentialSpec& p) {
  PotentialSpec b = p;
  b.eps = 0.0;
  return b;
}

}  // namespace

std::vector<double> sample_direction(const BumpSpec& b, bool reflected, const Grid& grid) {
  std::vector<double> d(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) d[i] = bump_at(b, grid.x(i), reflected);
  return d;
}

double variational_derivative(const TridiagonalOperator& T, std::size_t j,
                              std::span<const double> direction) {
  if (direction.size() != T.size()) throw PreconditionError("direction size does not match the grid");
  const std::vector<double> u = eigenvector(T, eigenvalue(T, j, 0.0));
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += direction[i] * u[i] * u[i];
  return T.grid().dx() * s;
}

double variational_derivative(const PotentialSpec& p, double h, std::size_t j, const BumpSpec& beta,
                              bool reflected, const Grid& grid) {
  return variational_derivative(discretize(p, h, grid), j, sample_direction(beta, reflected, grid));
}

double fd_oracle(const TridiagonalOperator& T, std::size_t j, std::span<const double> direction,
                 double eps_fd) {
  if (!(eps_fd > 0.0)) throw PreconditionError("eps_fd must be positive");
  if (direction.size() != T.size()) throw PreconditionError("direction size does not match the grid");
  const TridiagonalOperator up = T.perturbed(direction, eps_fd);
  const TridiagonalOperator down = T.perturbed(direction, -eps_fd);
  const double lp = eigenvalue(up, j, 0.0);
  const double lm = eigenvalue(down, j, 0.0);

  const double l0 = eigenvalue(T, j, 0.0);
  double room = std::numeric_limits<double>::infinity();
  if (j > 1) room = std::min(room, l0 - eigenvalue(T, j - 1, 0.0));
  room = std::min(room, eigenvalue(T, j + 1, 0.0) - l0);
  if (std::abs(lp - l0) >= 0.5 * room || std::abs(lm - l0) >= 0.5 * room) {
    std::ostringstream os;
    os << "eigenvalue " << j << " changes order within +-" << eps_fd << " (shift "
       << std::max(std::abs(lp - l0), std::abs(lm - l0)) << ", neighbour distance " << room << ")";
    throw ConvergenceError(os.str());
  }
  return (lp - lm) / (2.0 * eps_fd);
}

double fd_oracle(const PotentialSpec& p, double h, std::size_t j, const BumpSpec& beta,
                 bool reflected, double eps_fd, const Grid& grid) {
  return fd_oracle(discretize(p, h, grid), j, sample_direction(beta, reflected, grid), eps_fd);
}

VariationResult hadamard_check(const PotentialSpec& p, double h, std::size_t j,
                               const BumpSpec& beta, bool reflected, double eps_fd,
                               const Grid& grid) {
  const TridiagonalOperator T = discretize(p, h, grid);
  const std::vector<double> dir = sample_direction(beta, reflected, grid);
  VariationResult r;
  r.j = j;
  r.h = h;
  r.eps_fd = eps_fd;
  r.formula_value = variational_derivative(T, j, dir);
  r.oracle_value = fd_oracle(T, j, dir, eps_fd);
  r.discrepancy = std::abs(r.formula_value - r.oracle_value);
  r.relative_discrepancy = r.formula_value != 0.0 ? r.discrepancy / std::abs(r.formula_value) : r.discrepancy;
  return r;
}

std::vector<VariationResult> fd_convergence(const PotentialSpec& p, double h, std::size_t j,
                                            const BumpSpec& beta, bool reflected,
                                            std::span<const double> steps, const Grid& grid) {
  const TridiagonalOperator T = discretize(p, h, grid);
  const std::vector<double> dir = sample_direction(beta, reflected, grid);
  const double formula = variational_derivative(T, j, dir);
  std::vector<VariationResult> out;
  for (double e : steps) {
    VariationResult r;
    r.j = j;
    r.h = h;
    r.eps_fd = e;
    r.formula_value = formula;
    r.oracle_value = fd_oracle(T, j, dir, e);
    r.discrepancy = std::abs(formula - r.oracle_value);
    r.relative_discrepancy = formula != 0.0 ? r.discrepancy / std::abs(formula) : r.discrepancy;
    out.push_back(r);
  }
  return out;
}

CsvTable variation_csv(std::span<const VariationResult> rows) {
  CsvTable t({"j", "h", "eps_fd", "formula", "oracle", "discrepancy"});
  for (const auto& r : rows) t.add(r.j, r.h, r.eps_fd, r.formula_value, r.oracle_value, r.discrepancy);
  return t;
}

AsymmetryWitness asymmetry_witness(const PotentialSpec& p_base, double h, const BumpSpec& beta,
                                   const Grid& coarse, const Grid& fine) {
  const PotentialSpec base = base_of(p_base);
  auto on = [&](const Grid& g) {
    const TridiagonalOperator T = discretize(base, h, g);
    const std::vector<double> u = eigenvector(T, eigenvalue(T, 1, 0.0));
    double plus = 0.0, minus = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) {
      const double w = u[i] * u[i];
      plus += bump_at(beta, g.x(i), false) * w;
      minus += bump_at(beta, g.x(i), true) * w;
    }
    return std::pair{g.dx() * plus, g.dx() * minus};
  };
  const auto [pf, mf] = on(fine);
  const auto [pc, mc] = on(coarse);
  AsymmetryWitness w;
  w.d_plus = pf;
  w.d_minus = mf;
  w.gap = pf - mf;
  const double rounding = 64.0 * std::numeric_limits<double>::epsilon() * (std::abs(pf) + std::abs(mf));
  w.error_estimate = std::abs((pf - mf) - (pc - mc)) + rounding;
  return w;
}

}  // namespace qiso
