#pragma once

#include <span>
#include <vector>

#include "qiso/csv.hpp"
#include "qiso/eigensolve.hpp"

namespace qiso {

inline const Grid kHadamardGrid{8.0, 15999};
inline constexpr double kDefaultFdStep = 1e-5;

struct VariationResult {
  std::size_t j = 1;
  double h = 1.0;
  double formula_value = 0.0;  // dx sum beta u_j^2
  double oracle_value = 0.0;   // central difference of lambda_j
  double eps_fd = 0.0;
  double discrepancy = 0.0;    // |formula - oracle|
  double relative_discrepancy = 0.0;
};

/// Samples b(x) (or b(-x)) on the grid.
std::vector<double> sample_direction(const BumpSpec& b, bool reflected, const Grid& grid);

/// dx sum_i direction_i u_j(x_i)^2 with u_j the normalized eigenvector of T.
double variational_derivative(const TridiagonalOperator& T, std::size_t j,
                              std::span<const double> direction);
double variational_derivative(const PotentialSpec& p, double h, std::size_t j, const BumpSpec& beta,
                              bool reflected, const Grid& grid = kHadamardGrid);

/// (lambda_j(V + eps dir) - lambda_j(V - eps dir)) / (2 eps) on the grid of T,
/// eigenvalues bisected to adjacent doubles.  Throws ConvergenceError when
/// lambda_j moves by more than half the distance to a neighbour.
double fd_oracle(const TridiagonalOperator& T, std::size_t j, std::span<const double> direction,
                 double eps_fd);
double fd_oracle(const PotentialSpec& p, double h, std::size_t j, const BumpSpec& beta,
                 bool reflected, double eps_fd, const Grid& grid = kHadamardGrid);

VariationResult hadamard_check(const PotentialSpec& p, double h, std::size_t j,
                               const BumpSpec& beta, bool reflected, double eps_fd = kDefaultFdStep,
                               const Grid& grid = kHadamardGrid);

/// Formula against the oracle at several steps; discrepancy should fall like eps^2.
std::vector<VariationResult> fd_convergence(const PotentialSpec& p, double h, std::size_t j,
                                            const BumpSpec& beta, bool reflected,
                                            std::span<const double> steps,
                                            const Grid& grid = kHadamardGrid);

CsvTable variation_csv(std::span<const VariationResult> rows);

struct AsymmetryWitness {
  double d_plus = 0.0;   // integral of beta(x) u_1^2
  double d_minus = 0.0;  // integral of beta(-x) u_1^2
  double gap = 0.0;      // d_plus - d_minus
  double error_estimate = 0.0;  // grid-to-grid change of the gap plus rounding
};

/// Both directional derivatives of lambda_1 at the base potential (its eps is ignored),
/// from the ground state on `fine`, with the error estimated against `coarse`.
AsymmetryWitness asymmetry_witness(const PotentialSpec& p_base, double h, const BumpSpec& beta,
                                   const Grid& coarse = Grid{8.0, 7999},
                                   const Grid& fine = kHadamardGrid);

}  // namespace qiso
