#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"
#include "qiso/potential.hpp"

namespace qiso {

/// Uniform interior grid on (-L, L) with Dirichlet ends at +-L.
///
/// Points are x_i = -L + (i+1) dx, i = 0..n-1, dx = 2L/(n+1).  They are
/// evaluated so that x_{n-1-i} == -x_i holds exactly in floating point.
struct Grid {
  double L = 8.0;
  std::size_t n = 15999;

  double dx() const { return 2.0 * L / static_cast<double>(n + 1); }
  double x(std::size_t i) const;
  std::vector<double> points() const;

  /// Grid with half the spacing on the same interval (n -> 2n + 1).
  Grid refined() const { return {L, 2 * n + 1}; }
  bool is_refinement_of(const Grid& coarse) const;

  /// Index of the grid point equal to x (up to 1e-9 dx), if any.
  std::optional<std::size_t> index_of(double x) const;

  /// Truncation half-length max(8, sqrt(E) + 4) for an energy window E.
  static double half_length_for(double energy_window);

  void validate() const;

  friend bool operator==(const Grid&, const Grid&) = default;
};

/// Symmetric tridiagonal discretization of -h^2 d^2/dx^2 + V with Dirichlet ends.
///
/// Stored as the kinetic coupling k = h^2/dx^2 and the potential samples V(x_i);
/// the matrix has diagonal 2k + V(x_i) and off-diagonal -k.
class TridiagonalOperator {
 public:
  TridiagonalOperator(double h, Grid grid, std::vector<double> potential);

  double h() const { return h_; }
  const Grid& grid() const { return grid_; }
  std::size_t size() const { return potential_.size(); }
  double kinetic() const { return kinetic_; }
  std::span<const double> potential() const { return potential_; }

  double diag(std::size_t i) const { return 2.0 * kinetic_ + potential_[i]; }
  double offdiag() const { return -kinetic_; }
  std::vector<double> diagonal() const;
  std::vector<double> off_diagonal() const;

  /// Infinity norm (bounds every eigenvalue).
  double norm_inf() const;
  double min_potential() const;

  /// Operator with potential samples V + scale * dv on the same grid.
  TridiagonalOperator perturbed(std::span<const double> dv, double scale) const;

  /// out = T u.
  void apply(std::span<const double> u, std::span<double> out) const;

 private:
  double h_;
  Grid grid_;
  double kinetic_;
  std::vector<double> potential_;
};

/// Samples p on the grid.  Rejects grids whose ends sit less than 10 above the
/// requested energy window (the truncation would leak into the window).
TridiagonalOperator discretize(const PotentialSpec& p, double h, const Grid& grid,
                               double energy_window = 0.0);

/// Number of eigenvalues strictly below lambda.
///
/// Counts negative pivots of the LDL^T factorization of T - lambda with the
/// pivots kept as d_i / k = 1 + g_i, where g_i = (V_i - lambda) / k + g_{i-1} / (1 + g_{i-1}).
/// This never forms 2k + V_i - lambda, so the count stays exact to relative
/// precision in V - lambda even when k = h^2/dx^2 is large.
std::size_t count_below(const TridiagonalOperator& T, double lambda);

/// Textbook Sturm count for an arbitrary symmetric tridiagonal matrix.
std::size_t count_below(std::span<const double> diag, std::span<const double> offdiag,
                        double lambda);

/// Default bisection tolerance 1e-13 * max(1, E).
double default_tolerance(double energy);

inline constexpr std::size_t kDefaultWindowCap = 20000;

struct Spectrum {
  double h = 0.0;
  Grid grid;  // finest grid that contributed
  double tol = 0.0;
  std::vector<double> eigenvalues;     // lambda_1 < lambda_2 < ...
  std::vector<double> error_estimate;  // one per eigenvalue

  std::size_t size() const { return eigenvalues.size(); }
};

/// Every eigenvalue of T below E, each bisected to a bracket of width <= tol
/// (tol == 0 bisects to adjacent doubles).
Spectrum eigenvalues_below(const TridiagonalOperator& T, double E, double tol,
                           std::size_t max_count = kDefaultWindowCap);

/// The j-th eigenvalue (j >= 1) of T.
double eigenvalue(const TridiagonalOperator& T, std::size_t j, double tol);

/// Richardson step (4 lambda_fine - lambda_coarse) / 3 over two grids with
/// spacing ratio exactly 2.  error_estimate = |lambda_fine - lambda_coarse| / 3
/// plus the bisection resolution 5 tol / 6 of the combination.
Spectrum refine(const TridiagonalOperator& coarse, const TridiagonalOperator& fine, double E,
                double tol);
Spectrum refine(const PotentialSpec& p, double h, double E, const Grid& coarse, const Grid& fine,
                std::optional<double> tol = std::nullopt);

/// Two potentials refined on shared grids, paired by index.
///
/// The differences are taken grid by grid before extrapolating, so the
/// discretization error common to both operators cancels; difference_error is
/// |D_fine - D_coarse| / 3 plus the bisection resolution 5 tol / 3.
struct PairedSpectrum {
  Spectrum first;
  Spectrum second;
  std::vector<double> difference;  // first - second, refined
  std::vector<double> difference_error;

  std::size_t size() const { return difference.size(); }
};

PairedSpectrum refine_pair(const PotentialSpec& a, const PotentialSpec& b, double h, double E,
                           const Grid& coarse, const Grid& fine,
                           std::optional<double> tol = std::nullopt);

/// Eigenvector for an isolated eigenvalue by inverse iteration with shift lambda + 1e-12.
///
/// Normalized so that dx * sum u_i^2 = 1, sign fixed so that the leftmost
/// non-negligible entry is positive (a ground state comes out positive).
/// Throws ConvergenceError when the residual stays above
/// max(1e-10, 32 eps ||T||) ||u|| after the iteration budget.
std::vector<double> eigenvector(const TridiagonalOperator& T, double lambda);

/// Residual ||T u - lambda u||_2 / ||u||_2.
double relative_residual(const TridiagonalOperator& T, std::span<const double> u, double lambda);

/// Grid function with Dirichlet zeros at +-L.
struct Eigenfunction {
  Grid grid;
  double eigenvalue = 0.0;
  double eigenvalue_error = 0.0;
  double error_estimate = 0.0;  // sup-norm estimate for the samples
  std::vector<double> values;

  /// Sample at a grid point (x = +-L gives 0).  Throws if x is off-grid.
  double at(double x) const;
  /// Degree-5 Lagrange interpolant through the six nearest samples.
  double interpolate(double x) const;
  double derivative(double x) const;

 private:
  double sample(long i) const;
  long window_start(double x) const;
};

/// Discrete eigenpair j (>= 1) of T.
Eigenfunction eigenfunction(const TridiagonalOperator& T, std::size_t j, double tol);

/// Richardson-combined eigenfunction (4 u_fine - u_coarse) / 3 on the coarse grid.
Eigenfunction refined_eigenfunction(const PotentialSpec& p, double h, std::size_t j,
                                    const Grid& coarse, const Grid& fine,
                                    std::optional<double> tol = std::nullopt);

nlohmann::json to_json(const Spectrum& s);

}  // namespace qiso
