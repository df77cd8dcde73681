#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "qiso/csv.hpp"
#include "qiso/eigensolve.hpp"
#include "qiso/fit.hpp"

namespace qiso {

/// Nonnegative function of energy used in Tr f(P_V).
struct TestFunction {
  enum class Kind { exponential, bump, zero };

  Kind kind = Kind::exponential;
  double scale = 1.0;  // e^{-scale E}
  double lo = 0.0;     // bump support (lo, hi), peak value 1
  double hi = 1.0;

  static TestFunction exponential(double s = 1.0);
  static TestFunction bump(double lo, double hi);
  static TestFunction zero();

  double operator()(double E) const;
  std::string describe() const;
};

struct SpectralOptions {
  std::size_t coarse_n = 7999;  // fine grid uses 2n + 1
  double tail_target = 1e-14;
  std::size_t max_count = kDefaultWindowCap;
  std::optional<double> tol;
};

struct SpectralDensity {
  double value = 0.0;  // sum over computed eigenvalues
  double tail_bound = 0.0;
  double cutoff = 0.0;  // eigenvalues below the cutoff were summed
  std::size_t count = 0;
  double error_estimate = 0.0;  // propagated eigenvalue error
};

/// nu_h(f) = sum_j f(lambda_j) from Richardson-refined eigenvalues.  The tail
/// beyond the cutoff uses lambda_j >= max(cutoff, (2j - 1) h), valid since V >= x^2.
SpectralDensity spectral_density(const PotentialSpec& p, double h, const TestFunction& f,
                                 const SpectralOptions& options = {});

/// a_0(f) = integral of f(xi^2 + V(x)) over the phase plane, inner xi-integral
/// done per x; adaptive Gauss-Kronrod with breakpoints at the bump edges.
double weyl_term(const PotentialSpec& p, const TestFunction& f);

inline const std::vector<double> kWeylGrid{0.05, 0.075, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5};

struct WeylConsistency {
  std::vector<double> h;
  std::vector<double> scaled;  // 2 pi h nu_h(f)
  double a0 = 0.0;             // quadrature value
  LinearFit fit;               // scaled ~ c0 + c1 h^2 + c2 h^4
  double a0_fit = 0.0, a0_fit_error = 0.0;
  double a1 = 0.0, a1_error = 0.0;
  double max_residual = 0.0;
  bool contaminated = false;  // residual above threshold

  CsvTable csv() const;
};

/// Fits (2 pi h) nu_h(f) against h^2 and h^4; h_grid within [0.02, 0.5], at least 6 points.
WeylConsistency weyl_consistency(const PotentialSpec& p, const TestFunction& f,
                                 std::span<const double> h_grid = kWeylGrid,
                                 const SpectralOptions& options = {});

struct GapEntry {
  double h = 0.0;
  double E = 0.0;
  double D = 0.0;        // max_j |lambda_j^+ - lambda_j^-| over the common window
  std::size_t j_max = 0;  // index attaining D (1-based), 0 for an empty window
  std::size_t count = 0;
  double error = 0.0;     // largest correlated difference error in the window
  bool usable = false;
  std::vector<double> differences;  // per level, refined
  std::vector<double> difference_errors;
};

/// Pairs the two spectra by index on shared grids.  Unequal counts below E are
/// resolved by the common count.
GapEntry isospectral_distance(double h, double E, const PotentialSpec& p_plus,
                              const PotentialSpec& p_minus, const Grid& coarse, const Grid& fine,
                              std::optional<double> tol = std::nullopt);

struct GapFit {
  double C = 0.0;
  double c = 0.0;
  double r_squared = 0.0;
  std::size_t used = 0;
  double power_exponent = 0.0;  // D ~ K h^q comparison model
  double power_r_squared = 0.0;
  bool prefers_power_law = false;
  bool poor = false;  // r^2 < 0.98 or the power law fits better
};

/// Least squares of log D against 1/h on (h, D) pairs; needs >= 5 entries.
GapFit fit_gap_decay(std::span<const double> h, std::span<const double> D);

struct GapCurve {
  std::vector<GapEntry> entries;
  double noise_floor = 1e-12;
  std::optional<GapFit> fit;
  std::string fit_failure;
  std::vector<std::pair<int, bool>> decay_witness;  // (N, D/h^N decreasing as h shrinks)

  std::size_t usable_count() const;
  CsvTable csv() const;
  nlohmann::json to_json() const;
};

/// Log-spaced h values from h_max down to h_min.
std::vector<double> log_spaced(double h_max, double h_min, std::size_t count);

/// D(h) over the sweep; floor = max(1e-12, 10 * largest difference error);
/// entries above it are fitted.
GapCurve gap_sweep(const PotentialSpec& p_plus, const PotentialSpec& p_minus,
                   std::span<const double> hs, double E, const Grid& coarse, const Grid& fine,
                   std::optional<double> tol = std::nullopt);

/// Whether D / h^N strictly decreases along entries ordered by decreasing h.
bool decays_faster_than(std::span<const double> h, std::span<const double> D, int N);

}  // namespace qiso
