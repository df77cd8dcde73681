#include "qiso/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "qiso/error.hpp"

namespace qiso {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kPivotGuard = 4.0 * std::numeric_limits<double>::min();
constexpr double kShift = 1e-12;
constexpr int kMaxInverseIterations = 12;

double resolution(double tol, double lambda) {
  return tol > 0.0 ? tol : 4.0 * kEps * std::max(1.0, std::abs(lambda));
}

// Bisect [lo, hi] for the eigenvalue with 0-based index j, given count(lo) <= j < count(hi).
template <class Count>
double bisect(Count&& count, std::size_t j, double lo, double hi, double tol) {
  for (;;) {
    const double mid = lo + 0.5 * (hi - lo);
    if (hi - lo <= tol || !(mid > lo && mid < hi)) return mid;
    if (count(mid) > j) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
}

void require_positive_h(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw PreconditionError("h must be positive and finite, got " + std::to_string(h));
  }
}

// Partial-pivot LU of a general tridiagonal matrix (dgttrf layout).
struct TridiagonalLU {
  std::vector<double> dl, d, du, du2;
  std::vector<char> swapped;

  void factor(double floor) {
    const std::size_t n = d.size();
    du2.assign(n, 0.0);
    swapped.assign(n, 0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (std::abs(d[i]) >= std::abs(dl[i])) {
        if (d[i] == 0.0) d[i] = floor;
        const double f = dl[i] / d[i];
        dl[i] = f;
        d[i + 1] -= f * du[i];
      } else {
        const double f = d[i] / dl[i];
        d[i] = dl[i];
        dl[i] = f;
        const double tmp = du[i];
        du[i] = d[i + 1];
        d[i + 1] = tmp - f * d[i + 1];
        if (i + 2 < n) {
          du2[i] = du[i + 1];
          du[i + 1] = -f * du[i + 1];
        }
        swapped[i] = 1;
      }
    }
    if (n && d[n - 1] == 0.0) d[n - 1] = floor;
  }

  void solve(std::vector<double>& b) const {
    const std::size_t n = d.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (!swapped[i]) {
        b[i + 1] -= dl[i] * b[i];
      } else {
        const double tmp = b[i];
        b[i] = b[i + 1];
        b[i + 1] = tmp - dl[i] * b[i];
      }
    }
    b[n - 1] /= d[n - 1];
    if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    for (std::size_t i = n - 2; i-- > 0;) {
      b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
    }
  }
};

double norm2(std::span<const double> u) {
  double s = 0.0;
  for (double v : u) s += v * v;
  return std::sqrt(s);
}

void normalize_and_fix_sign(std::vector<double>& u, double dx) {
  double s = 0.0;
  double peak = 0.0;
  for (double v : u) {
    s += v * v;
    peak = std::max(peak, std::abs(v));
  }
  const double scale = 1.0 / std::sqrt(dx * s);
  double sign = 1.0;
  for (double v : u) {
    if (std::abs(v) > 1e-3 * peak) {
      sign = v > 0.0 ? 1.0 : -1.0;
      break;
    }
  }
  for (double& v : u) v *= sign * scale;
}

void check_refinement_pair(const Grid& coarse, const Grid& fine) {
  coarse.validate();
  fine.validate();
  if (coarse == fine) throw PreconditionError("refinement needs two distinct grids");
  if (!fine.is_refinement_of(coarse)) {
    std::ostringstream os;
    os << "grids (L=" << coarse.L << ", n=" << coarse.n << ") and (L=" << fine.L
       << ", n=" << fine.n << ") do not have spacing ratio 2 on a shared interval";
    throw PreconditionError(os.str());
  }
}

}  // namespace

double Grid::x(std::size_t i) const {
  const double m = static_cast<double>(n + 1);
  const double k = 2.0 * static_cast<double>(i + 1) - m;
  return (k * L) / m;
}

std::vector<double> Grid::points() const {
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = x(i);
  return xs;
}

bool Grid::is_refinement_of(const Grid& coarse) const {
  return L == coarse.L && n + 1 == 2 * (coarse.n + 1);
}

std::optional<std::size_t> Grid::index_of(double xv) const {
  const double pos = (xv + L) / dx() - 1.0;
  const double r = std::round(pos);
  if (r < 0.0 || r > static_cast<double>(n - 1)) return std::nullopt;
  const auto i = static_cast<std::size_t>(r);
  if (std::abs(x(i) - xv) > 1e-9 * dx()) return std::nullopt;
  return i;
}

double Grid::half_length_for(double energy_window) {
  return std::max(8.0, std::sqrt(std::max(0.0, energy_window)) + 4.0);
}

void Grid::validate() const {
  if (!(L > 0.0) || !std::isfinite(L)) {
    throw PreconditionError("grid L must be positive, got " + std::to_string(L));
  }
  if (n < 3) throw PreconditionError("grid needs n >= 3 interior points, got " + std::to_string(n));
}

TridiagonalOperator::TridiagonalOperator(double h, Grid grid, std::vector<double> potential)
    : h_(h), grid_(grid), potential_(std::move(potential)) {
  require_positive_h(h);
  grid_.validate();
  if (potential_.size() != grid_.n) {
    throw PreconditionError("potential sample count does not match the grid");
  }
  const double dx = grid_.dx();
  kinetic_ = (h * h) / (dx * dx);
}

std::vector<double> TridiagonalOperator::diagonal() const {
  std::vector<double> d(size());
  for (std::size_t i = 0; i < size(); ++i) d[i] = diag(i);
  return d;
}

std::vector<double> TridiagonalOperator::off_diagonal() const {
  return std::vector<double>(size() - 1, offdiag());
}

double TridiagonalOperator::norm_inf() const {
  double m = 0.0;
  for (double v : potential_) m = std::max(m, std::abs(2.0 * kinetic_ + v));
  return m + 2.0 * kinetic_;
}

double TridiagonalOperator::min_potential() const {
  return *std::min_element(potential_.begin(), potential_.end());
}

TridiagonalOperator TridiagonalOperator::perturbed(std::span<const double> dv, double scale) const {
  if (dv.size() != size()) throw PreconditionError("perturbation size does not match the grid");
  std::vector<double> v = potential_;
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += scale * dv[i];
  return {h_, grid_, std::move(v)};
}

void TridiagonalOperator::apply(std::span<const double> u, std::span<double> out) const {
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i ? u[i - 1] : 0.0;
    const double right = i + 1 < n ? u[i + 1] : 0.0;
    out[i] = kinetic_ * (2.0 * u[i] - left - right) + potential_[i] * u[i];
  }
}

TridiagonalOperator discretize(const PotentialSpec& p, double h, const Grid& grid,
                               double energy_window) {
  require_positive_h(h);
  grid.validate();
  const double margin = std::min(potential_eval(p, -grid.L), potential_eval(p, grid.L));
  if (margin < energy_window + 10.0) {
    std::ostringstream os;
    os << "grid half-length L=" << grid.L << " gives V(+-L)=" << margin
       << ", below E+10=" << energy_window + 10.0;
    throw PreconditionError(os.str());
  }
  std::vector<double> v(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) v[i] = potential_eval(p, grid.x(i));
  return {h, grid, std::move(v)};
}

std::size_t count_below(const TridiagonalOperator& T, double lambda) {
  const auto v = T.potential();
  const double inv_k = 1.0 / T.kinetic();
  std::size_t negative = 0;
  double g = 0.0;
  double d = 1.0;  // leading "previous pivot" so the first step reads g_0 = w_0 + 1
  for (std::size_t i = 0; i < v.size(); ++i) {
    g = (v[i] - lambda) * inv_k + (i ? g / d : 1.0);
    d = 1.0 + g;
    if (std::abs(d) < kPivotGuard) d = -kPivotGuard;
    if (d < 0.0) ++negative;
  }
  return negative;
}

std::size_t count_below(std::span<const double> diag, std::span<const double> offdiag,
                        double lambda) {
  if (diag.empty()) return 0;
  if (offdiag.size() + 1 != diag.size()) {
    throw PreconditionError("off-diagonal must have one entry fewer than the diagonal");
  }
  double bmax = 1.0;
  for (double b : offdiag) bmax = std::max(bmax, b * b);
  const double guard = std::numeric_limits<double>::min() * bmax;
  std::size_t negative = 0;
  double d = diag[0] - lambda;
  for (std::size_t i = 0;; ++i) {
    if (std::abs(d) < guard) d = -guard;
    if (d < 0.0) ++negative;
    if (i + 1 == diag.size()) break;
    d = diag[i + 1] - lambda - offdiag[i] * offdiag[i] / d;
  }
  return negative;
}

double default_tolerance(double energy) { return 1e-13 * std::max(1.0, energy); }

Spectrum eigenvalues_below(const TridiagonalOperator& T, double E, double tol,
                           std::size_t max_count) {
  if (!(tol >= 0.0)) throw PreconditionError("bisection tolerance must be >= 0");
  const std::size_t m = count_below(T, E);
  if (m > max_count) {
    throw PreconditionError("window below E=" + std::to_string(E) + " holds " +
                            std::to_string(m) + " eigenvalues, above the cap " +
                            std::to_string(max_count));
  }
  Spectrum s;
  s.h = T.h();
  s.grid = T.grid();
  s.tol = tol;
  if (m == 0) return s;

  const double floor = std::min(T.min_potential(), E) - 1.0;
  std::vector<double> lo(m, floor), hi(m, E);
  auto count = [&T](double lambda) { return count_below(T, lambda); };

  s.eigenvalues.resize(m);
  s.error_estimate.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    double a = lo[j], b = hi[j];
    for (;;) {
      const double mid = a + 0.5 * (b - a);
      if (b - a <= tol || !(mid > a && mid < b)) break;
      const std::size_t c = count(mid);
      if (c > j) {
        b = mid;
      } else {
        a = mid;
      }
      for (std::size_t k = j + 1; k < m; ++k) {
        if (k < c) {
          hi[k] = std::min(hi[k], mid);
        } else {
          lo[k] = std::max(lo[k], mid);
        }
      }
    }
    s.eigenvalues[j] = a + 0.5 * (b - a);
    s.error_estimate[j] = 0.5 * resolution(tol, s.eigenvalues[j]);
    if (j && !(s.eigenvalues[j] > s.eigenvalues[j - 1])) {
      throw ConvergenceError("eigenvalues " + std::to_string(j) + " and " + std::to_string(j + 1) +
                             " are not separated at tolerance " + std::to_string(tol));
    }
  }
  return s;
}

double eigenvalue(const TridiagonalOperator& T, std::size_t j, double tol) {
  if (j == 0) throw PreconditionError("eigenvalue index is 1-based");
  if (j > T.size()) throw PreconditionError("eigenvalue index exceeds the matrix size");
  if (!(tol >= 0.0)) throw PreconditionError("bisection tolerance must be >= 0");
  const double lo = T.min_potential() - 1.0;
  double hi = lo + 1.0;
  while (count_below(T, hi) < j) hi = lo + 2.0 * (hi - lo);
  return bisect([&T](double l) { return count_below(T, l); }, j - 1, lo, hi, tol);
}

Spectrum refine(const TridiagonalOperator& coarse, const TridiagonalOperator& fine, double E,
                double tol) {
  check_refinement_pair(coarse.grid(), fine.grid());
  if (coarse.h() != fine.h()) throw PreconditionError("refinement needs equal h on both grids");
  const Spectrum c = eigenvalues_below(coarse, E, tol);
  const Spectrum f = eigenvalues_below(fine, E, tol);
  Spectrum r;
  r.h = fine.h();
  r.grid = fine.grid();
  r.tol = tol;
  const std::size_t m = std::min(c.size(), f.size());
  r.eigenvalues.resize(m);
  r.error_estimate.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double lf = f.eigenvalues[j], lc = c.eigenvalues[j];
    r.eigenvalues[j] = (4.0 * lf - lc) / 3.0;
    r.error_estimate[j] = std::abs(lf - lc) / 3.0 + 5.0 / 6.0 * resolution(tol, lf);
  }
  return r;
}

Spectrum refine(const PotentialSpec& p, double h, double E, const Grid& coarse, const Grid& fine,
                std::optional<double> tol) {
  check_refinement_pair(coarse, fine);
  return refine(discretize(p, h, coarse, E), discretize(p, h, fine, E), E,
                tol.value_or(default_tolerance(E)));
}

PairedSpectrum refine_pair(const PotentialSpec& a, const PotentialSpec& b, double h, double E,
                           const Grid& coarse, const Grid& fine, std::optional<double> tol) {
  check_refinement_pair(coarse, fine);
  const double t = tol.value_or(default_tolerance(E));
  const Spectrum ac = eigenvalues_below(discretize(a, h, coarse, E), E, t);
  const Spectrum af = eigenvalues_below(discretize(a, h, fine, E), E, t);
  const Spectrum bc = eigenvalues_below(discretize(b, h, coarse, E), E, t);
  const Spectrum bf = eigenvalues_below(discretize(b, h, fine, E), E, t);

  PairedSpectrum out;
  auto combine = [&](const Spectrum& c, const Spectrum& f) {
    Spectrum r;
    r.h = h;
    r.grid = fine;
    r.tol = t;
    const std::size_t m = std::min(c.size(), f.size());
    for (std::size_t j = 0; j < m; ++j) {
      const double lf = f.eigenvalues[j], lc = c.eigenvalues[j];
      r.eigenvalues.push_back((4.0 * lf - lc) / 3.0);
      r.error_estimate.push_back(std::abs(lf - lc) / 3.0 + 5.0 / 6.0 * resolution(t, lf));
    }
    return r;
  };
  out.first = combine(ac, af);
  out.second = combine(bc, bf);
  const std::size_t m = std::min(out.first.size(), out.second.size());
  for (std::size_t j = 0; j < m; ++j) {
    const double df = af.eigenvalues[j] - bf.eigenvalues[j];
    const double dc = ac.eigenvalues[j] - bc.eigenvalues[j];
    out.difference.push_back((4.0 * df - dc) / 3.0);
    out.difference_error.push_back(std::abs(df - dc) / 3.0 +
                                   5.0 / 3.0 * resolution(t, af.eigenvalues[j]));
  }
  return out;
}

double relative_residual(const TridiagonalOperator& T, std::span<const double> u, double lambda) {
  std::vector<double> r(u.size());
  T.apply(u, r);
  for (std::size_t i = 0; i < u.size(); ++i) r[i] -= lambda * u[i];
  return norm2(r) / norm2(u);
}

std::vector<double> eigenvector(const TridiagonalOperator& T, double lambda) {
  const std::size_t n = T.size();
  const double k = T.kinetic();
  const double sigma = lambda + kShift;
  const auto v = T.potential();

  TridiagonalLU lu;
  lu.d.resize(n);
  for (std::size_t i = 0; i < n; ++i) lu.d[i] = 2.0 + (v[i] - sigma) / k;
  lu.dl.assign(n - 1, -1.0);
  lu.du.assign(n - 1, -1.0);
  lu.factor(kEps);

  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> unit(0.5, 1.5);
  std::vector<double> u(n);
  for (double& x : u) x = unit(rng);

  const double target = std::max(1e-10, 32.0 * kEps * T.norm_inf());
  double res = std::numeric_limits<double>::infinity();
  for (int it = 0; it < kMaxInverseIterations; ++it) {
    lu.solve(u);
    const double nu = norm2(u);
    if (!std::isfinite(nu) || nu == 0.0) {
      throw ConvergenceError("inverse iteration broke down at lambda=" + std::to_string(lambda));
    }
    for (double& x : u) x /= nu;
    res = relative_residual(T, u, lambda);
    if (res <= target && it >= 1) break;
  }
  if (!(res <= target)) {
    std::ostringstream os;
    os << "inverse iteration at lambda=" << lambda << " stalled with relative residual " << res
       << " > " << target;
    throw ConvergenceError(os.str());
  }
  normalize_and_fix_sign(u, T.grid().dx());
  return u;
}

double Eigenfunction::sample(long i) const {
  if (i < 0 || i >= static_cast<long>(values.size())) return 0.0;
  return values[static_cast<std::size_t>(i)];
}

long Eigenfunction::window_start(double x) const {
  const double pos = (x + grid.L) / grid.dx() - 1.0;
  long s = static_cast<long>(std::floor(pos)) - 2;
  const long n = static_cast<long>(grid.n);
  return std::clamp(s, -1L, n - 5);
}

double Eigenfunction::at(double x) const {
  if (std::abs(std::abs(x) - grid.L) <= 1e-12 * grid.L) return 0.0;
  const auto i = grid.index_of(x);
  if (!i) throw PreconditionError("x=" + std::to_string(x) + " is not a grid point");
  return values[*i];
}

double Eigenfunction::interpolate(double x) const {
  if (!(std::abs(x) <= grid.L)) throw PreconditionError("x outside the truncation interval");
  const long s = window_start(x);
  const double dx = grid.dx();
  auto node = [&](long i) { return -grid.L + static_cast<double>(i + 1) * dx; };
  double sum = 0.0;
  for (long a = s; a < s + 6; ++a) {
    double w = 1.0;
    for (long b = s; b < s + 6; ++b) {
      if (b != a) w *= (x - node(b)) / (node(a) - node(b));
    }
    sum += w * sample(a);
  }
  return sum;
}

double Eigenfunction::derivative(double x) const {
  if (!(std::abs(x) <= grid.L)) throw PreconditionError("x outside the truncation interval");
  const long s = window_start(x);
  const double dx = grid.dx();
  auto node = [&](long i) { return -grid.L + static_cast<double>(i + 1) * dx; };
  double sum = 0.0;
  for (long a = s; a < s + 6; ++a) {
    double denom = 1.0;
    for (long b = s; b < s + 6; ++b) {
      if (b != a) denom *= node(a) - node(b);
    }
    double num = 0.0;
    for (long skip = s; skip < s + 6; ++skip) {
      if (skip == a) continue;
      double prod = 1.0;
      for (long b = s; b < s + 6; ++b) {
        if (b != a && b != skip) prod *= x - node(b);
      }
      num += prod;
    }
    sum += num / denom * sample(a);
  }
  return sum;
}

Eigenfunction eigenfunction(const TridiagonalOperator& T, std::size_t j, double tol) {
  Eigenfunction ef;
  ef.grid = T.grid();
  ef.eigenvalue = eigenvalue(T, j, tol);
  ef.eigenvalue_error = 0.5 * resolution(tol, ef.eigenvalue);
  ef.values = eigenvector(T, ef.eigenvalue);
  return ef;
}

Eigenfunction refined_eigenfunction(const PotentialSpec& p, double h, std::size_t j,
                                    const Grid& coarse, const Grid& fine,
                                    std::optional<double> tol) {
  check_refinement_pair(coarse, fine);
  const TridiagonalOperator tc = discretize(p, h, coarse);
  const TridiagonalOperator tf = discretize(p, h, fine);
  const double t = tol.value_or(0.0);
  const double lc = eigenvalue(tc, j, t);
  const double lf = eigenvalue(tf, j, t);
  const std::vector<double> uc = eigenvector(tc, lc);
  const std::vector<double> uf = eigenvector(tf, lf);

  Eigenfunction ef;
  ef.grid = coarse;
  ef.eigenvalue = (4.0 * lf - lc) / 3.0;
  ef.eigenvalue_error = std::abs(lf - lc) / 3.0 + 5.0 / 6.0 * resolution(t, lf);
  ef.values.resize(coarse.n);
  double worst = 0.0;
  for (std::size_t i = 0; i < coarse.n; ++i) {
    const double f = uf[2 * i + 1];
    ef.values[i] = (4.0 * f - uc[i]) / 3.0;
    worst = std::max(worst, std::abs(f - uc[i]));
  }
  ef.error_estimate = worst / 3.0;
  return ef;
}

nlohmann::json to_json(const Spectrum& s) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t j = 0; j < s.size(); ++j) {
    rows.push_back({{"j", j + 1}, {"lambda", s.eigenvalues[j]}, {"error_estimate", s.error_estimate[j]}});
  }
  return {{"h", s.h},
          {"grid", {{"L", s.grid.L}, {"n", s.grid.n}, {"dx", s.grid.dx()}}},
          {"tol", s.tol},
          {"eigenvalues", rows}};
}

}  // namespace qiso
