#include "qiso/weber.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "qiso/error.hpp"
#include "qiso/fit.hpp"

namespace qiso {

namespace {

constexpr double kRescaleAbove = 1e100;
constexpr std::size_t kSegment = 1000;
constexpr double kSlopeTolerance = 0.05;
constexpr double kResidualTolerance = 1e-8;

long lattice_index(double x, double n) {
  const double m = x * n;
  const double r = std::round(m);
  if (std::abs(m - r) > 1e-6) return std::numeric_limits<long>::min();
  return static_cast<long>(r);
}

double find_root(const std::function<double(double)>& f, double lo, double hi) {
  namespace tools = boost::math::tools;
  const double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  std::uintmax_t iters = 100;
  const auto r = tools::toms748_solve(f, lo, hi, flo, fhi, tools::eps_tolerance<double>(50), iters);
  return r.first + 0.5 * (r.second - r.first);
}

Rhs2 weber_system(double lambda) {
  return [lambda](const State2& y, State2& dy, double x) {
    dy[0] = y[1];
    dy[1] = (x * x - lambda) * y[0];
  };
}

}  // namespace

bool WeberSolution::has_sample(double x) const {
  const long m = lattice_index(x, samples_per_unit);
  const long m0 = lattice_index(x_left, samples_per_unit);
  if (m == std::numeric_limits<long>::min()) return false;
  return m >= m0 && m - m0 < static_cast<long>(samples.size());
}

const WeberSample& WeberSolution::sample_at(double x) const {
  if (!has_sample(x)) {
    throw PreconditionError("x=" + std::to_string(x) + " is not a Weber sample point");
  }
  const long m = lattice_index(x, samples_per_unit);
  const long m0 = lattice_index(x_left, samples_per_unit);
  return samples[static_cast<std::size_t>(m - m0)];
}

State2 WeberSolution::evaluate(double x) const {
  if (!(x >= x_left && x <= x_right)) throw PreconditionError("x outside the Weber solution range");
  auto k = static_cast<std::size_t>(std::floor((x - x_left) * samples_per_unit));
  k = std::min(k, samples.size() - 1);
  while (k > 0 && samples[k].x > x) --k;
  const WeberSample& s = samples[k];
  if (s.x == x) return {s.w, s.dw};
  const double xs[2] = {s.x, x};
  return integrate_samples(weber_system(lambda1), State2{s.w, s.dw}, xs,
                           [](const State2&, double) {}, ode);
}

CsvTable WeberSolution::csv() const {
  CsvTable t({"x", "W", "dW"});
  for (const auto& s : samples) t.add(s.x, s.w, s.dw);
  return t;
}

WeberSolution solve_weber(double lambda1, double x_left, double x_right, double norm_x,
                          double norm_value, const WeberOptions& options) {
  const bool boundary = std::abs(lambda1 - 1.0) <= options.boundary_band;
  if (!(lambda1 < 3.0) || (!(lambda1 > 1.0) && !boundary)) {
    throw PreconditionError("Weber solve needs 1 < lambda1 < 3, got " + std::to_string(lambda1));
  }
  if (!(x_left <= -8.0 && x_left >= -35.0)) {
    throw PreconditionError("x_left must lie in [-35, -8]");
  }
  if (!(x_right >= 8.0)) throw PreconditionError("x_right must be >= 8");
  if (!(norm_x > x_left && norm_x < x_right) || !(norm_value > 0.0)) {
    throw PreconditionError("normalization point must be inside the range with a positive value");
  }
  const double n = options.samples_per_unit;
  const long m0 = lattice_index(x_left, n);
  const long m1 = lattice_index(x_right, n);
  if (m0 == std::numeric_limits<long>::min() || m1 == std::numeric_limits<long>::min()) {
    throw PreconditionError("x_left and x_right must be multiples of 1/samples_per_unit");
  }

  WeberSolution w;
  w.lambda1 = lambda1;
  w.x_left = x_left;
  w.x_right = x_right;
  w.samples_per_unit = n;
  w.ode = options.ode;
  w.boundary_case = boundary;
  w.reliable_right = boundary ? std::min(x_right, options.boundary_reliable_right) : x_right;

  std::vector<double> xs(static_cast<std::size_t>(m1 - m0 + 1));
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = static_cast<double>(m0 + static_cast<long>(i)) / n;

  const double p = 0.5 * (lambda1 - 1.0);
  State2 y{1.0, p / x_left - x_left};
  double log_scale = p * std::log(std::sqrt(2.0) * std::abs(x_left)) - 0.5 * x_left * x_left;
  std::vector<State2> mantissa;
  std::vector<double> scales;
  mantissa.reserve(xs.size());
  scales.reserve(xs.size());

  const Rhs2 rhs = weber_system(lambda1);
  for (std::size_t start = 0; start + 1 < xs.size(); start += kSegment) {
    const std::size_t stop = std::min(start + kSegment, xs.size() - 1);
    std::span<const double> chunk(xs.data() + start, stop - start + 1);
    bool first = true;
    y = integrate_samples(
        rhs, y, chunk,
        [&](const State2& s, double) {
          if (first && start > 0) {
            first = false;
            return;
          }
          first = false;
          mantissa.push_back(s);
          scales.push_back(log_scale);
        },
        options.ode);
    const double big = std::max(std::abs(y[0]), std::abs(y[1]));
    if (big > kRescaleAbove) {
      y[0] /= big;
      y[1] /= big;
      log_scale += std::log(big);
    }
  }

  const long mn = lattice_index(norm_x, n);
  if (mn == std::numeric_limits<long>::min()) throw PreconditionError("normalization point is not a sample");
  const auto kn = static_cast<std::size_t>(mn - m0);
  if (!(mantissa[kn][0] > 0.0)) throw ConvergenceError("W is not positive at the normalization point");
  const double norm_log = std::log(norm_value) - (std::log(mantissa[kn][0]) + scales[kn]);

  w.samples.resize(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = std::exp(scales[i] + norm_log);
    WeberSample& s = w.samples[i];
    s.x = xs[i];
    s.w = mantissa[i][0] * f;
    s.dw = mantissa[i][1] * f;
    s.log_abs_w = std::log(std::abs(mantissa[i][0])) + scales[i] + norm_log;
    if (!std::isfinite(s.w) || !std::isfinite(s.dw)) {
      std::ostringstream os;
      os << "W overflows the sampled representation at x=" << s.x << " (log|W| = " << s.log_abs_w
         << "); reduce x_right";
      throw PreconditionError(os.str());
    }
  }

  // Sign changes of W and W' inside the trusted range, refined on the ODE solution.
  const std::size_t last = static_cast<std::size_t>(
      std::upper_bound(xs.begin(), xs.end(), w.reliable_right + 1e-12) - xs.begin());
  for (std::size_t i = 1; i < last; ++i) {
    const WeberSample& s0 = w.samples[i - 1];
    const WeberSample& s1 = w.samples[i];
    if ((s0.dw > 0.0) != (s1.dw > 0.0)) {
      w.critical_points.push_back(
          find_root([&w](double x) { return w.evaluate(x)[1]; }, s0.x, s1.x));
    }
    if ((s0.w > 0.0) != (s1.w > 0.0)) {
      w.zeros.push_back(find_root([&w](double x) { return w.evaluate(x)[0]; }, s0.x, s1.x));
    }
  }
  w.a = w.critical_points.empty() ? std::numeric_limits<double>::quiet_NaN() : -w.critical_points.front();
  for (double z : w.zeros) {
    if (z > 3.0) {
      w.z0 = z;
      break;
    }
  }

  const double h = 1.0 / n;
  for (std::size_t i = 2; i + 2 < last; ++i) {
    const auto& s = w.samples;
    const double d2 = (-s[i + 2].dw + 8.0 * s[i + 1].dw - 8.0 * s[i - 1].dw + s[i - 2].dw) / (12.0 * h);
    const double rhs_v = (s[i].x * s[i].x - lambda1) * s[i].w;
    const double scale = std::abs(d2) + std::abs(rhs_v) + std::abs(s[i].w);
    if (scale == 0.0) continue;
    const double r = std::abs(d2 - rhs_v) / scale;
    if (r > w.max_residual) {
      w.max_residual = r;
      w.max_residual_x = s[i].x;
    }
  }

  std::vector<double> fx, fy;
  for (const auto& s : w.samples) {
    if (s.x > x_left + 2.0 + 1e-12) break;
    fx.push_back(std::log(std::abs(s.x)));
    fy.push_back(s.log_abs_w + 0.5 * s.x * s.x);
  }
  w.decay_slope = fit_line(fx, fy).coefficients[1];

  if (boundary) {
    w.growth_slope = w.growth_power = w.growth_rate = std::numeric_limits<double>::quiet_NaN();
  } else {
    fx.clear();
    fy.clear();
    std::vector<double> raw;
    for (const auto& s : w.samples) {
      if (s.x < x_right - 2.0 - 1e-12) continue;
      fx.push_back(s.x);
      fy.push_back(s.log_abs_w - 0.5 * s.x * s.x);
      raw.push_back(s.log_abs_w);
    }
    std::vector<double> lx(fx.size());
    std::transform(fx.begin(), fx.end(), lx.begin(), [](double x) { return std::log(x); });
    w.growth_slope = fit_line(lx, fy).coefficients[1];
    const LinearFit free = least_squares(
        fx, raw, {[](double) { return 1.0; }, [](double x) { return std::log(x); }, [](double x) { return x * x; }});
    w.growth_power = free.coefficients[1];
    w.growth_rate = free.coefficients[2];
  }
  return w;
}

WeberSolution solve_weber(double lambda1, double x_left, double x_right, const Eigenfunction& u1,
                          const WeberOptions& options) {
  return solve_weber(lambda1, x_left, x_right, -3.0, u1.at(-3.0), options);
}

bool WeberPropertyReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const PropertyCheck& c) { return !c.applicable || c.passed; });
}

WeberPropertyReport check_properties(const WeberSolution& w) {
  WeberPropertyReport rep;
  auto add = [&rep](std::string name, bool applicable, bool passed, double value, std::string detail) {
    rep.checks.push_back({std::move(name), applicable, passed, value, std::move(detail)});
  };
  auto trusted = [&w](const WeberSample& s) { return s.x <= w.reliable_right + 1e-12; };

  {
    double lowest = std::numeric_limits<double>::infinity();
    double where = w.x_left;
    for (const auto& s : w.samples) {
      if (s.x > 3.0 + 1e-12) break;
      if (s.w < lowest) {
        lowest = s.w;
        where = s.x;
      }
    }
    std::ostringstream os;
    os << "min W on [x_left, 3] = " << lowest << " at x=" << where;
    add("(i) W > 0 on [x_left, 3]", true, lowest > 0.0, lowest, os.str());
  }

  {
    const bool one = w.critical_points.size() == 1;
    bool shape = one;
    double where = 0.0;
    if (one) {
      const double xc = w.critical_points.front();
      for (const auto& s : w.samples) {
        if (!trusted(s)) break;
        if (std::abs(s.x - xc) < 1e-12) continue;
        if ((s.x < xc && !(s.dw > 0.0)) || (s.x > xc && !(s.dw < 0.0))) {
          shape = false;
          where = s.x;
          break;
        }
      }
    }
    std::ostringstream os;
    os << w.critical_points.size() << " critical point(s)";
    if (one) os << " at x=" << w.critical_points.front();
    if (one && !shape) os << "; W' has the wrong sign at x=" << where;
    add("(ii) unique critical point, W' > 0 left and < 0 right", true, shape, w.critical_points.size(),
        os.str());
  }

  if (w.boundary_case) {
    const bool at_zero = w.critical_points.size() == 1 && std::abs(w.a) <= 1e-9;
    add("(ii') critical point at 0 for lambda1 = 1", true, at_zero, w.a,
        "a = " + std::to_string(w.a));
    add("(ii'') a > 0", false, false, w.a, "lambda1 = 1 boundary case: a = 0");
  } else {
    std::ostringstream os;
    os << "a = " << w.a;
    add("(ii') a > 0", true, w.a > 0.0, w.a, os.str());
  }
  {
    const double bound = std::sqrt(w.lambda1);
    std::ostringstream os;
    os << "|a| = " << std::abs(w.a) << ", sqrt(lambda1) = " << bound;
    add("(ii'') |a| < sqrt(lambda1)", true, std::abs(w.a) < bound, std::abs(w.a), os.str());
  }

  if (w.boundary_case) {
    add("(iii) one zero z0 > 3, W -> -infinity", false, false, 0.0,
        "lambda1 = 1 boundary case: W is the Gaussian, it has no zero");
  } else {
    bool ok = w.zeros.size() == 1 && w.z0.has_value();
    double where = 0.0;
    if (ok) {
      for (const auto& s : w.samples) {
        if (s.x <= *w.z0) continue;
        if (!(s.w < 0.0) || !(s.dw < 0.0)) {
          ok = false;
          where = s.x;
          break;
        }
      }
    }
    std::ostringstream os;
    os << w.zeros.size() << " zero(s)";
    if (w.z0) os << ", z0 = " << *w.z0 << ", W(x_right) = " << w.samples.back().w;
    if (!ok && where != 0.0) os << "; W not negative and decreasing at x=" << where;
    add("(iii) one zero z0 > 3, W negative and decreasing beyond it", true, ok, w.z0.value_or(0.0),
        os.str());
  }

  {
    const double p = 0.5 * (w.lambda1 - 1.0);
    const double tol = std::max(kSlopeTolerance * std::abs(p), 1e-8);
    std::ostringstream os;
    os << "slope " << w.decay_slope << " vs (lambda1-1)/2 = " << p;
    add("(iv) decay-side slope", true, std::abs(w.decay_slope - p) <= tol, w.decay_slope, os.str());
  }

  if (w.boundary_case) {
    add("(v) growth-side slope", false, false, 0.0, "lambda1 = 1 boundary case: no growing part");
  } else {
    const double expected = -0.5 * (w.lambda1 + 1.0);
    std::ostringstream os;
    os << "slope " << w.growth_slope << " vs -(lambda1+1)/2 = " << expected;
    add("(v) growth-side slope", true,
        std::abs(w.growth_slope - expected) <= kSlopeTolerance * std::abs(expected), w.growth_slope,
        os.str());
  }

  {
    std::ostringstream os;
    os << "max relative residual " << w.max_residual << " at x=" << w.max_residual_x;
    add("ODE residual <= 1e-8", true, w.max_residual <= kResidualTolerance, w.max_residual, os.str());
  }
  return rep;
}

bool MatchingReport::holds() const {
  return sup_left <= tolerance && sup_right <= tolerance && derivative_mismatch <= tolerance;
}

MatchingReport compute_c(const WeberSolution& w, const Eigenfunction& u1) {
  if (!w.has_sample(-3.0) || !w.has_sample(0.0)) {
    throw PreconditionError("Weber samples must include -3 and 0");
  }
  const double w3 = w.sample_at(-3.0).w;
  if (std::abs(u1.at(-3.0) - w3) > 1e-12 * std::abs(w3)) {
    throw PreconditionError("u1 and W are not normalized at the same point -3");
  }
  MatchingReport r;
  r.c = u1.at(0.0) / w.sample_at(0.0).w;

  for (std::size_t i = 0; i < u1.grid.n; ++i) {
    const double x = u1.grid.x(i);
    if (x <= -3.0 && w.has_sample(x)) {
      const double d = std::abs(u1.values[i] - w.sample_at(x).w);
      if (d > r.sup_left) {
        r.sup_left = d;
        r.sup_left_x = x;
      }
    }
    if (x >= -2.0 && x <= 4.0 && w.has_sample(-x)) {
      const double d = std::abs(u1.values[i] - r.c * w.sample_at(-x).w);
      if (d > r.sup_right) {
        r.sup_right = d;
        r.sup_right_x = x;
      }
    }
  }

  if (std::isfinite(w.a)) {
    r.du1_at_crit = u1.derivative(-w.a);
    r.cdw_reflected = -r.c * w.evaluate(w.a)[1];
    r.derivative_mismatch = std::abs(r.du1_at_crit - r.cdw_reflected);
  } else {
    r.derivative_mismatch = std::numeric_limits<double>::infinity();
  }
  return r;
}

}  // namespace qiso
