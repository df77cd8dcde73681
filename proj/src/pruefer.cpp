#include "qiso/pruefer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qiso/error.hpp"

namespace qiso {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> sample_points(double x0, double x1, double step) {
  if (!(x1 > x0)) throw PreconditionError("integration interval needs x0 < x1");
  if (!(step > 0.0)) throw PreconditionError("sample step must be positive");
  const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil((x1 - x0) / step - 1e-9)));
  std::vector<double> xs(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    xs[i] = x0 + (x1 - x0) * static_cast<double>(i) / static_cast<double>(n);
  }
  xs.back() = x1;
  return xs;
}

Rhs2 angle_system(const CoefficientQ& q) {
  return [q](const State2& y, State2& dy, double x) {
    const double qx = q(x);
    const double s = std::sin(y[0]);
    const double c = std::cos(y[0]);
    dy[0] = qx * s * s + c * c;
    dy[1] = (1.0 - qx) * s * c;
  };
}

}  // namespace

CoefficientQ CoefficientQ::constant(double q) {
  CoefficientQ c;
  c.kind = Kind::constant;
  c.value = q;
  return c;
}

CoefficientQ CoefficientQ::harmonic(double lambda, double h) {
  CoefficientQ c;
  c.kind = Kind::harmonic;
  c.lambda = lambda;
  c.h = h;
  return c;
}

CoefficientQ CoefficientQ::of(const PotentialSpec& p, double lambda, double h) {
  CoefficientQ c;
  c.kind = Kind::potential;
  c.lambda = lambda;
  c.h = h;
  c.potential = p;
  return c;
}

double CoefficientQ::operator()(double x) const {
  switch (kind) {
    case Kind::constant:
      return value;
    case Kind::harmonic:
      return (lambda - x * x) / (h * h);
    case Kind::potential:
      return (lambda - potential_eval(potential, x)) / (h * h);
  }
  return value;
}

std::string CoefficientQ::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::constant:
      os << "Q = " << value;
      break;
    case Kind::harmonic:
      os << "Q = (" << lambda << " - x^2) / " << h * h;
      break;
    case Kind::potential:
      os << "Q = (" << lambda << " - V(x)) / " << h * h << " with t=" << potential.t
         << " eps=" << potential.eps;
      break;
  }
  return os.str();
}

std::size_t PrueferTrace::node_count() const {
  std::size_t nodes = 0;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const double before = std::floor(samples[i - 1].theta / kPi);
    const double after = std::floor(samples[i].theta / kPi);
    if (after > before && samples[i].theta > 0.0) nodes += static_cast<std::size_t>(after - before);
  }
  return nodes;
}

std::vector<double> PrueferTrace::relative_solution() const {
  const double s0 = std::sin(theta0);
  if (s0 == 0.0) throw PreconditionError("solution vanishes at the start point");
  const double lr0 = samples.front().log_r;
  std::vector<double> u(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    u[i] = std::exp(samples[i].log_r - lr0) * std::sin(samples[i].theta) / s0;
  }
  return u;
}

CsvTable PrueferTrace::csv() const {
  CsvTable t({"x", "theta", "log_r"});
  for (const auto& s : samples) t.add(s.x, s.theta, s.log_r);
  return t;
}

PrueferTrace integrate_angle(const CoefficientQ& q, double x0, double theta0, double x1,
                             const PrueferOptions& options) {
  const std::vector<double> xs = sample_points(x0, x1, options.sample_step);
  PrueferTrace trace;
  trace.x0 = x0;
  trace.theta0 = theta0;
  trace.samples.reserve(xs.size());
  integrate_samples(
      angle_system(q), State2{theta0, 0.0}, xs,
      [&trace](const State2& y, double x) { trace.samples.push_back({x, y[0], y[1]}); },
      options.ode);
  return trace;
}

double end_angle(const CoefficientQ& q, double x0, double theta0, double x1, const OdeOptions& ode) {
  if (!(x1 > x0)) throw PreconditionError("integration interval needs x0 < x1");
  const double xs[2] = {x0, x1};
  const State2 y = integrate_samples(angle_system(q), State2{theta0, 0.0}, xs,
                                     [](const State2&, double) {}, ode);
  return y[0];
}

double shoot_eigenvalue(const PotentialSpec& p, double h, std::size_t j, double L,
                        const ShootingOptions& options) {
  return shoot(p, h, j, L, options).lambda;
}

namespace {

struct Bisection {
  double lambda;
  std::size_t evaluations;
};

Bisection bisect_angle(const PotentialSpec& p, double h, std::size_t j, double L, double lo,
                       double hi, bool expand, double tol, const OdeOptions& ode) {
  const double target = static_cast<double>(j) * kPi;
  std::size_t evals = 0;
  auto miss = [&](double lambda) {
    ++evals;
    return end_angle(CoefficientQ::of(p, lambda, h), -L, 0.0, L, ode) - target;
  };
  auto fail = [&](const char* what, double where) {
    std::ostringstream os;
    os << "bracket failure for j=" << j << " at h=" << h << ": " << what << " lambda=" << where;
    throw ConvergenceError(os.str());
  };
  if (miss(lo) >= 0.0) fail("theta(L) already reaches j*pi at the lower end", lo);
  int grow = 0;
  while (miss(hi) < 0.0) {
    if (!expand || ++grow > 60) fail("theta(L) stays below j*pi at the upper end", hi);
    const double width = hi - lo;
    lo = hi;
    hi += 2.0 * width;
  }
  for (;;) {
    const double mid = lo + 0.5 * (hi - lo);
    if (hi - lo <= tol * std::max(1.0, std::abs(mid)) || !(mid > lo && mid < hi)) {
      return {mid, evals};
    }
    if (miss(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
}

}  // namespace

ShootingResult shoot(const PotentialSpec& p, double h, std::size_t j, double L,
                     const ShootingOptions& options) {
  if (j == 0) throw PreconditionError("eigenvalue index is 1-based");
  if (!(h > 0.0)) throw PreconditionError("h must be positive");
  if (!(L > 0.0)) throw PreconditionError("L must be positive");
  const double bumps = p.t * p.alpha.amplitude + p.eps * p.beta.amplitude;
  const bool explicit_window = options.lambda_lo || options.lambda_hi;
  const double lo = options.lambda_lo.value_or(-h);
  const double hi =
      options.lambda_hi.value_or((2.0 * static_cast<double>(j) + 1.0) * h + bumps + h);
  if (!(hi > lo)) throw PreconditionError("shooting window needs lambda_lo < lambda_hi");

  const Bisection fine = bisect_angle(p, h, j, L, lo, hi, !explicit_window, options.tol, options.ode);

  OdeOptions loose = options.ode;
  loose.abs_tol *= 100.0;
  loose.rel_tol *= 100.0;
  const double delta = 1e-6 * std::max(1.0, std::abs(fine.lambda));
  Bisection rough{};
  try {
    rough = bisect_angle(p, h, j, L, fine.lambda - delta, fine.lambda + delta, false, options.tol,
                         loose);
  } catch (const ConvergenceError&) {
    rough = bisect_angle(p, h, j, L, lo, hi, !explicit_window, options.tol, loose);
  }

  ShootingResult r;
  r.lambda = fine.lambda;
  r.evaluations = fine.evaluations + rough.evaluations;
  r.error_estimate =
      std::abs(fine.lambda - rough.lambda) + options.tol * std::max(1.0, std::abs(fine.lambda));
  return r;
}

AngleComparison compare_angles(const CoefficientQ& q_big, const CoefficientQ& q_small, double x0,
                               double theta0, double x1, const PrueferOptions& options) {
  for (double x : sample_points(x0, x1, options.sample_step)) {
    const double qb = q_big(x), qs = q_small(x);
    if (qs > qb + 1e-15 * std::max(1.0, std::abs(qb))) {
      std::ostringstream os;
      os << "coefficient ordering fails at x=" << x << ": small " << qs << " > big " << qb;
      throw PreconditionError(os.str());
    }
  }
  AngleComparison c;
  c.big = integrate_angle(q_big, x0, theta0, x1, options);
  c.small = integrate_angle(q_small, x0, theta0, x1, options);
  c.min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < c.big.samples.size(); ++i) {
    const double m = c.big.samples[i].theta - c.small.samples[i].theta;
    if (m < c.min_margin) {
      c.min_margin = m;
      c.worst_x = c.big.samples[i].x;
    }
  }
  c.holds = c.min_margin >= -kComparisonTolerance;
  return c;
}

CsvTable SolutionComparison::csv() const {
  CsvTable t({"x", "u_big", "u_small", "margin"});
  for (std::size_t i = 0; i < x.size(); ++i) t.add(x[i], u_big[i], u_small[i], u_small[i] - u_big[i]);
  return t;
}

SolutionComparison compare_solutions(double u_start, const PrueferTrace& big,
                                     const PrueferTrace& small, double a, double b) {
  if (big.x0 != small.x0 || big.theta0 != small.theta0) {
    throw PreconditionError("traces must share the start point and start angle");
  }
  if (!(big.theta0 > 0.0 && big.theta0 <= kPi / 2)) {
    throw PreconditionError("start angle must lie in (0, pi/2]");
  }
  if (big.samples.size() != small.samples.size()) {
    throw PreconditionError("traces must be sampled at the same abscissae");
  }
  for (std::size_t i = 0; i < big.samples.size(); ++i) {
    if (std::abs(big.samples[i].x - small.samples[i].x) > 1e-12) {
      throw PreconditionError("traces must be sampled at the same abscissae");
    }
  }
  if (!(a <= b) || a < big.samples.front().x - 1e-12 || b > big.samples.back().x + 1e-12) {
    throw PreconditionError("comparison interval is not covered by the traces");
  }

  const std::vector<double> rb = big.relative_solution();
  const std::vector<double> rs = small.relative_solution();
  SolutionComparison c;
  c.a = a;
  c.b = b;
  c.min_margin = std::numeric_limits<double>::infinity();
  c.max_margin = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < big.samples.size(); ++i) {
    const double x = big.samples[i].x;
    if (x < a - 1e-12 || x > b + 1e-12) continue;
    for (const PrueferTrace* t : {&big, &small}) {
      const double th = t->samples[i].theta;
      if (!(th > 0.0 && th <= kPi / 2 + kComparisonTolerance)) {
        std::ostringstream os;
        os << "angle " << th << " leaves (0, pi/2] at x=" << x;
        throw PreconditionError(os.str());
      }
    }
    c.x.push_back(x);
    c.u_big.push_back(u_start * rb[i]);
    c.u_small.push_back(u_start * rs[i]);
    const double m = c.u_small.back() - c.u_big.back();
    if (m < c.min_margin) {
      c.min_margin = m;
      c.worst_x = x;
    }
    c.max_margin = std::max(c.max_margin, m);
  }
  if (c.x.empty()) throw PreconditionError("no samples inside the comparison interval");
  c.holds = c.min_margin >= -kComparisonTolerance;
  return c;
}

}  // namespace qiso
