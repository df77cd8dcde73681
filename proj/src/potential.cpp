#include "qiso/potential.hpp"

#include <cmath>
#include <sstream>

namespace qiso {

namespace {

// Support windows required for the two bumps.
constexpr double kAlphaLo = -3.0;
constexpr double kAlphaHi = -2.0;
constexpr double kBetaLo = 3.0;
constexpr double kBetaHi = 4.0;
constexpr double kSupportSlack = 1e-12;

// |2x| on the bump supports.
constexpr double kAlphaSlopeLimit = 4.0;
constexpr double kBetaSlopeLimit = 6.0;

constexpr double kSamplingStep = 1e-3;
constexpr double kSamplingHalfWidth = 5.0;

double mollifier(double u) {
  const double s = 1.0 - u * u;
  return std::exp(1.0 - 1.0 / s);
}

void check_support(const BumpSpec& b, const char* name, double lo, double hi,
                   std::vector<ValidationIssue>& issues) {
  if (!(b.half_width > 0.0)) {
    issues.push_back({std::string(name) + ".half_width > 0", b.center,
                      "half_width = " + std::to_string(b.half_width)});
    return;
  }
  if (!(b.amplitude >= 0.0)) {
    issues.push_back({std::string(name) + ".amplitude >= 0", b.center,
                      "amplitude = " + std::to_string(b.amplitude)});
  }
  if (b.lower() < lo - kSupportSlack || b.upper() > hi + kSupportSlack) {
    std::ostringstream os;
    os << "support (" << b.lower() << ", " << b.upper() << ") not inside (" << lo << ", " << hi
       << ")";
    issues.push_back({std::string(name) + " support", b.lower() < lo ? b.lower() : b.upper(),
                      os.str()});
  }
}

}  // namespace

double bump_eval(const BumpSpec& b, double x) {
  const double u = (x - b.center) / b.half_width;
  if (!(std::abs(u) < 1.0)) return 0.0;
  return b.amplitude * mollifier(u);
}

double bump_derivative(const BumpSpec& b, double x) {
  const double u = (x - b.center) / b.half_width;
  if (!(std::abs(u) < 1.0)) return 0.0;
  const double s = 1.0 - u * u;
  return b.amplitude * mollifier(u) * (-2.0 * u / (s * s)) / b.half_width;
}

double bump_max_abs_derivative(const BumpSpec& b) {
  // d/du log|g'(u)| = 0 reduces to 1 - 3 u^4 = 0.
  const double u = std::pow(3.0, -0.25);
  const double s = 1.0 - u * u;
  return std::abs(b.amplitude) * mollifier(u) * (2.0 * u / (s * s)) / b.half_width;
}

double bump_at(const BumpSpec& b, double x, bool reflected) {
  return bump_eval(b, reflected ? -x : x);
}

PotentialSpec PotentialSpec::harmonic() { return plus(0.0, 0.0); }

PotentialSpec PotentialSpec::plus(double t, double eps) {
  PotentialSpec p;
  p.t = t;
  p.eps = eps;
  p.reflect_beta = false;
  return p;
}

PotentialSpec PotentialSpec::minus(double t, double eps) {
  PotentialSpec p = plus(t, eps);
  p.reflect_beta = true;
  return p;
}

PotentialSpec PotentialSpec::partner() const {
  PotentialSpec p = *this;
  p.reflect_beta = !reflect_beta;
  return p;
}

double potential_eval(const PotentialSpec& p, double x) {
  double v = x * x;
  if (p.t != 0.0) v += p.t * bump_eval(p.alpha, x);
  if (p.eps != 0.0) v += p.eps * bump_at(p.beta, x, p.reflect_beta);
  return v;
}

double potential_derivative(const PotentialSpec& p, double x) {
  double d = 2.0 * x;
  if (p.t != 0.0) d += p.t * bump_derivative(p.alpha, x);
  if (p.eps != 0.0) {
    d += p.reflect_beta ? -p.eps * bump_derivative(p.beta, -x) : p.eps * bump_derivative(p.beta, x);
  }
  return d;
}

std::string ValidationReport::summary() const {
  if (passed()) return "ok";
  std::ostringstream os;
  for (std::size_t i = 0; i < issues.size(); ++i) {
    if (i) os << "; ";
    os << issues[i].constraint << " at x=" << issues[i].where << ": " << issues[i].detail;
  }
  return os.str();
}

ValidationReport validate(const PotentialSpec& p) {
  ValidationReport r;
  r.sampling_step = kSamplingStep;
  if (!(p.t >= 0.0)) r.issues.push_back({"t >= 0", 0.0, "t = " + std::to_string(p.t)});
  if (!(p.eps >= 0.0)) r.issues.push_back({"eps >= 0", 0.0, "eps = " + std::to_string(p.eps)});
  check_support(p.alpha, "alpha", kAlphaLo, kAlphaHi, r.issues);
  check_support(p.beta, "beta", kBetaLo, kBetaHi, r.issues);
  if (!r.passed()) return r;

  r.alpha_slope_bound = p.t * bump_max_abs_derivative(p.alpha);
  r.beta_slope_bound = p.eps * bump_max_abs_derivative(p.beta);
  if (!(r.alpha_slope_bound < kAlphaSlopeLimit)) {
    r.issues.push_back({"t*max|alpha'| < 4", p.alpha.center,
                        "bound = " + std::to_string(r.alpha_slope_bound)});
  }
  if (!(r.beta_slope_bound < kBetaSlopeLimit)) {
    r.issues.push_back({"eps*max|beta'| < 6", p.reflect_beta ? -p.beta.center : p.beta.center,
                        "bound = " + std::to_string(r.beta_slope_bound)});
  }

  // V' must carry the sign of x away from the origin.  Report the first
  // offending sample on each side.
  const auto steps = static_cast<long>(std::lround(kSamplingHalfWidth / kSamplingStep));
  for (int side : {-1, 1}) {
    for (long i = 1; i <= steps; ++i) {
      const double x = side * static_cast<double>(i) * kSamplingStep;
      const double d = potential_derivative(p, x);
      if (!(d * side > 0.0)) {
        std::ostringstream os;
        os << "V'(" << x << ") = " << d;
        r.issues.push_back({"no critical point besides x=0", x, os.str()});
        break;
      }
    }
  }
  return r;
}

void to_json(nlohmann::json& j, const BumpSpec& b) {
  j = nlohmann::json{{"center", b.center}, {"half_width", b.half_width}, {"amplitude", b.amplitude}};
}

void from_json(const nlohmann::json& j, BumpSpec& b) {
  b.center = j.value("center", b.center);
  b.half_width = j.value("half_width", b.half_width);
  b.amplitude = j.value("amplitude", b.amplitude);
}

void to_json(nlohmann::json& j, const PotentialSpec& p) {
  j = nlohmann::json{{"t", p.t},
                     {"eps", p.eps},
                     {"reflect_beta", p.reflect_beta},
                     {"alpha", p.alpha},
                     {"beta", p.beta}};
}

void from_json(const nlohmann::json& j, PotentialSpec& p) {
  p.t = j.value("t", p.t);
  p.eps = j.value("eps", p.eps);
  p.reflect_beta = j.value("reflect_beta", p.reflect_beta);
  if (j.contains("alpha")) j.at("alpha").get_to(p.alpha);
  if (j.contains("beta")) j.at("beta").get_to(p.beta);
}

}  // namespace qiso
