#include "qiso/traces.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qiso/error.hpp"

namespace qiso {

namespace {

constexpr double kQuadTol = 1e-14;
constexpr double kInnerTol = 1e-13;
constexpr double kWeylResidualThreshold = 1e-4;
constexpr std::size_t kMinFitEntries = 5;

double gk(const std::function<double(double)>& f, double a, double b, double tol = kQuadTol,
          unsigned depth = 20) {
  if (!(b > a)) return 0.0;
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, depth, tol, &err);
}

// Integral over xi of f(xi^2 + v).
double xi_integral(const TestFunction& f, double v) {
  switch (f.kind) {
    case TestFunction::Kind::zero:
      return 0.0;
    case TestFunction::Kind::exponential:
      return std::sqrt(std::numbers::pi / f.scale) * std::exp(-f.scale * v);
    case TestFunction::Kind::bump: {
      if (v >= f.hi) return 0.0;
      const double a = std::sqrt(std::max(0.0, f.lo - v));
      const double b = std::sqrt(f.hi - v);
      return 2.0 * gk([&f, v](double xi) { return f(xi * xi + v); }, a, b, kInnerTol, 12);
    }
  }
  return 0.0;
}

std::size_t tail_start(double cutoff, double h) {
  // smallest j with (2j - 1) h >= cutoff
  return static_cast<std::size_t>(std::max(1.0, std::ceil(0.5 * (cutoff / h + 1.0))));
}

double exponential_tail(double s, double h, double cutoff, std::size_t m) {
  const std::size_t jstar = std::max(tail_start(cutoff, h), m + 1);
  const double flat = static_cast<double>(jstar - 1 - std::min(jstar - 1, m)) * std::exp(-s * cutoff);
  const double geometric =
      std::exp(-s * (2.0 * static_cast<double>(jstar) - 1.0) * h) / (1.0 - std::exp(-2.0 * s * h));
  return flat + geometric;
}

Spectrum window_spectrum(const PotentialSpec& p, double h, double cutoff,
                         const SpectralOptions& options) {
  const double L = Grid::half_length_for(cutoff);
  const Grid coarse{L, options.coarse_n};
  const Grid fine = coarse.refined();
  const double tol = options.tol.value_or(default_tolerance(cutoff));
  try {
    return refine(discretize(p, h, coarse, cutoff), discretize(p, h, fine, cutoff), cutoff, tol);
  } catch (const PreconditionError& e) {
    throw PreconditionError(std::string("spectral density window: ") + e.what());
  }
}

}  // namespace

TestFunction TestFunction::exponential(double s) {
  if (!(s > 0.0)) throw PreconditionError("exponential test function needs scale > 0");
  TestFunction f;
  f.kind = Kind::exponential;
  f.scale = s;
  return f;
}

TestFunction TestFunction::bump(double lo, double hi) {
  if (!(hi > lo)) throw PreconditionError("bump test function needs lo < hi");
  TestFunction f;
  f.kind = Kind::bump;
  f.lo = lo;
  f.hi = hi;
  return f;
}

TestFunction TestFunction::zero() {
  TestFunction f;
  f.kind = Kind::zero;
  return f;
}

double TestFunction::operator()(double E) const {
  switch (kind) {
    case Kind::zero:
      return 0.0;
    case Kind::exponential:
      return std::exp(-scale * E);
    case Kind::bump:
      return bump_eval(BumpSpec{0.5 * (lo + hi), 0.5 * (hi - lo), 1.0}, E);
  }
  return 0.0;
}

std::string TestFunction::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::zero:
      os << "f = 0";
      break;
    case Kind::exponential:
      os << "f = exp(-" << scale << " E)";
      break;
    case Kind::bump:
      os << "f = bump on (" << lo << ", " << hi << ")";
      break;
  }
  return os.str();
}

SpectralDensity spectral_density(const PotentialSpec& p, double h, const TestFunction& f,
                                 const SpectralOptions& options) {
  if (!(h > 0.0)) throw PreconditionError("h must be positive");
  SpectralDensity out;
  if (f.kind == TestFunction::Kind::zero) return out;

  Spectrum s;
  if (f.kind == TestFunction::Kind::bump) {
    out.cutoff = f.hi;
    s = window_spectrum(p, h, out.cutoff, options);
  } else {
    const double sc = f.scale;
    double cutoff = (std::log(1.0 / options.tail_target) - std::log1p(-std::exp(-2.0 * sc * h))) / sc;
    for (int attempt = 0;; ++attempt) {
      s = window_spectrum(p, h, cutoff, options);
      out.tail_bound = exponential_tail(sc, h, cutoff, s.size());
      if (out.tail_bound <= options.tail_target) break;
      if (attempt == 8) {
        std::ostringstream os;
        os << "tail bound " << out.tail_bound << " above " << options.tail_target
           << " at cutoff " << cutoff;
        throw PreconditionError(os.str());
      }
      cutoff *= 1.25;
    }
    out.cutoff = cutoff;
  }
  if (s.size() > options.max_count) {
    throw PreconditionError("spectral density window exceeds the eigenvalue cap");
  }
  out.count = s.size();
  for (std::size_t j = 0; j < s.size(); ++j) {
    const double l = s.eigenvalues[j];
    out.value += f(l);
    const double e = std::max(s.error_estimate[j], 1e-9);
    out.error_estimate += std::abs(f(l + e) - f(l - e)) * 0.5;
  }
  return out;
}

double weyl_term(const PotentialSpec& p, const TestFunction& f) {
  if (f.kind == TestFunction::Kind::zero) return 0.0;
  const double X = f.kind == TestFunction::Kind::exponential ? std::sqrt(50.0 / f.scale)
                                                              : std::sqrt(std::max(0.0, f.hi));
  if (X == 0.0) return 0.0;
  std::vector<double> cuts{-X, 0.0, X};
  for (const BumpSpec& b : {p.alpha, p.beta}) {
    for (double c : {b.lower(), b.center, b.upper()}) {
      cuts.push_back(c);
      cuts.push_back(-c);
    }
  }
  std::erase_if(cuts, [X](double c) { return c < -X || c > X; });
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  auto integrand = [&](double x) { return xi_integral(f, potential_eval(p, x)); };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += gk(integrand, cuts[i], cuts[i + 1]);
  return total;
}

CsvTable WeylConsistency::csv() const {
  CsvTable t({"h", "scaled_nu", "fit", "residual"});
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double h2 = h[i] * h[i];
    const double model = fit.coefficients[0] + fit.coefficients[1] * h2 + fit.coefficients[2] * h2 * h2;
    t.add(h[i], scaled[i], model, scaled[i] - model);
  }
  return t;
}

WeylConsistency weyl_consistency(const PotentialSpec& p, const TestFunction& f,
                                 std::span<const double> h_grid, const SpectralOptions& options) {
  if (h_grid.size() < 6) throw PreconditionError("Weyl consistency needs at least 6 h values");
  for (double h : h_grid) {
    if (!(h >= 0.02 && h <= 0.5)) throw PreconditionError("Weyl consistency h values must lie in [0.02, 0.5]");
  }
  WeylConsistency w;
  w.a0 = weyl_term(p, f);
  for (double h : h_grid) {
    w.h.push_back(h);
    w.scaled.push_back(2.0 * std::numbers::pi * h * spectral_density(p, h, f, options).value);
  }
  w.fit = least_squares(w.h, w.scaled,
                        {[](double) { return 1.0; }, [](double h) { return h * h; },
                         [](double h) { return h * h * h * h; }});
  w.a0_fit = w.fit.coefficients[0];
  w.a0_fit_error = w.fit.standard_errors[0];
  w.a1 = w.fit.coefficients[1];
  w.a1_error = w.fit.standard_errors[1];
  for (std::size_t i = 0; i < w.h.size(); ++i) {
    const double h2 = w.h[i] * w.h[i];
    const double model = w.fit.coefficients[0] + w.a1 * h2 + w.fit.coefficients[2] * h2 * h2;
    w.max_residual = std::max(w.max_residual, std::abs(w.scaled[i] - model));
  }
  w.contaminated = w.max_residual > kWeylResidualThreshold * std::max(1.0, std::abs(w.a0));
  return w;
}

GapEntry isospectral_distance(double h, double E, const PotentialSpec& p_plus,
                              const PotentialSpec& p_minus, const Grid& coarse, const Grid& fine,
                              std::optional<double> tol) {
  const PairedSpectrum ps = refine_pair(p_plus, p_minus, h, E, coarse, fine, tol);
  GapEntry g;
  g.h = h;
  g.E = E;
  g.count = ps.size();
  g.differences = ps.difference;
  g.difference_errors = ps.difference_error;
  for (std::size_t j = 0; j < ps.size(); ++j) {
    const double d = std::abs(ps.difference[j]);
    if (d > g.D || g.j_max == 0) {
      g.D = d;
      g.j_max = j + 1;
    }
    g.error = std::max(g.error, ps.difference_error[j]);
  }
  return g;
}

GapFit fit_gap_decay(std::span<const double> h, std::span<const double> D) {
  if (h.size() != D.size()) throw PreconditionError("gap fit needs matching h and D");
  if (h.size() < kMinFitEntries) {
    throw PreconditionError("gap fit needs at least 5 entries above the noise floor, got " +
                            std::to_string(h.size()));
  }
  std::vector<double> inv(h.size()), logh(h.size()), logd(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] > 0.0) || !(D[i] > 0.0)) throw PreconditionError("gap fit needs positive h and D");
    inv[i] = 1.0 / h[i];
    logh[i] = std::log(h[i]);
    logd[i] = std::log(D[i]);
  }
  const LinearFit e = fit_line(inv, logd);
  const LinearFit q = fit_line(logh, logd);
  GapFit g;
  g.used = h.size();
  g.C = std::exp(e.coefficients[0]);
  g.c = -e.coefficients[1];
  g.r_squared = e.r_squared;
  g.power_exponent = q.coefficients[1];
  g.power_r_squared = q.r_squared;
  g.prefers_power_law = q.rss < e.rss;
  g.poor = g.r_squared < 0.98 || g.prefers_power_law;
  return g;
}

std::size_t GapCurve::usable_count() const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [](const GapEntry& e) { return e.usable; }));
}

CsvTable GapCurve::csv() const {
  CsvTable t({"h", "E", "D", "usable", "error", "j_max", "count"});
  for (const auto& e : entries) t.add(e.h, e.E, e.D, e.usable, e.error, e.j_max, e.count);
  return t;
}

nlohmann::json GapCurve::to_json() const {
  nlohmann::json j;
  j["noise_floor"] = noise_floor;
  j["entries"] = nlohmann::json::array();
  for (const auto& e : entries) {
    j["entries"].push_back({{"h", e.h}, {"E", e.E}, {"D", e.D}, {"usable", e.usable},
                            {"error", e.error}, {"j_max", e.j_max}, {"count", e.count}});
  }
  if (fit) {
    j["fit"] = {{"C", fit->C},
                {"c", fit->c},
                {"r_squared", fit->r_squared},
                {"used", fit->used},
                {"power_exponent", fit->power_exponent},
                {"power_r_squared", fit->power_r_squared},
                {"poor", fit->poor}};
  } else {
    j["fit"] = nullptr;
    j["fit_failure"] = fit_failure;
  }
  j["decay_witness"] = nlohmann::json::array();
  for (const auto& [N, ok] : decay_witness) j["decay_witness"].push_back({{"N", N}, {"decreasing", ok}});
  return j;
}

std::vector<double> log_spaced(double h_max, double h_min, std::size_t count) {
  if (count < 2 || !(h_max > h_min) || !(h_min > 0.0)) {
    throw PreconditionError("log spacing needs h_max > h_min > 0 and at least 2 points");
  }
  std::vector<double> hs(count);
  const double a = std::log(h_max), b = std::log(h_min);
  for (std::size_t k = 0; k < count; ++k) {
    hs[k] = std::exp(a + (b - a) * static_cast<double>(k) / static_cast<double>(count - 1));
  }
  hs.front() = h_max;
  hs.back() = h_min;
  return hs;
}

bool decays_faster_than(std::span<const double> h, std::span<const double> D, int N) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < h.size(); ++i) pts.emplace_back(h[i], D[i]);
  std::sort(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.first > b.first; });
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double prev = pts[i - 1].second / std::pow(pts[i - 1].first, N);
    const double cur = pts[i].second / std::pow(pts[i].first, N);
    if (!(cur < prev)) return false;
  }
  return true;
}

GapCurve gap_sweep(const PotentialSpec& p_plus, const PotentialSpec& p_minus,
                   std::span<const double> hs, double E, const Grid& coarse, const Grid& fine,
                   std::optional<double> tol) {
  GapCurve curve;
  double worst = 0.0;
  for (double h : hs) {
    curve.entries.push_back(isospectral_distance(h, E, p_plus, p_minus, coarse, fine, tol));
    worst = std::max(worst, curve.entries.back().error);
  }
  curve.noise_floor = std::max(1e-12, 10.0 * worst);
  std::vector<double> uh, ud;
  for (auto& e : curve.entries) {
    e.usable = e.count > 0 && e.D > curve.noise_floor;
    if (e.usable) {
      uh.push_back(e.h);
      ud.push_back(e.D);
    }
  }
  for (int N : {2, 4, 6, 8}) curve.decay_witness.emplace_back(N, decays_faster_than(uh, ud, N));
  try {
    curve.fit = fit_gap_decay(uh, ud);
  } catch (const PreconditionError& e) {
    curve.fit_failure = e.what();
  }
  return curve;
}

}  // namespace qiso
