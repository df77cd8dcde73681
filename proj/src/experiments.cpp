#include "qiso/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qiso/error.hpp"
#include "qiso/hadamard.hpp"
#include "qiso/pruefer.hpp"
#include "qiso/traces.hpp"
#include "qiso/weber.hpp"

namespace qiso {

namespace {

std::string num(double v) { return format_number(v); }

template <class... Parts>
std::string cat(const Parts&... parts) {
  std::ostringstream os;
  os.precision(10);
  (os << ... << parts);
  return os.str();
}

PotentialSpec plus_of(const ExperimentConfig& c) {
  PotentialSpec p = c.potential;
  p.reflect_beta = false;
  return p;
}

// Ground-state comparison potential x^2 + t alpha.
PotentialSpec alpha_only(const ExperimentConfig& c) {
  PotentialSpec p = plus_of(c);
  p.eps = 0.0;
  return p;
}

bool is_harmonic(const PotentialSpec& p) {
  return (p.t == 0.0 || p.alpha.amplitude == 0.0) && (p.eps == 0.0 || p.beta.amplitude == 0.0);
}

bool strictly_increasing(const std::vector<double>& v) {
  return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
}

const char* kPlotHeader =
    "import sys\n"
    "import pandas as pd\n"
    "import matplotlib\n"
    "matplotlib.use('Agg')\n"
    "import matplotlib.pyplot as plt\n"
    "d = sys.argv[1] if len(sys.argv) > 1 else '.'\n"
    "p = '@PREFIX@'\n";

struct GroundState {
  Eigenfunction u1;
  WeberSolution w;
};

// Ground state of V+ at h = 1 and the Weber solution matched to it at -3.
GroundState ground_state_and_weber(const ExperimentConfig& c, const PotentialSpec& p,
                                   const WeberOptions& wo = {}) {
  Eigenfunction u1 = refined_eigenfunction(p, 1.0, 1, c.grid.coarse(), c.grid.fine(), c.grid.tol);
  WeberSolution w = solve_weber(u1.eigenvalue, c.weber.x_left, c.weber.x_right, u1, wo);
  return {std::move(u1), std::move(w)};
}

struct RayleighMargin {
  double lambda1 = 0.0;
  double margin = 0.0;  // lambda1 - h from the correlated difference to the harmonic spectrum
  double error = 0.0;
};

RayleighMargin rayleigh_margin(const PotentialSpec& p, double h, const ExperimentConfig& c) {
  const double E = 3.0 * h + p.t * p.alpha.amplitude + p.eps * p.beta.amplitude;
  const PairedSpectrum pair =
      refine_pair(p, PotentialSpec::harmonic(), h, E, c.grid.coarse(), c.grid.fine(), c.grid.tol);
  if (pair.size() == 0) throw ConvergenceError("no eigenvalue below " + num(E));
  RayleighMargin r;
  r.lambda1 = pair.first.eigenvalues[0];
  r.margin = pair.difference[0];
  r.error = pair.difference_error[0] + std::abs(pair.second.eigenvalues[0] - h);
  return r;
}

void check_rayleigh(Report& r, const PotentialSpec& p, std::span<const double> hs,
                    const ExperimentConfig& c, const std::string& tag) {
  CsvTable t({"h", "lambda1", "lambda1_minus_h", "error_estimate"});
  for (double h : hs) {
    const RayleighMargin m = rayleigh_margin(p, h, c);
    t.add(h, m.lambda1, m.margin, m.error);
    r.check(cat("eigensolve: ", tag, " lambda1 > h + 10 * error (h=", num(h), ")"),
            m.margin > 10.0 * m.error, m.margin, 10.0 * m.error,
            cat("lambda1 - h = ", m.margin, ", error ", m.error));
  }
  r.add_table("rayleigh_" + tag, std::move(t),
              "h; lambda1 of the potential; lambda1 - h from the difference to the harmonic spectrum on "
              "shared grids; error estimate of that difference");
}

}  // namespace

Report run_spectrum(const ExperimentConfig& c) {
  Report r;
  r.experiment = "spectrum";
  const PotentialSpec& p = c.potential;
  CsvTable t({"h", "j", "lambda", "error_estimate"});
  nlohmann::json res = nlohmann::json::array();
  for (double h : c.h_list) {
    const Spectrum s = refine(p, h, c.E_window, c.grid.coarse(), c.grid.fine(), c.grid.tol);
    for (std::size_t j = 0; j < s.size(); ++j) t.add(h, j + 1, s.eigenvalues[j], s.error_estimate[j]);
    res.push_back(to_json(s));
    r.check(cat("eigensolve: spectrum strictly increasing (h=", num(h), ")"),
            strictly_increasing(s.eigenvalues), static_cast<double>(s.size()), 0.0,
            cat(s.size(), " eigenvalues below ", c.E_window));
    if (s.size() > 0) {
      r.check(cat("eigensolve: eigenvalues positive (h=", num(h), ")"), s.eigenvalues[0] > 0.0,
              s.eigenvalues[0], 0.0);
    }
    if (is_harmonic(p)) {
      double worst = 0.0;
      for (std::size_t j = 0; j < s.size(); ++j) {
        worst = std::max(worst, std::abs(s.eigenvalues[j] - (2.0 * j + 1.0) * h));
      }
      r.check(cat("eigensolve: harmonic levels (2j-1)h (h=", num(h), ")"), worst <= 1e-9, worst, 1e-9);
    }
  }
  if (!is_harmonic(p)) check_rayleigh(r, p, c.h_list, c, p.reflect_beta ? "minus" : "plus");
  r.results["spectra"] = res;
  r.add_table("spectrum", std::move(t), "h; level index j (1-based); refined eigenvalue; error estimate");
  r.scripts["plot_spectrum.py"] = std::string(kPlotHeader) +
                                  "s = pd.read_csv(f'{d}/{p}spectrum.csv')\n"
                                  "for h, g in s.groupby('h'):\n"
                                  "    plt.plot(g['j'], g['lambda'], 'o-', label=f'h={h}')\n"
                                  "plt.xlabel('j'); plt.ylabel('lambda_j'); plt.legend()\n"
                                  "plt.savefig(f'{d}/{p}spectrum.png', dpi=150)\n";
  return r;
}

Report run_gap_sweep(const ExperimentConfig& c) {
  Report r;
  r.experiment = "gap-sweep";
  const PotentialSpec pp = plus_of(c);
  const PotentialSpec pm = pp.partner();
  const std::vector<double> hs = log_spaced(c.sweep.h_max, c.sweep.h_min, c.sweep.count);
  const GapCurve curve = gap_sweep(pp, pm, hs, c.sweep.E, c.grid.coarse(), c.grid.fine(), c.grid.tol);
  r.results["sweep"] = curve.to_json();
  r.add_table("gap_sweep", curve.csv(),
              "h; energy window E; D = max_j |lambda_j+ - lambda_j-| below E; above the noise floor; "
              "error estimate of D; level attaining D; levels compared");

  const bool exact_t0 = pp.t == 0.0 || pp.alpha.amplitude == 0.0;
  if (exact_t0) {
    r.check("traces: all gaps below noise floor for the reflection pair", curve.usable_count() == 0,
            static_cast<double>(curve.usable_count()), 0.0,
            cat("noise floor ", curve.noise_floor));
  } else {
    r.check("traces: enough gaps above the noise floor to fit", curve.usable_count() >= 5,
            static_cast<double>(curve.usable_count()), 5.0, cat("noise floor ", curve.noise_floor));
    for (const auto& [N, ok] : curve.decay_witness) {
      r.check(cat("traces: D(h)/h^", N, " decreasing as h shrinks"), ok, N, 0.0);
    }
    if (curve.fit) {
      const GapFit& f = *curve.fit;
      r.check("traces: exponential fit rate c > 0", f.c > 0.0, f.c, 0.0, cat("D ~ ", f.C, " exp(-", f.c, "/h)"));
      r.check("traces: exponential fit r^2 >= 0.98", f.r_squared >= 0.98, f.r_squared, 0.98,
              cat("power-law r^2 ", f.power_r_squared, ", exponent ", f.power_exponent));
    } else {
      r.check("traces: exponential fit available", false, 0.0, 0.0, curve.fit_failure);
    }

    const PairedSpectrum g =
        refine_pair(pp, pm, 1.0, 10.0, c.grid.coarse(), c.grid.fine(), c.grid.tol);
    const double gap = std::abs(g.difference.at(0));
    const double err = g.difference_error.at(0);
    r.results["ground_state_gap"] = {{"h", 1.0}, {"lambda1_plus", g.first.eigenvalues[0]},
                                     {"lambda1_minus", g.second.eigenvalues[0]},
                                     {"difference", g.difference[0]}, {"error_estimate", err}};
    r.check("eigensolve: ground-state gap at h=1 exceeds 100x its error", gap > 100.0 * err, gap,
            100.0 * err, cat("lambda1+ - lambda1- = ", g.difference[0]));
  }

  const GapEntry fwd = isospectral_distance(1.0, c.sweep.E, pp, pm, c.grid.coarse(), c.grid.fine(), c.grid.tol);
  const GapEntry bwd = isospectral_distance(1.0, c.sweep.E, pm, pp, c.grid.coarse(), c.grid.fine(), c.grid.tol);
  r.check("traces: isospectral distance symmetric under swapping the pair", fwd.D == bwd.D,
          std::abs(fwd.D - bwd.D), 0.0);

  CsvTable levels({"E", "h", "j", "difference", "difference_error"});
  for (double E : c.sweep.diagnostic_E) {
    const GapCurve d = gap_sweep(pp, pm, hs, E, c.grid.coarse(), c.grid.fine(), c.grid.tol);
    r.results["diagnostic"].push_back(d.to_json());
    for (const auto& e : d.entries) {
      for (std::size_t j = 0; j < e.differences.size(); ++j) {
        levels.add(E, e.h, j + 1, e.differences[j], e.difference_errors[j]);
      }
    }
    std::ostringstream os;
    os << "window E=" << E << ": " << d.usable_count() << " gaps above the floor";
    if (d.fit) os << ", fit c=" << d.fit->c << " r^2=" << d.fit->r_squared;
    for (const auto& [N, ok] : d.decay_witness) os << ", D/h^" << N << (ok ? " decreasing" : " not monotone");
    r.note(os.str());
  }
  if (!c.sweep.diagnostic_E.empty()) {
    r.add_table("gap_levels", std::move(levels),
                "diagnostic window E; h; level j; refined lambda_j+ - lambda_j-; its error estimate");
  }
  r.scripts["plot_gap_sweep.py"] = std::string(kPlotHeader) +
                                   "g = pd.read_csv(f'{d}/{p}gap_sweep.csv')\n"
                                   "u = g[g['usable'] == 1]\n"
                                   "plt.semilogy(1 / g['h'], g['D'], 'o', mfc='none', label='all')\n"
                                   "plt.semilogy(1 / u['h'], u['D'], 'o', label='above floor')\n"
                                   "plt.xlabel('1/h'); plt.ylabel('D(h)'); plt.legend()\n"
                                   "plt.savefig(f'{d}/{p}gap_sweep.png', dpi=150)\n";
  return r;
}

Report run_hadamard(const ExperimentConfig& c) {
  Report r;
  r.experiment = "hadamard-check";
  const PotentialSpec p = plus_of(c);
  const double h = c.h_list.front();
  const std::size_t j = c.hadamard.j;
  const Grid& grid = c.grid.fine();

  const VariationResult v = hadamard_check(p, h, j, p.beta, false, c.hadamard.eps_fd, grid);
  r.check(cat("hadamard: formula matches central difference at eps_fd=", num(v.eps_fd)),
          v.relative_discrepancy <= 1e-4, v.relative_discrepancy, 1e-4,
          cat("formula ", v.formula_value, ", oracle ", v.oracle_value));

  const auto rows = fd_convergence(p, h, j, p.beta, false, c.hadamard.convergence_steps, grid);
  std::vector<VariationResult> all(rows.begin(), rows.end());
  all.push_back(v);
  r.add_table("hadamard", variation_csv(all),
              "level j; h; finite-difference step; dx sum beta u_j^2; central difference of lambda_j; |formula - oracle|");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double ratio = rows[i - 1].discrepancy / rows[i].discrepancy;
    const double step_ratio = rows[i - 1].eps_fd / rows[i].eps_fd;
    const double expect = step_ratio * step_ratio;
    r.check(cat("hadamard: discrepancy shrinks second order, eps_fd ", num(rows[i - 1].eps_fd), " -> ",
                num(rows[i].eps_fd)),
            ratio >= 0.75 * expect && ratio <= 1.25 * expect, ratio, expect);
  }

  const TridiagonalOperator T = discretize(p, h, grid);
  const std::vector<double> ones(grid.n, 1.0);
  const double unit = variational_derivative(T, j, ones);
  r.check("hadamard: constant direction gives 1", std::abs(unit - 1.0) <= 1e-10, unit, 1e-10);
  BumpSpec flat = p.beta;
  flat.amplitude = 0.0;
  const double none = variational_derivative(T, j, sample_direction(flat, false, grid));
  r.check("hadamard: zero direction gives 0", none == 0.0, none, 0.0);
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= 5; ++k) {
    lowest = std::min(lowest, variational_derivative(T, k, sample_direction(p.beta, false, grid)));
  }
  r.check("hadamard: nonnegative direction never lowers an eigenvalue (j<=5)", lowest >= 0.0, lowest, 0.0);

  CsvTable wt({"t", "d_plus", "d_minus", "gap", "error_estimate"});
  const AsymmetryWitness wa = asymmetry_witness(p, h, p.beta);
  wt.add(p.t, wa.d_plus, wa.d_minus, wa.gap, wa.error_estimate);
  PotentialSpec p0 = p;
  p0.t = 0.0;
  const AsymmetryWitness w0 = asymmetry_witness(p0, h, p.beta);
  wt.add(0.0, w0.d_plus, w0.d_minus, w0.gap, w0.error_estimate);
  r.add_table("asymmetry", std::move(wt),
              "t; integral of beta(x) u1^2; integral of beta(-x) u1^2; their difference; error estimate");
  if (!is_harmonic(p) && p.t > 0.0) {
    r.check(cat("hadamard: directional derivatives differ at t=", num(p.t)),
            std::abs(wa.gap) > 100.0 * wa.error_estimate, std::abs(wa.gap), 100.0 * wa.error_estimate);
    const PairedSpectrum g = refine_pair(p, p.partner(), h, 3.0 * h + 1.0, c.grid.coarse(), c.grid.fine(), c.grid.tol);
    const double d = g.difference.at(0);
    r.check("hadamard: sign of the witness matches the sign of lambda1+ - lambda1-",
            (d > 0.0) == (wa.gap > 0.0) && d != 0.0, d, 0.0, cat("witness ", wa.gap));
  }
  if (h == 1.0 && p.t > 0.0) {
    const auto [u1, w] = ground_state_and_weber(c, alpha_only(c));
    const double cm1 = compute_c(w, u1).c - 1.0;
    r.check("hadamard: sign of the witness matches the sign of c - 1", (cm1 > 0.0) == (wa.gap > 0.0) && cm1 != 0.0,
            cm1, 0.0, cat("c - 1 = ", cm1, ", witness ", wa.gap));
  }
  r.check("hadamard: directional derivatives agree at t=0", std::abs(w0.gap) <= 1e-12, std::abs(w0.gap), 1e-12);
  r.results["variation"] = {{"formula", v.formula_value}, {"oracle", v.oracle_value},
                            {"relative_discrepancy", v.relative_discrepancy}};
  r.scripts["plot_hadamard.py"] = std::string(kPlotHeader) +
                                  "v = pd.read_csv(f'{d}/{p}hadamard.csv')\n"
                                  "plt.loglog(v['eps_fd'], v['discrepancy'], 'o-')\n"
                                  "plt.xlabel('eps_fd'); plt.ylabel('|formula - oracle|')\n"
                                  "plt.savefig(f'{d}/{p}hadamard.png', dpi=150)\n";
  return r;
}

Report run_weber(const ExperimentConfig& c) {
  Report r;
  r.experiment = "weber";
  const PotentialSpec p = alpha_only(c);
  r.note("the Weber comparison runs at h = 1 on x^2 + t alpha");
  const auto [u1, w] = ground_state_and_weber(c, p);
  const double lam = u1.eigenvalue;
  r.check("weber: 1 < lambda1 < 3", lam > 1.0 + 10.0 * u1.eigenvalue_error && lam < 3.0, lam, 1.0,
          cat("lambda1 = ", lam, " +- ", u1.eigenvalue_error));

  for (const auto& pc : check_properties(w).checks) {
    if (!pc.applicable) {
      r.note(pc.name + ": " + pc.detail);
      continue;
    }
    r.check("weber: " + pc.name, pc.passed, pc.value, 0.0, pc.detail);
  }

  const MatchingReport m = compute_c(w, u1);
  r.check("weber: u1 = W on [x_left, -3]", m.sup_left <= m.tolerance, m.sup_left, m.tolerance,
          cat("worst at x=", m.sup_left_x));
  r.check("weber: u1 = c W(-x) on [-2, 4]", m.sup_right <= m.tolerance, m.sup_right, m.tolerance,
          cat("worst at x=", m.sup_right_x));
  r.check("weber: u1'(-a) = -c W'(a)", m.derivative_mismatch <= m.tolerance, m.derivative_mismatch,
          m.tolerance, cat("u1'(-a) = ", m.du1_at_crit, ", -c W'(a) = ", m.cdw_reflected));
  r.check("weber: c > 1 with margin", m.c > 1.0 + 1e-7, m.c - 1.0, 1e-7, cat("c = ", m.c));

  WeberOptions dense;
  dense.samples_per_unit = 2000.0;
  const MatchingReport md = compute_c(solve_weber(lam, c.weber.x_left, c.weber.x_right, u1, dense), u1);
  r.check("weber: c unchanged at twice the sampling density", std::abs(md.c - m.c) <= 1e-9,
          std::abs(md.c - m.c), 1e-9);
  const double far_left = std::max(-35.0, c.weber.x_left - 2.0);
  const MatchingReport mf = compute_c(solve_weber(lam, far_left, c.weber.x_right, u1), u1);
  r.check(cat("weber: c unchanged with x_left=", num(far_left)), std::abs(mf.c - m.c) <= 1e-9,
          std::abs(mf.c - m.c), 1e-9);

  CsvTable ct({"t", "lambda1", "c"});
  ct.add(p.t, lam, m.c);
  if (c.weber.t_compare != p.t) {
    PotentialSpec q = p;
    q.t = c.weber.t_compare;
    if (validate(q).passed()) {
      const auto [uq, wq] = ground_state_and_weber(c, q);
      const MatchingReport mq = compute_c(wq, uq);
      ct.add(q.t, uq.eigenvalue, mq.c);
      r.note(cat("c at t=", q.t, ": ", mq.c, " (t=", p.t, ": ", m.c, ")"));
    }
  }
  r.add_table("matching_constant", std::move(ct), "alpha amplitude t; lambda1 at h=1; c = u1(0)/W(0)");

  r.add_table("weber", w.csv(), "x; W(x) normalized to u1(-3); W'(x)");
  CsvTable ut({"x", "u1", "W", "c_W_reflected"});
  for (std::size_t i = 0; i < u1.grid.n; i += 10) {
    const double x = u1.grid.x(i);
    if (!w.has_sample(x) || !w.has_sample(-x)) continue;
    ut.add(x, u1.values[i], w.sample_at(x).w, m.c * w.sample_at(-x).w);
  }
  r.add_table("ground_state", std::move(ut), "x; refined ground state u1; W(x); c W(-x)");
  r.results = {{"lambda1", lam},
               {"lambda1_error", u1.eigenvalue_error},
               {"a", w.a},
               {"z0", w.z0 ? nlohmann::json(*w.z0) : nlohmann::json()},
               {"c", m.c},
               {"decay_slope", w.decay_slope},
               {"growth_slope", w.growth_slope},
               {"max_residual", w.max_residual}};
  r.scripts["plot_weber.py"] = std::string(kPlotHeader) +
                               "g = pd.read_csv(f'{d}/{p}ground_state.csv')\n"
                               "plt.plot(g['x'], g['u1'], label='u1')\n"
                               "plt.plot(g['x'], g['W'], '--', label='W(x)')\n"
                               "plt.plot(g['x'], g['c_W_reflected'], ':', label='c W(-x)')\n"
                               "plt.ylim(-0.2, 1.0); plt.xlabel('x'); plt.legend()\n"
                               "plt.savefig(f'{d}/{p}weber.png', dpi=150)\n";
  return r;
}

Report run_pruefer(const ExperimentConfig& c) {
  Report r;
  r.experiment = "pruefer-compare";
  const PotentialSpec p = alpha_only(c);
  const auto [u1, w] = ground_state_and_weber(c, p);
  const double lam = u1.eigenvalue;
  const WeberSample& s3 = w.sample_at(-3.0);
  const double theta0 = std::atan2(s3.w, s3.dw);
  const CoefficientQ q_weber = CoefficientQ::harmonic(lam);
  const CoefficientQ q_u1 = CoefficientQ::of(p, lam);

  const AngleComparison ang = compare_angles(q_weber, q_u1, -3.0, theta0, -w.a);
  r.check("pruefer: theta(u1) <= theta(W) + 1e-9 on [-3, -a]", ang.holds, ang.min_margin,
          -kComparisonTolerance, cat("smallest margin at x=", ang.worst_x));
  const AngleComparison ang0 = compare_angles(q_weber, q_u1, -3.0, theta0, 0.0);
  r.check("pruefer: theta(u1) <= theta(W) + 1e-9 on [-3, 0]", ang0.holds, ang0.min_margin,
          -kComparisonTolerance, cat("smallest margin at x=", ang0.worst_x));

  const SolutionComparison sol = compare_solutions(s3.w, ang.big, ang.small, -3.0, -w.a);
  r.check("pruefer: u1 >= W - 1e-9 on [-3, -a]", sol.holds, sol.min_margin, -kComparisonTolerance,
          cat("worst at x=", sol.worst_x));
  r.check("pruefer: u1 exceeds W somewhere on [-3, -a]", sol.max_margin > 0.0, sol.max_margin, 0.0);
  r.add_table("solution_comparison", sol.csv(),
              "x; solution rebuilt from the W angle; solution rebuilt from the u1 angle; u1 - W");

  double worst = 0.0, worst_x = 0.0;
  const std::vector<double> rebuilt = ang0.big.relative_solution();
  for (std::size_t i = 0; i < rebuilt.size(); ++i) {
    const double x = ang0.big.samples[i].x;
    const double d = std::abs(rebuilt[i] * s3.w - w.evaluate(x)[0]);
    if (d > worst) {
      worst = d;
      worst_x = x;
    }
  }
  r.check("pruefer: angle reconstruction matches W on [-3, 0]", worst <= 1e-8, worst, 1e-8,
          cat("worst at x=", worst_x));

  CsvTable at({"x", "theta_W", "theta_u1"});
  for (std::size_t i = 0; i < ang0.big.samples.size(); i += 10) {
    at.add(ang0.big.samples[i].x, ang0.big.samples[i].theta, ang0.small.samples[i].theta);
  }
  r.add_table("angles", std::move(at), "x; Pruefer angle of W; Pruefer angle of u1");

  CsvTable xt({"h", "potential", "j", "matrix", "matrix_error", "shooting", "shooting_error", "difference"});
  for (double h : c.cross.h) {
    const double E = (2.0 * static_cast<double>(c.cross.levels) + 1.0) * h + 1.0;
    const Grid coarse{Grid::half_length_for(E), c.grid.n};
    for (const PotentialSpec& q : {plus_of(c), plus_of(c).partner()}) {
      const Spectrum s = refine(q, h, E, coarse, coarse.refined(), c.grid.tol);
      const char* name = q.reflect_beta ? "minus" : "plus";
      double ratio = 0.0;
      const std::size_t levels = std::min(c.cross.levels, s.size());
      for (std::size_t j = 1; j <= levels; ++j) {
        const ShootingResult sh = shoot(q, h, j, coarse.L);
        const double diff = std::abs(sh.lambda - s.eigenvalues[j - 1]);
        const double combined = s.error_estimate[j - 1] + sh.error_estimate;
        ratio = std::max(ratio, diff / combined);
        xt.add(h, name, j, s.eigenvalues[j - 1], s.error_estimate[j - 1], sh.lambda, sh.error_estimate,
               sh.lambda - s.eigenvalues[j - 1]);
      }
      r.check(cat("pruefer: shooting agrees with the matrix spectrum (", name, ", h=", num(h), ")"),
              levels == c.cross.levels && ratio <= 10.0, ratio, 10.0,
              cat(levels, " levels, worst |difference| / combined error"));
    }
  }
  r.add_table("cross_method", std::move(xt),
              "h; potential; level j; refined matrix eigenvalue; its error; shooting eigenvalue; its error; "
              "shooting - matrix");
  r.results = {{"lambda1", lam}, {"theta0", theta0}, {"a", w.a}, {"angle_min_margin", ang.min_margin},
               {"solution_min_margin", sol.min_margin}, {"reconstruction_error", worst}};
  r.scripts["plot_pruefer.py"] = std::string(kPlotHeader) +
                                 "a = pd.read_csv(f'{d}/{p}angles.csv')\n"
                                 "plt.plot(a['x'], a['theta_W'], label='theta (W)')\n"
                                 "plt.plot(a['x'], a['theta_u1'], '--', label='theta (u1)')\n"
                                 "plt.xlabel('x'); plt.legend()\n"
                                 "plt.savefig(f'{d}/{p}angles.png', dpi=150)\n";
  return r;
}

Report run_trace(const ExperimentConfig& c) {
  Report r;
  r.experiment = "trace";
  const PotentialSpec pp = plus_of(c);
  const PotentialSpec pm = pp.partner();
  const PotentialSpec ho = PotentialSpec::harmonic();
  const double s = c.trace.exp_scale;
  const TestFunction fe = TestFunction::exponential(s);
  const TestFunction fb = TestFunction::bump(c.trace.bump_lo, c.trace.bump_hi);

  CsvTable wt({"f", "a0_plus", "a0_minus", "difference"});
  for (const TestFunction& f : {fe, fb}) {
    const double a = weyl_term(pp, f);
    const double b = weyl_term(pm, f);
    wt.add(f.describe(), a, b, a - b);
    r.check("traces: Weyl term equal for V+ and V- (" + f.describe() + ")", std::abs(a - b) <= 2e-10,
            std::abs(a - b), 2e-10);
  }
  const double a0h = weyl_term(ho, fe);
  wt.add("harmonic " + fe.describe(), a0h, a0h, 0.0);
  r.check("traces: harmonic Weyl term is pi/s", std::abs(a0h - std::numbers::pi / s) <= 1e-10,
          std::abs(a0h - std::numbers::pi / s), 1e-10);
  r.add_table("weyl", std::move(wt), "test function; a0 for V+; a0 for V-; difference");

  CsvTable nt({"h", "nu", "exact", "tail_bound", "error_estimate"});
  double worst_nu = 0.0;
  for (double h : {1.0, 0.5, 0.25}) {
    const SpectralDensity d = spectral_density(ho, h, fe);
    const double exact = 1.0 / (2.0 * std::sinh(s * h));
    nt.add(h, d.value, exact, d.tail_bound, d.error_estimate);
    worst_nu = std::max(worst_nu, std::abs(d.value - exact) / exact);
  }
  r.check("traces: harmonic nu_h = 1/(2 sinh(s h))", worst_nu <= 1e-10, worst_nu, 1e-10, "relative");
  r.add_table("harmonic_density", std::move(nt), "h; computed nu_h(f); 1/(2 sinh(s h)); tail bound; error");

  const WeylConsistency wh = weyl_consistency(ho, fe, c.trace.h_grid);
  const double a1_exact = -std::numbers::pi * s / 6.0;
  const double a0_tol = 1e-5 * std::numbers::pi / s;
  r.check("traces: harmonic (2 pi h) nu_h -> pi/s", std::abs(wh.a0_fit - std::numbers::pi / s) <= a0_tol,
          std::abs(wh.a0_fit - std::numbers::pi / s), a0_tol, cat("fit ", wh.a0_fit, " +- ", wh.a0_fit_error));
  r.check("traces: harmonic h^2 coefficient within 5% of -pi s/6",
          std::abs(wh.a1 - a1_exact) <= 0.05 * std::abs(a1_exact), std::abs(wh.a1 - a1_exact),
          0.05 * std::abs(a1_exact), cat("a1 = ", wh.a1, " +- ", wh.a1_error));
  r.add_table("weyl_harmonic", wh.csv(), "h; (2 pi h) nu_h(f); fitted value; residual");

  const WeylConsistency wp = weyl_consistency(pp, fe, c.trace.h_grid);
  const WeylConsistency wm = weyl_consistency(pm, fe, c.trace.h_grid);
  r.add_table("weyl_plus", wp.csv(), "h; (2 pi h) nu_h(f) for V+; fitted value; residual");
  r.add_table("weyl_minus", wm.csv(), "h; (2 pi h) nu_h(f) for V-; fitted value; residual");
  const double da1 = std::abs(wp.a1 - wm.a1);
  r.check("traces: V+ and V- h^2 coefficients agree within standard error", da1 <= wp.a1_error + wm.a1_error,
          da1, wp.a1_error + wm.a1_error, cat("a1+ = ", wp.a1, ", a1- = ", wm.a1));
  r.check("traces: fitted a0 matches the Weyl term for V+", std::abs(wp.a0_fit - wp.a0) <= 1e-5 * wp.a0,
          std::abs(wp.a0_fit - wp.a0), 1e-5 * wp.a0);
  if (wp.contaminated || wm.contaminated) r.note("h-expansion fit residual above threshold");

  std::vector<double> nus;
  CsvTable mt({"t", "nu"});
  for (double t : {0.0, 0.05, 0.1}) {
    PotentialSpec q = pp;
    q.t = t;
    nus.push_back(spectral_density(q, 0.5, fe).value);
    mt.add(t, nus.back());
  }
  r.check("traces: nu_h(f) decreases as t grows (h=0.5)", nus[0] > nus[1] && nus[1] > nus[2],
          nus[0] - nus[2], 0.0);
  r.add_table("density_vs_t", std::move(mt), "alpha amplitude t; nu_h(f) at h=0.5");
  const double z = spectral_density(pp, 0.5, TestFunction::zero()).value;
  r.check("traces: zero test function gives 0", z == 0.0, z, 0.0);

  r.results = {{"a0_harmonic", a0h}, {"a1_harmonic", wh.a1}, {"a1_plus", wp.a1}, {"a1_minus", wm.a1}};
  r.scripts["plot_trace.py"] = std::string(kPlotHeader) +
                               "for n in ['weyl_harmonic', 'weyl_plus', 'weyl_minus']:\n"
                               "    w = pd.read_csv(f'{d}/{p}{n}.csv')\n"
                               "    plt.plot(w['h'], w['scaled_nu'], 'o-', label=n)\n"
                               "plt.xlabel('h'); plt.ylabel('2 pi h nu_h(f)'); plt.legend()\n"
                               "plt.savefig(f'{d}/{p}trace.png', dpi=150)\n";
  return r;
}

Report run_validate(const ExperimentConfig& c) {
  Report r;
  r.experiment = "validate";
  const PotentialSpec pp = plus_of(c);
  const ValidationReport vr = validate(pp);
  r.check("potential: standing assumptions hold", vr.passed(), vr.alpha_slope_bound, 4.0, vr.summary());

  const Grid coarse = c.grid.coarse();
  const Grid fine = c.grid.fine();
  CsvTable ht({"h", "j", "lambda", "exact", "error"});
  for (double h : {1.0, 0.5, 0.1}) {
    const Spectrum s = refine(PotentialSpec::harmonic(), h, 20.0 * h, coarse, fine, c.grid.tol);
    double worst = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) {
      const double exact = (2.0 * j + 1.0) * h;
      ht.add(h, j + 1, s.eigenvalues[j], exact, s.error_estimate[j]);
      worst = std::max(worst, std::abs(s.eigenvalues[j] - exact));
    }
    r.check(cat("eigensolve: harmonic levels (2j-1)h, j<=10 (h=", num(h), ")"),
            s.size() == 10 && worst <= 1e-9, worst, 1e-9, cat(s.size(), " levels"));
  }
  r.add_table("harmonic_levels", std::move(ht), "h; j; refined eigenvalue; (2j-1)h; error estimate");

  PotentialSpec r0 = pp;
  r0.t = 0.0;
  const GapEntry e0 = isospectral_distance(1.0, 20.0, r0, r0.partner(), coarse, fine, c.grid.tol);
  r.check("traces: reflection pair isospectral at t=0 (h=1, E=20)", e0.D <= 1e-11, e0.D, 1e-11,
          cat(e0.count, " levels"));

  if (!is_harmonic(pp)) {
    check_rayleigh(r, pp, c.cross.h, c, "plus");
    check_rayleigh(r, pp.partner(), c.cross.h, c, "minus");
    std::vector<double> l1;
    for (double t : {0.0, 0.05, 0.1}) {
      PotentialSpec q = pp;
      q.t = t;
      l1.push_back(eigenvalue(discretize(q, 1.0, fine), 1, 0.0));
    }
    r.check("eigensolve: lambda1 increases with t (h=1)", l1[0] < l1[1] && l1[1] < l1[2], l1[2] - l1[0], 0.0);
  }

  r.merge(run_spectrum(c), "spectrum");
  r.merge(run_gap_sweep(c), "gap-sweep");
  r.merge(run_hadamard(c), "hadamard-check");
  r.merge(run_weber(c), "weber");
  r.merge(run_pruefer(c), "pruefer-compare");
  r.merge(run_trace(c), "trace");
  return r;
}

Report run(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  config.validate();
  Report r;
  try {
    const std::string& e = config.experiment;
    if (e == "spectrum") r = run_spectrum(config);
    else if (e == "gap-sweep") r = run_gap_sweep(config);
    else if (e == "hadamard-check") r = run_hadamard(config);
    else if (e == "weber") r = run_weber(config);
    else if (e == "pruefer-compare") r = run_pruefer(config);
    else if (e == "trace") r = run_trace(config);
    else r = run_validate(config);
  } catch (const std::exception& ex) {
    r.experiment = config.experiment;
    r.errors.push_back(ex.what());
  }
  r.config = config;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace qiso
