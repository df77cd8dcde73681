#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>

namespace qiso {

using State2 = std::array<double, 2>;
using Rhs2 = std::function<void(const State2& y, State2& dydx, double x)>;
using Observer2 = std::function<void(const State2& y, double x)>;

struct OdeOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  double initial_step = 1e-3;
  std::size_t max_steps_between_samples = 200000;
};

/// Adaptive Runge-Kutta-Fehlberg 7(8) integration of a 2-component system.
/// Starts from y0 at xs.front() and reports the state at every entry of xs
/// (strictly increasing).  Step-size failures become ConvergenceError naming
/// the last sample reached.  Returns the state at xs.back().
State2 integrate_samples(const Rhs2& rhs, State2 y0, std::span<const double> xs,
                         const Observer2& observer, const OdeOptions& options = {});

}  // namespace qiso
