#include "qiso/ode.hpp"

#include <boost/numeric/odeint.hpp>
#include <sstream>

#include "qiso/error.hpp"

namespace qiso {

State2 integrate_samples(const Rhs2& rhs, State2 y0, std::span<const double> xs,
                         const Observer2& observer, const OdeOptions& options) {
  namespace odeint = boost::numeric::odeint;
  if (xs.empty()) return y0;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) throw PreconditionError("sample abscissae must increase strictly");
  }
  auto stepper =
      odeint::make_controlled<odeint::runge_kutta_fehlberg78<State2>>(options.abs_tol, options.rel_tol);
  double last = xs.front();
  auto system = [&rhs](const State2& y, State2& dy, double x) { rhs(y, dy, x); };
  auto watch = [&](const State2& y, double x) {
    last = x;
    observer(y, x);
  };
  try {
    odeint::integrate_times(stepper, system, y0, xs.begin(), xs.end(), options.initial_step, watch,
                            odeint::max_step_checker(options.max_steps_between_samples));
  } catch (const std::runtime_error& e) {
    std::ostringstream os;
    os << "ODE integration failed after x=" << last << ": " << e.what();
    throw ConvergenceError(os.str());
  }
  return y0;
}

}  // namespace qiso
