#include "qiso/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qiso/error.hpp"

namespace qiso {

namespace {

template <class T>
void read(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key) && !j.at(key).is_null()) j.at(key).get_to(out);
}

void check_margin(const GridConfig& g, const PotentialSpec& p, double E, const std::string& what,
                  std::vector<std::string>& out) {
  const double v = std::min(potential_eval(p, g.L), potential_eval(p, -g.L));
  if (v < E + 10.0) {
    std::ostringstream os;
    os << what << ": V(+-L) = " << v << " is below E + 10 = " << E + 10.0 << " (raise grid.L)";
    out.push_back(os.str());
  }
}

}  // namespace

std::vector<std::string> ExperimentConfig::problems() const {
  std::vector<std::string> out;
  if (std::find(kExperiments.begin(), kExperiments.end(), experiment) == kExperiments.end()) {
    out.push_back("unknown experiment '" + experiment + "'");
  }
  const ValidationReport vr = qiso::validate(potential);
  if (!vr.passed()) out.push_back("potential: " + vr.summary());
  if (!(grid.L > 0.0)) out.push_back("grid.L must be positive");
  if (grid.n < 3) out.push_back("grid.n must be >= 3");
  if (grid.tol && !(*grid.tol >= 0.0)) out.push_back("grid.tol must be >= 0");
  if (h_list.empty()) out.push_back("h_list must not be empty");
  for (double h : h_list) {
    if (!(h > 0.0)) out.push_back("h_list entries must be positive");
  }
  if (!(E_window > 0.0)) out.push_back("E_window must be positive");
  if (vr.passed() && grid.L > 0.0) {
    check_margin(grid, potential, E_window, "E_window", out);
    check_margin(grid, potential, sweep.E, "sweep.E", out);
    for (double e : sweep.diagnostic_E) check_margin(grid, potential, e, "sweep.diagnostic_E", out);
  }
  if (!(sweep.h_max > sweep.h_min && sweep.h_min > 0.0)) out.push_back("sweep needs h_max > h_min > 0");
  if (sweep.count < 2) out.push_back("sweep.count must be >= 2");
  if (hadamard.j < 1) out.push_back("hadamard.j must be >= 1");
  if (!(hadamard.eps_fd > 0.0)) out.push_back("hadamard.eps_fd must be positive");
  for (double e : hadamard.convergence_steps) {
    if (!(e > 0.0)) out.push_back("hadamard.convergence_steps must be positive");
  }
  if (!(weber.x_left <= -8.0 && weber.x_left >= -35.0)) out.push_back("weber.x_left must lie in [-35, -8]");
  if (!(weber.x_right >= 8.0)) out.push_back("weber.x_right must be >= 8");
  if (trace.h_grid.size() < 6) out.push_back("trace.h_grid needs at least 6 values");
  for (double h : trace.h_grid) {
    if (!(h >= 0.02 && h <= 0.5)) out.push_back("trace.h_grid values must lie in [0.02, 0.5]");
  }
  if (!(trace.exp_scale > 0.0)) out.push_back("trace.exp_scale must be positive");
  if (!(trace.bump_hi > trace.bump_lo)) out.push_back("trace.bump_lo must be below trace.bump_hi");
  if (cross.levels < 1) out.push_back("cross.levels must be >= 1");
  for (double h : cross.h) {
    if (!(h > 0.0)) out.push_back("cross.h entries must be positive");
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void ExperimentConfig::validate() const {
  const auto p = problems();
  if (p.empty()) return;
  std::ostringstream os;
  os << "invalid config:";
  for (const auto& s : p) os << "\n  - " << s;
  throw PreconditionError(os.str());
}

void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  j = nlohmann::json{
      {"experiment", c.experiment},
      {"potential", c.potential},
      {"grid", {{"L", c.grid.L}, {"n", c.grid.n}, {"tol", c.grid.tol ? nlohmann::json(*c.grid.tol) : nlohmann::json()}}},
      {"h_list", c.h_list},
      {"E_window", c.E_window},
      {"sweep",
       {{"h_max", c.sweep.h_max},
        {"h_min", c.sweep.h_min},
        {"count", c.sweep.count},
        {"E", c.sweep.E},
        {"diagnostic_E", c.sweep.diagnostic_E}}},
      {"hadamard",
       {{"j", c.hadamard.j}, {"eps_fd", c.hadamard.eps_fd}, {"convergence_steps", c.hadamard.convergence_steps}}},
      {"weber", {{"x_left", c.weber.x_left}, {"x_right", c.weber.x_right}, {"t_compare", c.weber.t_compare}}},
      {"trace",
       {{"h_grid", c.trace.h_grid},
        {"exp_scale", c.trace.exp_scale},
        {"bump_lo", c.trace.bump_lo},
        {"bump_hi", c.trace.bump_hi}}},
      {"cross", {{"h", c.cross.h}, {"levels", c.cross.levels}}},
      {"output_dir", c.output_dir.string()}};
}

void from_json(const nlohmann::json& j, ExperimentConfig& c) {
  read(j, "experiment", c.experiment);
  read(j, "potential", c.potential);
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    read(g, "L", c.grid.L);
    read(g, "n", c.grid.n);
    if (g.contains("tol") && !g.at("tol").is_null()) c.grid.tol = g.at("tol").get<double>();
  }
  read(j, "h_list", c.h_list);
  read(j, "E_window", c.E_window);
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    read(s, "h_max", c.sweep.h_max);
    read(s, "h_min", c.sweep.h_min);
    read(s, "count", c.sweep.count);
    read(s, "E", c.sweep.E);
    read(s, "diagnostic_E", c.sweep.diagnostic_E);
  }
  if (j.contains("hadamard")) {
    const auto& s = j.at("hadamard");
    read(s, "j", c.hadamard.j);
    read(s, "eps_fd", c.hadamard.eps_fd);
    read(s, "convergence_steps", c.hadamard.convergence_steps);
  }
  if (j.contains("weber")) {
    const auto& s = j.at("weber");
    read(s, "x_left", c.weber.x_left);
    read(s, "x_right", c.weber.x_right);
    read(s, "t_compare", c.weber.t_compare);
  }
  if (j.contains("trace")) {
    const auto& s = j.at("trace");
    read(s, "h_grid", c.trace.h_grid);
    read(s, "exp_scale", c.trace.exp_scale);
    read(s, "bump_lo", c.trace.bump_lo);
    read(s, "bump_hi", c.trace.bump_hi);
  }
  if (j.contains("cross")) {
    const auto& s = j.at("cross");
    read(s, "h", c.cross.h);
    read(s, "levels", c.cross.levels);
  }
  if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open config " + path.string());
  try {
    return nlohmann::json::parse(in).get<ExperimentConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError("config " + path.string() + ": " + e.what());
  }
}

}  // namespace qiso
