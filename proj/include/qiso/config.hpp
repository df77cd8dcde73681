#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qiso/eigensolve.hpp"
#include "qiso/potential.hpp"

namespace qiso {

inline const std::vector<std::string> kExperiments{
    "spectrum", "gap-sweep", "hadamard-check", "weber", "pruefer-compare", "trace", "validate"};

struct GridConfig {
  double L = 8.0;
  std::size_t n = 7999;  // coarse grid; the fine grid has 2n + 1 points
  std::optional<double> tol;

  Grid coarse() const { return {L, n}; }
  Grid fine() const { return coarse().refined(); }
};

struct SweepConfig {
  double h_max = 1.0;
  double h_min = 0.25;
  std::size_t count = 12;
  double E = 1.25;
  std::vector<double> diagnostic_E{10.0};
};

struct HadamardConfig {
  std::size_t j = 1;
  double eps_fd = 1e-5;
  std::vector<double> convergence_steps{0.8, 0.4, 0.2, 0.1};
};

struct WeberConfig {
  double x_left = -8.0;
  double x_right = 8.0;
  double t_compare = 0.1;
};

struct TraceConfig {
  std::vector<double> h_grid{0.05, 0.075, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5};
  double exp_scale = 1.0;
  double bump_lo = 0.5;
  double bump_hi = 6.0;
};

struct CrossConfig {
  std::vector<double> h{1.0, 0.5, 0.25};
  std::size_t levels = 10;
};

struct ExperimentConfig {
  std::string experiment = "validate";
  PotentialSpec potential{};
  GridConfig grid{};
  std::vector<double> h_list{1.0};
  double E_window = 10.0;
  SweepConfig sweep{};
  HadamardConfig hadamard{};
  WeberConfig weber{};
  TraceConfig trace{};
  CrossConfig cross{};
  std::filesystem::path output_dir = "qiso-out";

  /// Every violated precondition, empty when the config is usable.
  std::vector<std::string> problems() const;
  /// Throws PreconditionError listing all problems.
  void validate() const;
};

void to_json(nlohmann::json& j, const ExperimentConfig& c);
void from_json(const nlohmann::json& j, ExperimentConfig& c);

ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace qiso
