#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "qiso/config.hpp"
#include "qiso/error.hpp"
#include "qiso/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Spectra of perturbed harmonic-oscillator pairs: experiments and invariant checks"};
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(0, 1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir;
  std::optional<double> h, t, eps, grid_L;
  std::optional<std::size_t> grid_n;
  bool print_defaults = false;

  app.add_option("--config", config_path, "JSON experiment config")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (default: output_dir/<experiment>)");
  app.add_option("--h", h, "semiclassical parameter, replaces h_list");
  app.add_option("--t", t, "alpha bump amplitude");
  app.add_option("--eps", eps, "beta bump amplitude");
  app.add_option("--grid-n", grid_n, "interior points of the coarse grid (fine grid uses 2n + 1)");
  app.add_option("--grid-L", grid_L, "truncation half-length");
  app.add_flag("--print-defaults", print_defaults, "print the default config as JSON and exit");

  for (const auto& name : qiso::kExperiments) app.add_subcommand(name, "run the " + name + " experiment");

  CLI11_PARSE(app, argc, argv);

  if (print_defaults) {
    std::cout << nlohmann::json(qiso::ExperimentConfig{}).dump(2) << '\n';
    return 0;
  }

  try {
    qiso::ExperimentConfig cfg = config_path.empty() ? qiso::ExperimentConfig{} : qiso::load_config(config_path);
    if (!app.get_subcommands().empty()) cfg.experiment = app.get_subcommands().front()->get_name();
    if (h) cfg.h_list = {*h};
    if (t) cfg.potential.t = *t;
    if (eps) cfg.potential.eps = *eps;
    if (grid_n) cfg.grid.n = *grid_n;
    if (grid_L) cfg.grid.L = *grid_L;

    const qiso::Report report = qiso::run(cfg);
    const std::filesystem::path dir = out_dir.empty() ? cfg.output_dir / cfg.experiment : std::filesystem::path(out_dir);
    report.write(dir);
    std::cout << report.summary() << "wrote " << dir.string() << '\n';
    return report.passed() ? 0 : 1;
  } catch (const qiso::PreconditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
