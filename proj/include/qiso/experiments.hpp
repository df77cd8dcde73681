#pragma once

#include "qiso/config.hpp"
#include "qiso/report.hpp"

namespace qiso {

/// Validates the config, dispatches on config.experiment and returns the filled report.
/// Per-experiment exceptions are caught and recorded as report errors.
Report run(const ExperimentConfig& config);

Report run_spectrum(const ExperimentConfig& c);
Report run_gap_sweep(const ExperimentConfig& c);
Report run_hadamard(const ExperimentConfig& c);
Report run_weber(const ExperimentConfig& c);
Report run_pruefer(const ExperimentConfig& c);
Report run_trace(const ExperimentConfig& c);
Report run_validate(const ExperimentConfig& c);

}  // namespace qiso
