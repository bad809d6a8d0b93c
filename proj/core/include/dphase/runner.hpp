#pragma once

#include "dphase/config.hpp"
#include "dphase/io.hpp"

namespace dphase {

/// Execute a validated run configuration end to end: build the mesh, weight
/// and boundary data, dispatch on the mode, and write report.json (plus
/// steps.csv and solution.vtk where applicable) into the output directory.
/// Returns the process exit status: 0 on success, 1 on hard errors
/// (incompatible data, hypothesis violations in strict mode, non-converged
/// solves), 2 on configuration errors. Hard errors also leave a one-line
/// machine-readable error record in report.json.
int run_command(const RunConfig& config);

}  // namespace dphase
