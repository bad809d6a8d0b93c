#pragma once

#include <string>
#include <vector>

#include "dphase/continuation.hpp"

namespace dphase {

/// Format a double with 17 significant digits (exact round-trip).
std::string format_double(double value);

/// Legacy ASCII VTK unstructured-grid writer: POINT_DATA scalar u, CELL_DATA
/// vectors grad_u, z, zeta and CELL_DATA scalar weight (the per-element
/// weight values). Deterministic byte output for identical inputs.
void write_solution_vtk(const std::string& path, const Mesh& mesh,
                        const ScalarField& u, const FluxField& flux,
                        std::span<const double> cellWeight);

struct VtkSolution {
    Mesh mesh;
    std::vector<double> u;
    std::vector<Vec2> gradU;
    std::vector<Vec2> z;
    std::vector<Vec2> zeta;
    std::vector<double> cellWeight;
};

/// Reader for the files produced by write_solution_vtk.
VtkSolution read_solution_vtk(const std::string& path);

/// steps.csv: header k,p,energy,lambda_p,grad_increment_lq_a,newton_iters
/// followed by one row per continuation step, doubles at 17 significant
/// digits so identical runs are byte-identical.
void write_steps_csv(const std::string& path, const std::vector<StepRecord>& steps);

/// Single-column value table ('#' comments and blank lines allowed); the
/// count must match exactly.
std::vector<double> read_value_table(const std::string& path, int expectedCount,
                                     const std::string& what);

}  // namespace dphase
