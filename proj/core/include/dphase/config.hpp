#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dphase/common.hpp"

namespace dphase {

enum class RunMode { SolveOneP, Continue, Verify, OracleCheck };

std::string to_string(RunMode mode);

struct MeshSpec {
    enum class Kind { Interval, UnitSquare, File } kind = Kind::Interval;
    int n = 16;
    double length = 1.0;
    std::string path;
};

struct WeightSpec {
    enum class Kind { Constant, Affine, Table } kind = Kind::Constant;
    double value = 1.0;
    double c0 = 1.0, c1 = 0.0, c2 = 0.0;  // a(x, y) = c0 + c1 x + c2 y
    std::string path;                     // per-node table, one value per line
    std::optional<double> lipschitz;
};

struct BoundarySpec {
    enum class Kind { Constant, Affine, Segments, Table } kind = Kind::Constant;
    double value = 0.0;
    double c0 = 0.0, c1 = 0.0, c2 = 0.0;  // evaluated at facet midpoints
    /// side -> value; sides are left/right in 1D plus bottom/top in 2D,
    /// classified by the facet's outward normal. Unlisted sides are zero.
    std::vector<std::pair<std::string, double>> segments;
    std::string path;  // per-facet table, one value per line
};

struct SolverSpec {
    double tol = 1e-10;
    int maxIterations = 200;
    std::optional<double> eps;  // fixed smoothing; default tracks p
};

/// Fully validated run description, assembled from a line-oriented config
/// file of `section.key = value` entries (unknown keys, duplicate keys,
/// malformed values and out-of-range parameters are all errors).
struct RunConfig {
    RunMode mode = RunMode::Continue;
    bool modeExplicit = false;  // run.mode appeared in the file
    MeshSpec mesh;
    WeightSpec weight;
    BoundarySpec boundary;
    SolverSpec solver;
    double q = 0.0;
    std::vector<double> schedule;
    double modeP = 1.5;          // p for solve-one-p and oracle-check
    std::string outputDir = "out";
    std::string verifyInput;     // solution file re-ingested by verify mode
    std::uint64_t seed = 0;
    bool strict = false;
};

RunConfig parse_config(const std::string& path);

/// Re-check the constraints tied to the selected mode (verify needs an input
/// file, single-p modes need 1 < p < q). parse_config already runs this; a
/// caller that changes the mode afterwards should run it again.
void validate_mode_requirements(const RunConfig& config, const std::string& context);

}  // namespace dphase
