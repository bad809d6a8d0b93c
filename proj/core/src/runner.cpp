#include "dphase/runner.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>

namespace dphase {

namespace {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

Mesh build_mesh(const MeshSpec& spec) {
    switch (spec.kind) {
        case MeshSpec::Kind::Interval: return build_interval_mesh(spec.n, spec.length);
        case MeshSpec::Kind::UnitSquare: return build_unit_square_mesh(spec.n);
        case MeshSpec::Kind::File: return load_mesh_file(spec.path);
    }
    fail("invalid-parameter", "unknown mesh kind");
}

WeightField build_weight(const Mesh& mesh, const WeightSpec& spec) {
    switch (spec.kind) {
        case WeightSpec::Kind::Constant: {
            std::vector<double> values(mesh.nodeCount(), spec.value);
            return WeightField(mesh, std::move(values),
                               spec.lipschitz ? spec.lipschitz : std::optional<double>(0.0));
        }
        case WeightSpec::Kind::Affine: {
            std::vector<double> values(mesh.nodeCount());
            for (int i = 0; i < mesh.nodeCount(); ++i)
                values[i] = spec.c0 + spec.c1 * mesh.nodes[i].x + spec.c2 * mesh.nodes[i].y;
            double slope = std::hypot(spec.c1, spec.c2);
            return WeightField(mesh, std::move(values),
                               spec.lipschitz ? spec.lipschitz : std::optional<double>(slope));
        }
        case WeightSpec::Kind::Table:
            return WeightField(mesh,
                               read_value_table(spec.path, mesh.nodeCount(), "weight"),
                               spec.lipschitz);
    }
    fail("invalid-parameter", "unknown weight kind");
}

BoundaryData build_boundary(const Mesh& mesh, const BoundarySpec& spec) {
    const int facets = static_cast<int>(mesh.boundaryFacets.size());
    switch (spec.kind) {
        case BoundarySpec::Kind::Constant:
            return BoundaryData::constant(mesh, spec.value);
        case BoundarySpec::Kind::Affine: {
            std::vector<double> values(facets);
            for (int f = 0; f < facets; ++f) {
                const BoundaryFacet& facet = mesh.boundaryFacets[f];
                Vec2 mid = mesh.nodes[facet.nodes[0]];
                if (mesh.facetNodeCount() == 2)
                    mid = 0.5 * (mid + mesh.nodes[facet.nodes[1]]);
                values[f] = spec.c0 + spec.c1 * mid.x + spec.c2 * mid.y;
            }
            return BoundaryData(mesh, std::move(values));
        }
        case BoundarySpec::Kind::Segments: {
            for (const auto& [side, value] : spec.segments)
                if (mesh.dim == 1 && (side == "bottom" || side == "top"))
                    fail("config", "side '" + side + "' does not exist on an interval mesh");
            std::vector<double> values(facets, 0.0);
            for (int f = 0; f < facets; ++f) {
                const Vec2 nrm = mesh.boundaryFacets[f].normal;
                std::string side;
                if (std::abs(nrm.x) >= std::abs(nrm.y))
                    side = nrm.x < 0.0 ? "left" : "right";
                else
                    side = nrm.y < 0.0 ? "bottom" : "top";
                for (const auto& [name, value] : spec.segments)
                    if (name == side) values[f] = value;
            }
            return BoundaryData(mesh, std::move(values));
        }
        case BoundarySpec::Kind::Table:
            return BoundaryData(mesh, read_value_table(spec.path, facets, "boundary"));
    }
    fail("invalid-parameter", "unknown boundary kind");
}

ordered_json mesh_json(const Mesh& mesh) {
    return ordered_json{{"dim", mesh.dim},
                        {"nodes", mesh.nodeCount()},
                        {"elements", mesh.elementCount()},
                        {"boundaryFacets", mesh.boundaryFacets.size()},
                        {"volume", mesh.volume},
                        {"boundaryMeasure", mesh.boundaryMeasure},
                        {"diameter", mesh.diameter}};
}

ordered_json step_json(const StepRecord& s) {
    return ordered_json{{"k", s.k},
                        {"p", s.p},
                        {"eps", s.eps},
                        {"energy", s.energy},
                        {"lambdaP", s.lambdaP},
                        {"gradIncrementLqA", s.gradIncrementLqA},
                        {"newtonIterations", s.newtonIterations},
                        {"gradientNorm", s.gradientNorm},
                        {"converged", s.converged}};
}

ordered_json verification_json(const VerificationRecord& v) {
    return ordered_json{{"pairing", v.pairing},
                        {"pairingVacuous", v.pairingVacuous},
                        {"pairedElements", v.pairedElements},
                        {"gradFloor", v.gradFloor},
                        {"supNorm", v.supNorm},
                        {"divergence", v.divergence},
                        {"boundaryFlux", v.boundaryFlux},
                        {"minimalityMargin", v.minimalityMargin},
                        {"limitEnergy", v.limitEnergy},
                        {"pairingPass", v.pairingPass},
                        {"supNormPass", v.supNormPass},
                        {"divergencePass", v.divergencePass},
                        {"boundaryFluxPass", v.boundaryFluxPass},
                        {"minimalityPass", v.minimalityPass},
                        {"allPass", v.allPass()}};
}

ordered_json constants_json(const ConstantsRecord& c) {
    return ordered_json{{"traceEstimate", c.traceEstimate},
                        {"poincareEstimate", c.poincareEstimate},
                        {"smallness",
                         ordered_json{{"value", c.smallness.value},
                                      {"gInf", c.smallness.gInf},
                                      {"diameter", c.smallness.diameter},
                                      {"pass", c.smallness.pass},
                                      {"margin", c.smallness.margin}}}};
}

void write_report(const std::string& path, const ordered_json& j, bool singleLine) {
    std::ofstream out(path);
    if (!out) fail("io", "cannot open file for writing: " + path);
    out << (singleLine ? j.dump() : j.dump(2)) << "\n";
    out.flush();
    if (!out) fail("io", "write failed: " + path);
}

std::vector<std::string> lax_hypothesis_warnings(const WeightHypothesisReport& hyp) {
    std::vector<std::string> warnings;
    if (!hyp.boundaryPositive)
        warnings.push_back("weight vanishes somewhere on the boundary");
    if (!hyp.ratioOk) warnings.push_back("exponent ratio q/p is not below 1 + 1/N");
    if (!hyp.lipschitzOk)
        warnings.push_back("weight exceeds its declared Lipschitz constant");
    return warnings;
}

SolveOptions solve_options(const RunConfig& config) {
    SolveOptions so;
    so.tol = config.solver.tol;
    so.maxIterations = config.solver.maxIterations;
    so.eps = config.solver.eps;
    return so;
}

int run_solve_one_p(const RunConfig& config, const fs::path& outDir) {
    Mesh mesh = build_mesh(config.mesh);
    WeightField a = build_weight(mesh, config.weight);
    BoundaryData g = build_boundary(mesh, config.boundary);
    ExponentPair pq(config.modeP, config.q, mesh.dim);
    auto hyp = check_weight_hypotheses(mesh, a, pq, config.strict);

    SolveReport rep = minimize_approx(mesh, a, pq, g, solve_options(config));
    if (!rep.converged)
        fail("non-convergence",
             "solver stopped after " + std::to_string(rep.iterations) +
                 " iterations with gradient norm " + format_double(rep.gradientNorm));

    FluxField flux = extract_flux(mesh, a, pq, rep.solution, rep.epsUsed);
    write_solution_vtk((outDir / "solution.vtk").string(), mesh, rep.solution, flux,
                       a.centroidValues());

    ordered_json j{{"mode", to_string(config.mode)},
                   {"q", config.q},
                   {"p", config.modeP},
                   {"eps", rep.epsUsed},
                   {"mesh", mesh_json(mesh)},
                   {"energy", rep.energy},
                   {"gradientNorm", rep.gradientNorm},
                   {"iterations", rep.iterations},
                   {"lineSearchBacktracks", rep.lineSearchBacktracks},
                   {"converged", rep.converged},
                   {"lambdaP", rep.lambdaP},
                   {"warnings", lax_hypothesis_warnings(hyp)}};
    write_report((outDir / "report.json").string(), j, false);
    return 0;
}

int run_continue(const RunConfig& config, const fs::path& outDir) {
    Mesh mesh = build_mesh(config.mesh);
    WeightField a = build_weight(mesh, config.weight);
    BoundaryData g = build_boundary(mesh, config.boundary);

    ContinuationOptions opts;
    opts.solve = solve_options(config);
    opts.strictHypothesis = config.strict;
    opts.seed = config.seed;
    opts.tols.seed = config.seed;
    std::vector<double> schedule =
        config.schedule.empty() ? default_p_schedule(8) : config.schedule;

    ContinuationReport rep = run_continuation(mesh, a, config.q, g, schedule, opts);

    write_steps_csv((outDir / "steps.csv").string(), rep.steps);
    write_solution_vtk((outDir / "solution.vtk").string(), mesh, rep.solution, rep.flux,
                       a.centroidValues());

    ordered_json steps = ordered_json::array();
    for (const StepRecord& s : rep.steps) steps.push_back(step_json(s));
    ordered_json j{{"mode", to_string(config.mode)},
                   {"q", config.q},
                   {"schedule", rep.schedule},
                   {"mesh", mesh_json(mesh)},
                   {"steps", steps},
                   {"aborted", rep.aborted},
                   {"warnings", rep.warnings}};
    if (rep.aborted) j["abortReason"] = rep.abortReason;
    if (rep.verification) j["verification"] = verification_json(*rep.verification);
    if (rep.constants) j["constants"] = constants_json(*rep.constants);
    write_report((outDir / "report.json").string(), j, false);
    return rep.aborted ? 1 : 0;
}

int run_verify(const RunConfig& config, const fs::path& outDir) {
    VtkSolution sol = read_solution_vtk(config.verifyInput);
    BoundaryData g = build_boundary(sol.mesh, config.boundary);
    ScalarField u(sol.mesh, sol.u);
    FluxField flux;
    flux.mesh = &sol.mesh;
    flux.w = sol.gradU;
    flux.z = sol.z;
    flux.zeta = sol.zeta;

    VerifyTols tols;
    tols.seed = config.seed;
    VerificationRecord rec =
        verify_limit_solution_cellwise(sol.mesh, sol.cellWeight, config.q, g, u, flux, tols);

    ordered_json j{{"mode", to_string(config.mode)},
                   {"q", config.q},
                   {"input", config.verifyInput},
                   {"mesh", mesh_json(sol.mesh)},
                   {"verification", verification_json(rec)}};
    write_report((outDir / "report.json").string(), j, false);
    return rec.allPass() ? 0 : 1;
}

int run_oracle_check(const RunConfig& config, const fs::path& outDir) {
    Mesh mesh = build_mesh(config.mesh);
    WeightField a = build_weight(mesh, config.weight);
    BoundaryData g = build_boundary(mesh, config.boundary);
    ExponentPair pq(config.modeP, config.q, mesh.dim);
    double eps = config.solver.eps.value_or(default_epsilon(config.modeP));

    SolveReport oracle = oracle_minimize(mesh, a, pq, g, eps);
    SolveOptions so = solve_options(config);
    so.eps = eps;
    SolveReport newton = minimize_approx(mesh, a, pq, g, so);

    double supDistance = 0.0, uScale = 1.0;
    for (int i = 0; i < mesh.nodeCount(); ++i) {
        supDistance = std::max(supDistance,
                               std::abs(newton.solution[i] - oracle.solution[i]));
        uScale = std::max(uScale, std::abs(oracle.solution[i]));
    }
    double energyGap = std::abs(newton.energy - oracle.energy);
    bool agree = energyGap <= 1e-8 * (1.0 + std::abs(oracle.energy)) &&
                 supDistance <= 1e-5 * uScale;

    ordered_json j{{"mode", to_string(config.mode)},
                   {"q", config.q},
                   {"p", config.modeP},
                   {"eps", eps},
                   {"mesh", mesh_json(mesh)},
                   {"oracleEnergy", oracle.energy},
                   {"newtonEnergy", newton.energy},
                   {"energyGap", energyGap},
                   {"supDistance", supDistance},
                   {"oracleSweeps", oracle.iterations},
                   {"newtonIterations", newton.iterations},
                   {"agree", agree}};
    write_report((outDir / "report.json").string(), j, false);
    return agree ? 0 : 1;
}

}  // namespace

int run_command(const RunConfig& config) {
    fs::path outDir = config.outputDir.empty() ? fs::path(".") : fs::path(config.outputDir);
    std::error_code ec;
    fs::create_directories(outDir, ec);
    if (ec) {
        std::cerr << "error (io): cannot create output directory '" << outDir.string()
                  << "': " << ec.message() << "\n";
        return 2;
    }

    try {
        switch (config.mode) {
            case RunMode::SolveOneP: return run_solve_one_p(config, outDir);
            case RunMode::Continue: return run_continue(config, outDir);
            case RunMode::Verify: return run_verify(config, outDir);
            case RunMode::OracleCheck: return run_oracle_check(config, outDir);
        }
        fail("invalid-parameter", "unknown run mode");
    } catch (const Error& err) {
        ordered_json j{{"error", ordered_json{{"kind", err.kind()},
                                              {"message", err.what()}}}};
        try {
            write_report((outDir / "report.json").string(), j, true);
        } catch (const Error&) {
            // The record is best-effort; the exit status and stderr remain.
        }
        std::cerr << "error (" << err.kind() << "): " << err.what() << "\n";
        return err.kind() == "config" || err.kind() == "parse" ? 2 : 1;
    }
}

}  // namespace dphase
