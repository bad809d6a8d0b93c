#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "dphase/solver.hpp"

namespace dphase {

/// Elementwise flux triple extracted from an approximate solution:
///   z    = m_eps^{p-2} grad u      (the bounded phase-1 flux)
///   w    = grad u                  (the phase-q gradient)
///   zeta = z + a |w|^{q-2} w       (the composite flux)
struct FluxField {
    const Mesh* mesh = nullptr;
    std::vector<Vec2> z;
    std::vector<Vec2> w;
    std::vector<Vec2> zeta;
};

/// Geometric schedule p_k = 1 + 2^{-k}, k = 1..K.
std::vector<double> default_p_schedule(int K);

struct StepRecord {
    int k = 0;
    double p = 0.0;
    double eps = 0.0;
    double energy = 0.0;
    double lambdaP = 0.0;
    /// |grad u_{p_k} - grad u_{p_{k-1}}| in the weighted L^q norm; zero for
    /// the first step.
    double gradIncrementLqA = 0.0;
    int newtonIterations = 0;
    double gradientNorm = 0.0;
    bool converged = false;
};

struct VerifyTols {
    double pairing = 1e-2;
    double supNorm = 1e-3;
    double divergence = 1e-6;
    double boundaryFlux = 1e-3;
    double minimality = 1e-6;  // scaled by 1 + |I(u)|
    /// Elements enter the pairing check only above
    /// max(gradFloorRel * max|grad u|, gradFloorAbs, 1e-12); the absolute
    /// floor keeps vanishing-gradient phases (where the pairing degenerates
    /// to 0 = 0) out of the residual.
    double gradFloorRel = 1e-5;
    double gradFloorAbs = 1e-5;
    int probes = 100;
    std::uint64_t seed = 0;
};

/// Residuals for the discrete counterparts of the limit-solution conditions:
/// (i) pairing 1 - z.grad u/|grad u| on elements above the gradient floor,
/// (ii) sup-norm excess max|z| - 1,
/// (iii) weak divergence of zeta against interior nodal hats,
/// (iv) boundary flux match of zeta against g on boundary nodal hats,
/// (v) minimality of the limit energy against random mean-zero probes.
/// Residuals (iii) and (iv) are normalized by the Cauchy-Schwarz scale
/// |zeta|_{L^2} |grad phi|_{L^2} (and the load magnitude for (iv)).
struct VerificationRecord {
    double pairing = 0.0;
    bool pairingVacuous = false;
    int pairedElements = 0;
    double gradFloor = 0.0;
    double supNorm = 0.0;
    double divergence = 0.0;
    double boundaryFlux = 0.0;
    double minimalityMargin = 0.0;  // min over probes of I(v) - I(u)
    double limitEnergy = 0.0;
    bool pairingPass = false;
    bool supNormPass = false;
    bool divergencePass = false;
    bool boundaryFluxPass = false;
    bool minimalityPass = false;
    VerifyTols tols;

    bool allPass() const {
        return pairingPass && supNormPass && divergencePass && boundaryFluxPass &&
               minimalityPass;
    }
};

struct SmallnessReport {
    double value = 0.0;  // 2 * trace * (poincare * diam + 1) * |g|_inf
    double traceEstimate = 0.0;
    double poincareEstimate = 0.0;
    double gInf = 0.0;
    double diameter = 0.0;
    bool pass = false;
    double margin = 0.0;  // 1 - value
};

struct ConstantsRecord {
    double traceEstimate = 0.0;
    double poincareEstimate = 0.0;
    SmallnessReport smallness;
};

struct ContinuationOptions {
    SolveOptions solve;
    /// Strict mode demands q < 1 + 1/N (so the exponent-ratio hypothesis
    /// holds for every p near 1) and a strictly positive weight on the
    /// boundary; lax mode records warnings and proceeds.
    bool strictHypothesis = false;
    /// Optional random perturbation of each warm start, for trajectory
    /// robustness experiments; zero keeps warm starts exact.
    double warmStartJitter = 0.0;
    std::uint64_t seed = 0;
    bool verify = true;
    bool estimateConstants = true;
    VerifyTols tols;
};

struct ContinuationReport {
    std::vector<double> schedule;
    std::vector<StepRecord> steps;
    ScalarField solution;  // at the final p
    FluxField flux;        // extracted at the final p
    std::optional<VerificationRecord> verification;
    std::optional<ConstantsRecord> constants;
    std::vector<std::string> warnings;
    bool aborted = false;
    std::string abortReason;
};

/// Drive p down the schedule (each p_k must satisfy 1 < p_k < q), warm
/// starting every solve from the previous solution, then extract the flux at
/// the final step and (by default) verify the limit conditions and estimate
/// the constants entering the smallness check. A non-converged inner solve
/// aborts the continuation and returns the partial report.
ContinuationReport run_continuation(const Mesh& mesh, const WeightField& a, double q,
                                    const BoundaryData& g,
                                    const std::vector<double>& schedule,
                                    const ContinuationOptions& options = {});

FluxField extract_flux(const Mesh& mesh, const WeightField& a, const ExponentPair& pq,
                       const ScalarField& u, double eps);

VerificationRecord verify_limit_solution(const Mesh& mesh, const WeightField& a,
                                         double q, const BoundaryData& g,
                                         const ScalarField& u, const FluxField& flux,
                                         const VerifyTols& tols = {});

/// Same with per-element weight values (used when the weight arrives
/// cellwise, e.g. from a re-ingested solution file).
VerificationRecord verify_limit_solution_cellwise(const Mesh& mesh,
                                                  std::span<const double> aCell,
                                                  double q, const BoundaryData& g,
                                                  const ScalarField& u,
                                                  const FluxField& flux,
                                                  const VerifyTols& tols = {});

/// Heuristic lower bound for the trace constant sup |v|_{L^1(boundary)} /
/// |v|_{W^{1,1}}: multi-start coordinate ascent over nodal fields, started
/// from the constant field, coordinate ramps, boundary hats, boundary-layer
/// profiles and seeded random fields. Monotone under mesh refinement in the
/// sense that nested meshes enlarge the searched space.
double estimate_trace_constant(const Mesh& mesh, int randomStarts = 32,
                               std::uint64_t seed = 0);

/// Heuristic lower bound for the Poincare ratio
/// |u - mean(u)|_{theta} / (diam * |grad u|_{theta}).
double estimate_poincare_constant(const Mesh& mesh, const WeightField& a,
                                  const ExponentPair& pq, int randomStarts = 8,
                                  std::uint64_t seed = 0);

/// Advisory smallness check 2 * trace * (poincare * diam + 1) * |g|_inf < 1;
/// when it passes with honest constants, every continuation step keeps the
/// Luxemburg norm of the solution gradient below one.
SmallnessReport smallness_check(const Mesh& mesh, const BoundaryData& g,
                                double traceEstimate, double poincareEstimate);

}  // namespace dphase
