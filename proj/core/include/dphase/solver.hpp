#pragma once

#include <optional>

#include "dphase/energy.hpp"

namespace dphase {

struct SolveOptions {
    double tol = 1e-10;       // stop when |grad| <= tol * (1 + |energy|)
    int maxIterations = 200;
    std::optional<double> eps;  // default: the epsilon schedule for p
    std::optional<ScalarField> initialGuess;
    double compatibilityTol = 1e-10;
};

struct SolveReport {
    ScalarField solution;
    double energy = 0.0;
    double gradientNorm = 0.0;
    int iterations = 0;
    int lineSearchBacktracks = 0;
    bool converged = false;
    double lambdaP = 0.0;  // Luxemburg norm of the solution gradient
    double epsUsed = 0.0;
    std::vector<double> energyHistory;  // one entry per iterate, nonincreasing
                                        // up to rounding in the terminal phase
};

/// Minimize the smoothed energy over mean-zero fields: damped inexact Newton
/// with a matrix-free conjugate-gradient inner solve on the mean-zero
/// subspace, Armijo backtracking (sufficient decrease 1e-4, halving, at most
/// 60 backtracks per step) and a steepest-descent fallback. Compatibility of
/// the datum is a hard precondition.
SolveReport minimize_approx(const Mesh& mesh, const WeightField& a,
                            const ExponentPair& pq, const BoundaryData& g,
                            const SolveOptions& options = {});

/// Derivative-free reference minimizer for cross-checks: cyclic coordinate
/// descent with golden-section line searches, the last coordinate eliminated
/// to keep the iterate exactly mean-zero, sweeping until the energy decrease
/// per sweep drops below 1e-13. Refuses meshes with more than 12 nodes. The
/// reported gradient norm and lambdaP are computed after the fact and play
/// no part in the minimization.
SolveReport oracle_minimize(const Mesh& mesh, const WeightField& a,
                            const ExponentPair& pq, const BoundaryData& g,
                            double eps);

}  // namespace dphase
