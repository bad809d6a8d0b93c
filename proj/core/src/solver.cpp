#include "dphase/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dphase {

namespace {

double dot_nodal(const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double norm_nodal(const std::vector<double>& x) { return std::sqrt(dot_nodal(x, x)); }

void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y) {
    for (size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

// Conjugate gradients on the mean-zero subspace for H d = -grad, stopped at
// a relative residual eta or after n steps. The Hessian action already lands
// in the subspace, so the iteration never leaves it. Directions of
// nonpositive curvature end the iteration early (the current iterate is kept,
// or the raw right-hand side if no step was taken).
std::vector<double> solve_newton_step(const Mesh& mesh, const WeightField& a,
                                      const ExponentPair& pq, const ScalarField& u,
                                      double eps, const std::vector<double>& grad,
                                      double eta) {
    const int n = mesh.nodeCount();
    std::vector<double> d(n, 0.0);
    std::vector<double> r(n);
    for (int i = 0; i < n; ++i) r[i] = -grad[i];
    std::vector<double> p = r;
    double rr = dot_nodal(r, r);
    const double target = eta * std::sqrt(rr);
    const int maxSteps = std::max(2 * n, 20);
    for (int it = 0; it < maxSteps && std::sqrt(rr) > target; ++it) {
        ScalarField Hp = approx_hessian_apply(mesh, a, pq, u, eps, ScalarField(mesh, p));
        double pHp = dot_nodal(p, Hp.values);
        if (pHp <= 1e-14 * dot_nodal(p, p)) {
            if (it == 0) return std::vector<double>(r);
            break;
        }
        double alpha = rr / pHp;
        axpy(alpha, p, d);
        axpy(-alpha, Hp.values, r);
        double rrNew = dot_nodal(r, r);
        double beta = rrNew / rr;
        rr = rrNew;
        for (int i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    }
    return d;
}

double lambda_p_of(const Mesh& mesh, const WeightField& a, const ExponentPair& pq,
                   const ScalarField& u) {
    return luxemburg_norm(mesh, a, pq, gradient_operator(mesh, u.values));
}

}  // namespace

SolveReport minimize_approx(const Mesh& mesh, const WeightField& a,
                            const ExponentPair& pq, const BoundaryData& g,
                            const SolveOptions& options) {
    if (options.maxIterations < 1)
        fail("invalid-parameter", "solver needs at least one iteration");
    auto compat = check_compatibility(mesh, g, options.compatibilityTol);
    if (!compat.pass)
        fail("compatibility", "boundary datum has nonzero total flux (residual " +
                                  std::to_string(compat.residual) + ")");
    const double eps = options.eps.value_or(default_epsilon(pq.p));
    if (eps == 0.0 && pq.p < 2.0)
        fail("regularization-required", "Newton minimization needs eps > 0 for p < 2");

    ScalarField u = options.initialGuess ? project_mean_zero(mesh, *options.initialGuess)
                                         : ScalarField::zeros(mesh);

    SolveReport report;
    report.epsUsed = eps;
    double energy = approx_energy(mesh, a, pq, g, u, eps);
    if (!std::isfinite(energy))
        fail("numeric", "energy is not finite at the initial iterate");
    ScalarField grad = approx_gradient(mesh, a, pq, g, u, eps);
    double gnorm = norm_nodal(grad.values);
    report.energyHistory.push_back(energy);

    for (int iter = 0; iter < options.maxIterations; ++iter) {
        if (gnorm <= options.tol * (1.0 + std::abs(energy))) {
            report.converged = true;
            break;
        }
        double eta = std::min(0.1, gnorm);
        std::vector<double> step = solve_newton_step(mesh, a, pq, u, eps, grad.values, eta);
        double slope = dot_nodal(grad.values, step);
        if (!(slope < 0.0)) {
            for (int i = 0; i < mesh.nodeCount(); ++i) step[i] = -grad.values[i];
            slope = -gnorm * gnorm;
        }

        // Terminal regime: once the predicted decrease drops below the
        // energy's floating-point resolution the Armijo test can no longer
        // distinguish progress from rounding, so measure the full step by the
        // gradient norm instead.
        if (-slope <= 1e-14 * (1.0 + std::abs(energy))) {
            ScalarField trial = u;
            axpy(1.0, step, trial.values);
            double trialEnergy = approx_energy(mesh, a, pq, g, trial, eps);
            ScalarField trialGrad = approx_gradient(mesh, a, pq, g, trial, eps);
            double trialGnorm = norm_nodal(trialGrad.values);
            ++report.iterations;
            if (!std::isfinite(trialEnergy) || trialGnorm >= gnorm) break;
            u = std::move(trial);
            energy = trialEnergy;
            grad = std::move(trialGrad);
            gnorm = trialGnorm;
            report.energyHistory.push_back(energy);
            continue;
        }

        double t = 1.0;
        bool accepted = false;
        for (int back = 0; back <= 60; ++back) {
            ScalarField trial = u;
            axpy(t, step, trial.values);
            double trialEnergy = approx_energy(mesh, a, pq, g, trial, eps);
            if (std::isfinite(trialEnergy) && trialEnergy <= energy + 1e-4 * t * slope) {
                u = std::move(trial);
                energy = trialEnergy;
                accepted = true;
                break;
            }
            t *= 0.5;
            ++report.lineSearchBacktracks;
        }
        ++report.iterations;
        if (!accepted) break;  // line search exhausted, gradient test decides below

        grad = approx_gradient(mesh, a, pq, g, u, eps);
        gnorm = norm_nodal(grad.values);
        report.energyHistory.push_back(energy);
    }
    if (!report.converged) report.converged = gnorm <= options.tol * (1.0 + std::abs(energy));

    report.solution = std::move(u);
    report.energy = energy;
    report.gradientNorm = gnorm;
    report.lambdaP = lambda_p_of(mesh, a, pq, report.solution);
    return report;
}

namespace {

// Golden-section search for the minimizer of a unimodal 1-d function on
// [lo, hi], returning the abscissa. Tolerance is absolute.
template <typename F>
double golden_section(F&& f, double lo, double hi, double tol) {
    const double invPhi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - invPhi * (hi - lo);
    double x2 = lo + invPhi * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    while (hi - lo > tol) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - invPhi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invPhi * (hi - lo);
            f2 = f(x2);
        }
    }
    return (lo + hi) / 2.0;
}

// Expand an interval around 0 until it brackets a minimizer of the convex
// section f, then refine by golden section. Once both endpoint values reach
// f(0) the minimizer lies between them.
template <typename F>
double line_minimize(F&& f, double scale) {
    double step = std::max(scale, 1e-3);
    double f0 = f(0.0);
    double lo = -step, hi = step;
    double flo = f(lo), fhi = f(hi);
    for (int grow = 0; (flo < f0 || fhi < f0) && grow < 80; ++grow) {
        if (flo < f0) {
            lo *= 2.0;
            flo = f(lo);
        }
        if (fhi < f0) {
            hi *= 2.0;
            fhi = f(hi);
        }
    }
    return golden_section(f, lo, hi, 1e-14 * std::max(1.0, hi - lo));
}

}  // namespace

SolveReport oracle_minimize(const Mesh& mesh, const WeightField& a,
                            const ExponentPair& pq, const BoundaryData& g,
                            double eps) {
    const int n = mesh.nodeCount();
    if (n > 12)
        fail("oracle-scale", "reference minimizer is restricted to meshes with "
                             "at most 12 nodes");
    auto compat = check_compatibility(mesh, g, 1e-10);
    if (!compat.pass)
        fail("compatibility", "boundary datum has nonzero total flux (residual " +
                                  std::to_string(compat.residual) + ")");

    // Free coordinates are nodes 0..n-2; the last nodal value is eliminated
    // through the lumped measures so every iterate has exact zero mean.
    const std::vector<double>& w = mesh.lumpedNodeMeasures;
    auto lift = [&](const std::vector<double>& x) {
        std::vector<double> full(n, 0.0);
        double acc = 0.0;
        for (int i = 0; i + 1 < n; ++i) {
            full[i] = x[i];
            acc += w[i] * x[i];
        }
        full[n - 1] = -acc / w[n - 1];
        return full;
    };
    auto energyOf = [&](const std::vector<double>& x) {
        return approx_energy(mesh, a, pq, g, ScalarField(mesh, lift(x)), eps);
    };

    std::vector<double> x(n - 1, 0.0);
    double energy = energyOf(x);
    SolveReport report;
    report.epsUsed = eps;
    report.energyHistory.push_back(energy);

    const int maxSweeps = 20000;
    for (int sweep = 0; sweep < maxSweeps; ++sweep) {
        double before = energy;
        for (int i = 0; i + 1 < n; ++i) {
            auto along = [&](double t) {
                double saved = x[i];
                x[i] = saved + t;
                double e = energyOf(x);
                x[i] = saved;
                return e;
            };
            double t = line_minimize(along, std::abs(x[i]) * 0.5 + 1e-3);
            if (along(t) < energy) {
                x[i] += t;
                energy = energyOf(x);
            }
        }
        report.energyHistory.push_back(energy);
        ++report.iterations;
        if (before - energy < 1e-13) {
            report.converged = true;
            break;
        }
    }

    report.solution = ScalarField(mesh, lift(x));
    report.energy = energy;
    report.gradientNorm =
        norm_nodal(approx_gradient(mesh, a, pq, g, report.solution, eps).values);
    report.lambdaP = lambda_p_of(mesh, a, pq, report.solution);
    return report;
}

}  // namespace dphase
