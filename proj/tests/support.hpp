#pragma once

// Shared helpers for the unit and acceptance suites: seeded random fields,
// random compatible boundary data, and reference quantities computed by
// routes independent of the library code under test.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "dphase/continuation.hpp"
#include "dphase/energy.hpp"
#include "dphase/fields.hpp"
#include "dphase/mesh.hpp"
#include "dphase/orlicz.hpp"
#include "dphase/solver.hpp"

namespace testsupport {

using namespace dphase;

inline ScalarField random_field(const Mesh& mesh, std::mt19937_64& rng,
                                double amplitude = 1.0) {
    std::uniform_real_distribution<double> unif(-amplitude, amplitude);
    std::vector<double> values(mesh.nodeCount());
    for (double& v : values) v = unif(rng);
    return ScalarField(mesh, std::move(values));
}

inline ScalarField random_mean_zero_field(const Mesh& mesh, std::mt19937_64& rng,
                                          double amplitude = 1.0) {
    return project_mean_zero(mesh, random_field(mesh, rng, amplitude));
}

/// Random boundary datum with exact zero total flux: random facet values with
/// the weighted mean removed, so the compatibility integral vanishes.
inline BoundaryData random_compatible_boundary(const Mesh& mesh, std::mt19937_64& rng,
                                               double amplitude = 1.0) {
    std::uniform_real_distribution<double> unif(-amplitude, amplitude);
    std::vector<double> values(mesh.boundaryFacets.size());
    for (double& v : values) v = unif(rng);
    double total = 0.0;
    for (size_t f = 0; f < values.size(); ++f)
        total += values[f] * mesh.boundaryFacets[f].measure;
    for (size_t f = 0; f < values.size(); ++f)
        values[f] -= total / mesh.boundaryMeasure;
    return BoundaryData(mesh, std::move(values));
}

/// Central finite difference of the energy along a direction.
inline double energy_directional_fd(const Mesh& mesh, const WeightField& a,
                                    const ExponentPair& pq, const BoundaryData& g,
                                    const ScalarField& u, const ScalarField& dir,
                                    double eps, double h) {
    ScalarField up = u, um = u;
    for (int i = 0; i < mesh.nodeCount(); ++i) {
        up.values[i] += h * dir[i];
        um.values[i] -= h * dir[i];
    }
    double fp = approx_energy(mesh, a, pq, g, up, eps);
    double fm = approx_energy(mesh, a, pq, g, um, eps);
    return (fp - fm) / (2.0 * h);
}

/// Central finite difference of the gradient along a direction (a vector).
inline std::vector<double> gradient_directional_fd(const Mesh& mesh, const WeightField& a,
                                                   const ExponentPair& pq,
                                                   const BoundaryData& g,
                                                   const ScalarField& u,
                                                   const ScalarField& dir, double eps,
                                                   double h) {
    ScalarField up = u, um = u;
    for (int i = 0; i < mesh.nodeCount(); ++i) {
        up.values[i] += h * dir[i];
        um.values[i] -= h * dir[i];
    }
    ScalarField gp = approx_gradient(mesh, a, pq, g, up, eps);
    ScalarField gm = approx_gradient(mesh, a, pq, g, um, eps);
    std::vector<double> out(mesh.nodeCount());
    for (int i = 0; i < mesh.nodeCount(); ++i)
        out[i] = (gp[i] - gm[i]) / (2.0 * h);
    return out;
}

/// Run a callable expected to throw and report the error kind ("" if it ran
/// through), so tests can assert on the failure class without string-matching
/// whole messages.
template <typename Fn>
inline std::string error_kind(Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    return "";
}

inline double dot(const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

inline double norm(const std::vector<double>& x) { return std::sqrt(dot(x, x)); }

inline double sup_norm(const std::vector<double>& x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

/// Scalar-modular reference: the modular of a spatially constant gradient
/// magnitude field on a mesh of unit total volume reduces to a one-line
/// formula, evaluated here without touching the library reduction.
inline double constant_modular_reference(double volume, double s, double a, double p,
                                         double q) {
    return volume * (std::pow(s, p) + a * std::pow(s, q));
}

/// Independent Luxemburg solver for constant data: solve
/// volume*((s/l)^p + a (s/l)^q) = 1 for l by plain bisection on [lo, hi].
inline double scalar_luxemburg_reference(double volume, double s, double a, double p,
                                         double q) {
    if (s == 0.0) return 0.0;
    auto modular = [&](double l) {
        return volume * (std::pow(s / l, p) + a * std::pow(s / l, q));
    };
    double lo = s * 1e-12, hi = s;
    while (modular(hi) > 1.0) hi *= 2.0;
    while (modular(lo) < 1.0) lo *= 0.5;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        (modular(mid) > 1.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Dense direct solve of the p=2, a≡0 case: the smoothing term cancels
/// exactly, the energy is 1/2 u^T K u - b^T u, and the mean-zero slice is
/// handled by a Lagrange multiplier. Gaussian elimination, no library code.
inline std::vector<double> quadratic_reference_solution(const Mesh& mesh,
                                                        const BoundaryData& g) {
    const int n = mesh.nodeCount();
    const int m = n + 1;
    std::vector<double> A(m * m, 0.0), b(m, 0.0);
    for (int k = 0; k < mesh.elementCount(); ++k) {
        const double w = mesh.elementMeasures[k];
        for (int i = 0; i < mesh.nodesPerElement(); ++i)
            for (int j = 0; j < mesh.nodesPerElement(); ++j) {
                const int gi = mesh.elements[k][i], gj = mesh.elements[k][j];
                A[gi * m + gj] +=
                    w * dphase::dot(mesh.hatGradients[k][i], mesh.hatGradients[k][j]);
            }
    }
    for (size_t f = 0; f < mesh.boundaryFacets.size(); ++f) {
        const BoundaryFacet& facet = mesh.boundaryFacets[f];
        const double share = facet.measure / mesh.facetNodeCount();
        for (int j = 0; j < mesh.facetNodeCount(); ++j) b[facet.nodes[j]] += g.values[f] * share;
    }
    for (int i = 0; i < n; ++i) {
        A[i * m + n] = mesh.lumpedNodeMeasures[i];
        A[n * m + i] = mesh.lumpedNodeMeasures[i];
    }
    // Gaussian elimination with partial pivoting on the bordered system.
    std::vector<double> x = b;
    std::vector<int> piv(m);
    for (int i = 0; i < m; ++i) piv[i] = i;
    for (int c = 0; c < m; ++c) {
        int best = c;
        for (int r = c + 1; r < m; ++r)
            if (std::abs(A[r * m + c]) > std::abs(A[best * m + c])) best = r;
        for (int cc = 0; cc < m; ++cc) std::swap(A[c * m + cc], A[best * m + cc]);
        std::swap(x[c], x[best]);
        for (int r = c + 1; r < m; ++r) {
            double factor = A[r * m + c] / A[c * m + c];
            for (int cc = c; cc < m; ++cc) A[r * m + cc] -= factor * A[c * m + cc];
            x[r] -= factor * x[c];
        }
    }
    for (int r = m - 1; r >= 0; --r) {
        for (int cc = r + 1; cc < m; ++cc) x[r] -= A[r * m + cc] * x[cc];
        x[r] /= A[r * m + r];
    }
    x.resize(n);
    return x;
}

}  // namespace testsupport
