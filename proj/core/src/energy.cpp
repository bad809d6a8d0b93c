#include "dphase/energy.hpp"

#include <algorithm>
#include <cmath>

namespace dphase {

namespace {

void check_field(const Mesh& mesh, const ScalarField& u, const char* what) {
    if (static_cast<int>(u.values.size()) != mesh.nodeCount())
        fail("dimension-mismatch", std::string(what) + " does not match the mesh");
}

void check_eps(double eps) {
    if (!(eps >= 0.0) || !std::isfinite(eps))
        fail("invalid-parameter", "smoothing parameter eps must be nonnegative");
}

// Boundary load vector: b_i = integral over the boundary of g phi_i.
std::vector<double> boundary_load(const Mesh& mesh, const BoundaryData& g) {
    std::vector<double> b(mesh.nodeCount(), 0.0);
    for (size_t f = 0; f < mesh.boundaryFacets.size(); ++f) {
        const BoundaryFacet& facet = mesh.boundaryFacets[f];
        double share = g.values[f] * facet.measure / mesh.facetNodeCount();
        for (int j = 0; j < mesh.facetNodeCount(); ++j) b[facet.nodes[j]] += share;
    }
    return b;
}

}  // namespace

double default_epsilon(double p) { return std::max(1e-10, 1e-4 * (p - 1.0)); }

double approx_energy(const Mesh& mesh, const WeightField& a, const ExponentPair& pq,
                     const BoundaryData& g, const ScalarField& u, double eps) {
    check_field(mesh, u, "solution field");
    check_eps(eps);
    auto grads = gradient_operator(mesh, u);
    const double epsP = std::pow(eps, pq.p);
    const double epsQ = std::pow(eps, pq.q);
    double e = 0.0;
    for (int k = 0; k < mesh.elementCount(); ++k) {
        double m = std::sqrt(dot(grads[k], grads[k]) + eps * eps);
        double aC = a.centroidValue(k);
        e += mesh.elementMeasures[k] * ((std::pow(m, pq.p) - epsP) / pq.p +
                                        aC * (std::pow(m, pq.q) - epsQ) / pq.q);
    }
    return e - boundary_integral(mesh, g, u);
}

ScalarField approx_gradient(const Mesh& mesh, const WeightField& a,
                            const ExponentPair& pq, const BoundaryData& g,
                            const ScalarField& u, double eps) {
    check_field(mesh, u, "solution field");
    check_eps(eps);
    auto grads = gradient_operator(mesh, u);
    std::vector<double> G(mesh.nodeCount(), 0.0);
    for (int k = 0; k < mesh.elementCount(); ++k) {
        double m = std::sqrt(dot(grads[k], grads[k]) + eps * eps);
        if (m == 0.0) continue;
        double coef = std::pow(m, pq.p - 2.0) + a.centroidValue(k) * std::pow(m, pq.q - 2.0);
        Vec2 flux = coef * grads[k];
        for (int j = 0; j < mesh.nodesPerElement(); ++j)
            G[mesh.elements[k][j]] += mesh.elementMeasures[k] * dot(flux, mesh.hatGradients[k][j]);
    }
    auto b = boundary_load(mesh, g);
    for (int i = 0; i < mesh.nodeCount(); ++i) G[i] -= b[i];
    return ScalarField(mesh, project_dual_mean_zero(mesh, std::move(G)));
}

ScalarField approx_hessian_apply(const Mesh& mesh, const WeightField& a,
                                 const ExponentPair& pq, const ScalarField& u,
                                 double eps, const ScalarField& direction) {
    check_field(mesh, u, "solution field");
    check_field(mesh, direction, "direction field");
    check_eps(eps);
    if (eps == 0.0 && pq.p < 2.0)
        fail("regularization-required",
             "the Hessian needs eps > 0 for p < 2 (density not twice "
             "differentiable at vanishing gradients)");

    auto grads = gradient_operator(mesh, u);
    // Project the direction first and the assembled action last, so the
    // operator is symmetric and positive semidefinite on arbitrary inputs.
    auto dir = project_dual_mean_zero(mesh, direction.values);
    auto dirGrads = gradient_operator(mesh, dir);
    std::vector<double> H(mesh.nodeCount(), 0.0);
    for (int k = 0; k < mesh.elementCount(); ++k) {
        double aC = a.centroidValue(k);
        double m = std::sqrt(dot(grads[k], grads[k]) + eps * eps);
        Vec2 flux;
        if (m == 0.0) {
            double c1 = pq.p == 2.0 ? 1.0 : 0.0;  // q > p = 2 contributes nothing
            flux = c1 * dirGrads[k];
        } else {
            double c1 = std::pow(m, pq.p - 2.0) + aC * std::pow(m, pq.q - 2.0);
            double c2 = (pq.p - 2.0) * std::pow(m, pq.p - 4.0) +
                        aC * (pq.q - 2.0) * std::pow(m, pq.q - 4.0);
            flux = c1 * dirGrads[k] + (c2 * dot(grads[k], dirGrads[k])) * grads[k];
        }
        for (int j = 0; j < mesh.nodesPerElement(); ++j)
            H[mesh.elements[k][j]] += mesh.elementMeasures[k] * dot(flux, mesh.hatGradients[k][j]);
    }
    return ScalarField(mesh, project_dual_mean_zero(mesh, std::move(H)));
}

double limit_energy(const Mesh& mesh, const WeightField& a, double q,
                    const BoundaryData& g, const ScalarField& u) {
    return limit_energy_cellwise(mesh, a.centroidValues(), q, g, u);
}

double limit_energy_cellwise(const Mesh& mesh, std::span<const double> aCell, double q,
                             const BoundaryData& g, const ScalarField& u) {
    check_field(mesh, u, "solution field");
    if (!(q > 1.0)) fail("invalid-parameter", "limit energy needs q > 1");
    if (static_cast<int>(aCell.size()) != mesh.elementCount())
        fail("dimension-mismatch", "cell weight vector does not match the mesh");
    auto grads = gradient_operator(mesh, u);
    double e = 0.0;
    for (int k = 0; k < mesh.elementCount(); ++k) {
        double mag = norm(grads[k]);
        e += mesh.elementMeasures[k] * (mag + aCell[k] * std::pow(mag, q) / q);
    }
    return e - boundary_integral(mesh, g, u);
}

}  // namespace dphase
