#include "dphase/orlicz.hpp"

#include <algorithm>
#include <cmath>

namespace dphase {

ExponentPair::ExponentPair(double p_, double q_, int dim_) : p(p_), q(q_), dim(dim_) {
    if (!(p > 1.0)) fail("invalid-parameter", "exponent p must exceed 1");
    if (!(q > p)) fail("invalid-parameter", "exponent q must exceed p");
    if (dim != 1 && dim != 2) fail("invalid-parameter", "dimension must be 1 or 2");
    pConjugate = p / (p - 1.0);
    qConjugate = q / (q - 1.0);
    hypothesisH = q / p < 1.0 + 1.0 / dim;
}

namespace {

void check_cell_size(const Mesh& mesh, size_t n, const char* what) {
    if (static_cast<int>(n) != mesh.elementCount())
        fail("dimension-mismatch", std::string(what) + " has " + std::to_string(n) +
                                       " entries for " + std::to_string(mesh.elementCount()) +
                                       " elements");
}

// Shared reduction: per-element magnitudes, measures and centroid weights.
struct ModularData {
    std::vector<double> magnitude;
    std::vector<double> measure;
    std::vector<double> weight;
};

ModularData reduce(const Mesh& mesh, const WeightField& a, std::span<const Vec2> v) {
    check_cell_size(mesh, v.size(), "vector field");
    ModularData d;
    d.magnitude.resize(v.size());
    d.measure = mesh.elementMeasures;
    d.weight = a.centroidValues();
    for (size_t k = 0; k < v.size(); ++k) {
        d.magnitude[k] = norm(v[k]);
        if (!std::isfinite(d.magnitude[k]) || !std::isfinite(d.weight[k]))
            fail("numeric", "modular input has a non-finite value");
    }
    return d;
}

ModularData reduce(const Mesh& mesh, const WeightField& a, const ScalarField& v) {
    ModularData d;
    d.magnitude.resize(mesh.elementCount());
    d.measure = mesh.elementMeasures;
    d.weight = a.centroidValues();
    for (int k = 0; k < mesh.elementCount(); ++k) {
        const auto& el = mesh.elements[k];
        double s = 0.0;
        for (int j = 0; j < mesh.nodesPerElement(); ++j) s += v.values[el[j]];
        d.magnitude[k] = std::abs(s / mesh.nodesPerElement());
        if (!std::isfinite(d.magnitude[k]) || !std::isfinite(d.weight[k]))
            fail("numeric", "modular input has a non-finite value");
    }
    return d;
}

double modular_of(const ModularData& d, const ExponentPair& pq, double lambda) {
    double s = 0.0;
    for (size_t k = 0; k < d.magnitude.size(); ++k) {
        double t = d.magnitude[k] / lambda;
        s += d.measure[k] * (std::pow(t, pq.p) + d.weight[k] * std::pow(t, pq.q));
    }
    return s;
}

double luxemburg_of(const ModularData& d, const ExponentPair& pq) {
    double maxMag = 0.0;
    for (double t : d.magnitude) maxMag = std::max(maxMag, t);
    if (maxMag == 0.0) return 0.0;
    if (modular_of(d, pq, 1.0) == 0.0) return 0.0;  // positive values on null cells

    // Bracket the root of rho(v/lambda) = 1; rho is strictly decreasing in
    // lambda wherever it is positive.
    double lo = 1.0, hi = 1.0;
    if (modular_of(d, pq, 1.0) > 1.0) {
        while (modular_of(d, pq, hi) > 1.0) {
            hi *= 2.0;
            if (hi > 1e300) fail("numeric", "Luxemburg norm bracket overflow");
        }
    } else {
        while (modular_of(d, pq, lo) <= 1.0) {
            lo *= 0.5;
            if (lo < 1e-300) fail("numeric", "Luxemburg norm bracket underflow");
        }
    }

    for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        if (modular_of(d, pq, mid) > 1.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double modular_theta(const Mesh& mesh, const WeightField& a, const ExponentPair& pq,
                     std::span<const Vec2> v) {
    return modular_of(reduce(mesh, a, v), pq, 1.0);
}

double modular_theta(const Mesh& mesh, const WeightField& a, const ExponentPair& pq,
                     const ScalarField& v) {
    return modular_of(reduce(mesh, a, v), pq, 1.0);
}

double luxemburg_norm(const Mesh& mesh, const WeightField& a, const ExponentPair& pq,
                      std::span<const Vec2> v) {
    return luxemburg_of(reduce(mesh, a, v), pq);
}

double luxemburg_norm(const Mesh& mesh, const WeightField& a, const ExponentPair& pq,
                      const ScalarField& v) {
    return luxemburg_of(reduce(mesh, a, v), pq);
}

double weighted_lq_norm(const Mesh& mesh, const WeightField& a, double q,
                        std::span<const Vec2> v) {
    if (!(q >= 1.0)) fail("invalid-parameter", "weighted norm needs q >= 1");
    check_cell_size(mesh, v.size(), "vector field");
    double s = 0.0;
    for (int k = 0; k < mesh.elementCount(); ++k)
        s += mesh.elementMeasures[k] * a.centroidValue(k) * std::pow(norm(v[k]), q);
    return std::pow(s, 1.0 / q);
}

double discrete_total_variation(const Mesh& mesh, const ScalarField& u) {
    auto grads = gradient_operator(mesh, u);
    double s = 0.0;
    for (int k = 0; k < mesh.elementCount(); ++k)
        s += mesh.elementMeasures[k] * norm(grads[k]);
    return s;
}

double boundary_fractional_seminorm(const Mesh& mesh, const ScalarField& u, double q) {
    if (mesh.dim != 2)
        fail("unsupported-dimension",
             "the boundary fractional seminorm diagnostic is 2D only");
    if (!(q > 1.0)) fail("invalid-parameter", "fractional seminorm needs q > 1");

    const size_t nf = mesh.boundaryFacets.size();
    std::vector<Vec2> mid(nf);
    std::vector<double> trace(nf);
    for (size_t f = 0; f < nf; ++f) {
        const BoundaryFacet& facet = mesh.boundaryFacets[f];
        mid[f] = (mesh.nodes[facet.nodes[0]] + mesh.nodes[facet.nodes[1]]) * 0.5;
        trace[f] = 0.5 * (u.values[facet.nodes[0]] + u.values[facet.nodes[1]]);
    }

    const double kernelExponent = (mesh.dim - 1) + q * (1.0 - 1.0 / q);
    double s = 0.0;
    for (size_t i = 0; i < nf; ++i) {
        for (size_t j = 0; j < nf; ++j) {
            if (i == j) continue;
            double dist = norm(mid[i] - mid[j]);
            s += std::pow(std::abs(trace[i] - trace[j]), q) /
                 std::pow(dist, kernelExponent) * mesh.boundaryFacets[i].measure *
                 mesh.boundaryFacets[j].measure;
        }
    }
    return std::pow(s, 1.0 / q);
}

}  // namespace dphase
