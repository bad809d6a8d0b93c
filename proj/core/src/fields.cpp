#include "dphase/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dphase/orlicz.hpp"

namespace dphase {

namespace {

void check_nodal_size(const Mesh& mesh, size_t n, const char* what) {
    if (static_cast<int>(n) != mesh.nodeCount())
        fail("dimension-mismatch", std::string(what) + " has " + std::to_string(n) +
                                       " values for " + std::to_string(mesh.nodeCount()) +
                                       " nodes");
}

}  // namespace

ScalarField::ScalarField(const Mesh& m, std::vector<double> v)
    : mesh(&m), values(std::move(v)) {
    check_nodal_size(m, values.size(), "scalar field");
}

ScalarField ScalarField::zeros(const Mesh& m) {
    return ScalarField(m, std::vector<double>(m.nodeCount(), 0.0));
}

WeightField::WeightField(const Mesh& m, std::vector<double> v,
                         std::optional<double> lipschitz)
    : mesh(&m), values(std::move(v)), lipschitzConstant(lipschitz) {
    check_nodal_size(m, values.size(), "weight field");
    for (double w : values) {
        if (!std::isfinite(w)) fail("numeric", "weight field has a non-finite value");
        if (w < 0.0) fail("invalid-parameter", "weight field has a negative value");
    }
    if (lipschitzConstant && *lipschitzConstant < 0.0)
        fail("invalid-parameter", "declared Lipschitz constant must be nonnegative");
}

WeightField WeightField::constant(const Mesh& m, double value) {
    return WeightField(m, std::vector<double>(m.nodeCount(), value));
}

double WeightField::centroidValue(int element) const {
    const auto& el = mesh->elements[element];
    double s = 0.0;
    for (int j = 0; j < mesh->nodesPerElement(); ++j) s += values[el[j]];
    return s / mesh->nodesPerElement();
}

std::vector<double> WeightField::centroidValues() const {
    std::vector<double> out(mesh->elementCount());
    for (int k = 0; k < mesh->elementCount(); ++k) out[k] = centroidValue(k);
    return out;
}

BoundaryData::BoundaryData(const Mesh& m, std::vector<double> v)
    : mesh(&m), values(std::move(v)) {
    if (values.size() != m.boundaryFacets.size())
        fail("dimension-mismatch",
             "boundary data has " + std::to_string(values.size()) + " values for " +
                 std::to_string(m.boundaryFacets.size()) + " boundary facets");
    for (double g : values)
        if (!std::isfinite(g)) fail("numeric", "boundary data has a non-finite value");
}

BoundaryData BoundaryData::constant(const Mesh& m, double value) {
    return BoundaryData(m, std::vector<double>(m.boundaryFacets.size(), value));
}

double integrate_scalar(const Mesh& mesh, const ScalarField& u) {
    check_nodal_size(mesh, u.values.size(), "scalar field");
    double s = 0.0;
    for (int i = 0; i < mesh.nodeCount(); ++i) s += mesh.lumpedNodeMeasures[i] * u.values[i];
    return s;
}

ScalarField project_mean_zero(const Mesh& mesh, const ScalarField& u) {
    double mean = integrate_scalar(mesh, u) / mesh.volume;
    ScalarField out(mesh, u.values);
    for (double& v : out.values) v -= mean;
    return out;
}

std::vector<double> project_dual_mean_zero(const Mesh& mesh, std::vector<double> v) {
    check_nodal_size(mesh, v.size(), "dual vector");
    const auto& w = mesh.lumpedNodeMeasures;
    double vw = 0.0, ww = 0.0;
    for (int i = 0; i < mesh.nodeCount(); ++i) {
        vw += v[i] * w[i];
        ww += w[i] * w[i];
    }
    double c = vw / ww;
    for (int i = 0; i < mesh.nodeCount(); ++i) v[i] -= c * w[i];
    return v;
}

double boundary_integral(const Mesh& mesh, const BoundaryData& g, const ScalarField& v) {
    check_nodal_size(mesh, v.values.size(), "scalar field");
    if (g.mesh != &mesh && g.values.size() != mesh.boundaryFacets.size())
        fail("dimension-mismatch", "boundary data does not match the mesh");
    double s = 0.0;
    for (size_t f = 0; f < mesh.boundaryFacets.size(); ++f) {
        const BoundaryFacet& facet = mesh.boundaryFacets[f];
        double trace = v.values[facet.nodes[0]];
        if (mesh.facetNodeCount() == 2)
            trace = 0.5 * (trace + v.values[facet.nodes[1]]);
        s += g.values[f] * facet.measure * trace;
    }
    return s;
}

CompatibilityReport check_compatibility(const Mesh& mesh, const BoundaryData& g,
                                        double tol) {
    if (!(tol > 0.0)) fail("invalid-parameter", "compatibility tolerance must be positive");
    CompatibilityReport rep;
    rep.tol = tol;
    double absIntegral = 0.0;
    for (size_t f = 0; f < mesh.boundaryFacets.size(); ++f) {
        rep.residual += g.values[f] * mesh.boundaryFacets[f].measure;
        absIntegral += std::abs(g.values[f]) * mesh.boundaryFacets[f].measure;
    }
    rep.scale = std::max(1.0, absIntegral);
    rep.pass = std::abs(rep.residual) <= tol * rep.scale;
    return rep;
}

WeightHypothesisReport check_weight_hypotheses(const Mesh& mesh, const WeightField& a,
                                               const ExponentPair& pq, bool strictMode) {
    WeightHypothesisReport rep;

    rep.minBoundaryValue = std::numeric_limits<double>::infinity();
    for (int i = 0; i < mesh.nodeCount(); ++i)
        if (mesh.boundaryNode[i]) rep.minBoundaryValue = std::min(rep.minBoundaryValue, a.values[i]);
    rep.boundaryPositive = rep.minBoundaryValue > 0.0;

    rep.ratio = pq.q / pq.p;
    rep.ratioBound = 1.0 + 1.0 / mesh.dim;
    rep.ratioOk = rep.ratio < rep.ratioBound;

    if (a.lipschitzConstant) {
        rep.lipschitzDeclared = true;
        rep.declaredLipschitz = *a.lipschitzConstant;
        for (int k = 0; k < mesh.elementCount(); ++k) {
            const auto& el = mesh.elements[k];
            for (int i = 0; i < mesh.nodesPerElement(); ++i) {
                for (int j = i + 1; j < mesh.nodesPerElement(); ++j) {
                    double d = norm(mesh.nodes[el[i]] - mesh.nodes[el[j]]);
                    if (d <= 0.0) continue;
                    double quot = std::abs(a.values[el[i]] - a.values[el[j]]) / d;
                    rep.maxDifferenceQuotient = std::max(rep.maxDifferenceQuotient, quot);
                }
            }
        }
        rep.lipschitzOk =
            rep.maxDifferenceQuotient <= rep.declaredLipschitz * (1.0 + 1e-12);
    }

    if (strictMode) {
        if (!rep.boundaryPositive)
            fail("hypothesis-violation",
                 "weight vanishes on the boundary (min boundary value " +
                     std::to_string(rep.minBoundaryValue) + ")");
        if (!rep.ratioOk)
            fail("hypothesis-violation",
                 "exponent ratio q/p = " + std::to_string(rep.ratio) +
                     " is not below 1 + 1/N = " + std::to_string(rep.ratioBound));
        if (!rep.lipschitzOk)
            fail("hypothesis-violation",
                 "weight difference quotient " + std::to_string(rep.maxDifferenceQuotient) +
                     " exceeds the declared Lipschitz constant " +
                     std::to_string(rep.declaredLipschitz));
    }
    return rep;
}

namespace {

// Brute-force point location plus P1 evaluation, accurate enough for the
// modest meshes the sampled A_q estimate runs on.
struct PointEvaluator {
    const Mesh& mesh;
    const WeightField& a;

    std::optional<double> operator()(Vec2 pt) const {
        const double tol = 1e-12;
        for (int k = 0; k < mesh.elementCount(); ++k) {
            const auto& el = mesh.elements[k];
            if (mesh.dim == 1) {
                double x0 = mesh.nodes[el[0]].x, x1 = mesh.nodes[el[1]].x;
                double lo = std::min(x0, x1), hi = std::max(x0, x1);
                if (pt.x < lo - tol || pt.x > hi + tol) continue;
                double t = (pt.x - x0) / (x1 - x0);
                return (1.0 - t) * a.values[el[0]] + t * a.values[el[1]];
            }
            Vec2 p0 = mesh.nodes[el[0]], p1 = mesh.nodes[el[1]], p2 = mesh.nodes[el[2]];
            double D = (p1.x - p0.x) * (p2.y - p0.y) - (p1.y - p0.y) * (p2.x - p0.x);
            double l1 = ((pt.x - p0.x) * (p2.y - p0.y) - (pt.y - p0.y) * (p2.x - p0.x)) / D;
            double l2 = ((p1.x - p0.x) * (pt.y - p0.y) - (p1.y - p0.y) * (pt.x - p0.x)) / D;
            double l0 = 1.0 - l1 - l2;
            if (l0 < -tol || l1 < -tol || l2 < -tol) continue;
            return l0 * a.values[el[0]] + l1 * a.values[el[1]] + l2 * a.values[el[2]];
        }
        return std::nullopt;
    }
};

}  // namespace

double check_muckenhoupt(const Mesh& mesh, const WeightField& a, double q,
                         int cubeLevels) {
    if (!(q > 1.0)) fail("invalid-parameter", "A_q estimate needs q > 1");
    if (cubeLevels < 0) fail("invalid-parameter", "cubeLevels must be nonnegative");
    for (double w : a.values)
        if (w <= 0.0)
            fail("weight-degenerate",
                 "A_q estimate needs strictly positive nodal weights");

    Vec2 lo = mesh.nodes.front(), hi = mesh.nodes.front();
    for (Vec2 p : mesh.nodes) {
        lo.x = std::min(lo.x, p.x);
        lo.y = std::min(lo.y, p.y);
        hi.x = std::max(hi.x, p.x);
        hi.y = std::max(hi.y, p.y);
    }

    PointEvaluator eval{mesh, a};
    const int samplesPerAxis = mesh.dim == 1 ? 16 : 6;
    const double expo = -1.0 / (q - 1.0);
    double best = 0.0;

    for (int level = 0; level <= cubeLevels; ++level) {
        int cells = 1 << level;
        double hx = (hi.x - lo.x) / cells;
        double hy = mesh.dim == 2 ? (hi.y - lo.y) / cells : 0.0;
        int cellsY = mesh.dim == 2 ? cells : 1;
        for (int cy = 0; cy < cellsY; ++cy) {
            for (int cx = 0; cx < cells; ++cx) {
                double sumA = 0.0, sumInv = 0.0;
                int count = 0;
                for (int sy = 0; sy < (mesh.dim == 2 ? samplesPerAxis : 1); ++sy) {
                    for (int sx = 0; sx < samplesPerAxis; ++sx) {
                        Vec2 pt;
                        pt.x = lo.x + hx * (cx + (sx + 0.5) / samplesPerAxis);
                        pt.y = mesh.dim == 2
                                   ? lo.y + hy * (cy + (sy + 0.5) / samplesPerAxis)
                                   : 0.0;
                        auto v = eval(pt);
                        if (!v) continue;
                        if (*v <= 0.0)
                            fail("weight-degenerate",
                                 "A_q estimate sampled a nonpositive weight value");
                        sumA += *v;
                        sumInv += std::pow(*v, expo);
                        ++count;
                    }
                }
                if (count == 0) continue;
                double avgA = sumA / count;
                double avgInv = sumInv / count;
                best = std::max(best, avgA * std::pow(avgInv, q - 1.0));
            }
        }
    }
    return best;
}

}  // namespace dphase
