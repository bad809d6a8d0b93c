#include "dphase/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace dphase {

std::vector<double> default_p_schedule(int K) {
    if (K < 1) fail("invalid-parameter", "schedule length must be at least one");
    std::vector<double> schedule(K);
    for (int k = 1; k <= K; ++k) schedule[k - 1] = 1.0 + std::pow(2.0, -k);
    return schedule;
}

FluxField extract_flux(const Mesh& mesh, const WeightField& a, const ExponentPair& pq,
                       const ScalarField& u, double eps) {
    if (!(eps >= 0.0)) fail("invalid-parameter", "eps must be nonnegative");
    auto grads = gradient_operator(mesh, u);
    FluxField flux;
    flux.mesh = &mesh;
    flux.z.resize(mesh.elementCount());
    flux.w.resize(mesh.elementCount());
    flux.zeta.resize(mesh.elementCount());
    for (int k = 0; k < mesh.elementCount(); ++k) {
        Vec2 w = grads[k];
        double m = std::sqrt(dot(w, w) + eps * eps);
        Vec2 z = m == 0.0 ? Vec2{0.0, 0.0} : std::pow(m, pq.p - 2.0) * w;
        double mag = norm(w);
        Vec2 phaseQ = mag == 0.0 ? Vec2{0.0, 0.0}
                                 : (a.centroidValue(k) * std::pow(mag, pq.q - 2.0)) * w;
        flux.w[k] = w;
        flux.z[k] = z;
        flux.zeta[k] = z + phaseQ;
    }
    return flux;
}

namespace {

std::vector<double> boundary_lumped_load(const Mesh& mesh, const BoundaryData& g) {
    std::vector<double> b(mesh.nodeCount(), 0.0);
    for (size_t f = 0; f < mesh.boundaryFacets.size(); ++f) {
        const BoundaryFacet& facet = mesh.boundaryFacets[f];
        double share = g.values[f] * facet.measure / mesh.facetNodeCount();
        for (int j = 0; j < mesh.facetNodeCount(); ++j) b[facet.nodes[j]] += share;
    }
    return b;
}

}  // namespace

VerificationRecord verify_limit_solution_cellwise(const Mesh& mesh,
                                                  std::span<const double> aCell,
                                                  double q, const BoundaryData& g,
                                                  const ScalarField& u,
                                                  const FluxField& flux,
                                                  const VerifyTols& tols) {
    if (!(q > 1.0)) fail("invalid-parameter", "verification needs q > 1");
    if (static_cast<int>(aCell.size()) != mesh.elementCount())
        fail("dimension-mismatch", "cell weight vector does not match the mesh");
    if (static_cast<int>(flux.z.size()) != mesh.elementCount() ||
        static_cast<int>(flux.zeta.size()) != mesh.elementCount())
        fail("dimension-mismatch", "flux field does not match the mesh");
    if (tols.probes < 1) fail("invalid-parameter", "verification needs at least one probe");

    VerificationRecord rec;
    rec.tols = tols;
    auto grads = gradient_operator(mesh, u);

    double maxGrad = 0.0;
    for (const Vec2& gk : grads) maxGrad = std::max(maxGrad, norm(gk));
    rec.gradFloor =
        std::max(tols.gradFloorRel * maxGrad, std::max(tols.gradFloorAbs, 1e-12));

    for (int k = 0; k < mesh.elementCount(); ++k) {
        double mag = norm(grads[k]);
        if (mag <= rec.gradFloor) continue;
        ++rec.pairedElements;
        rec.pairing = std::max(rec.pairing, std::abs(1.0 - dot(flux.z[k], grads[k]) / mag));
    }
    rec.pairingVacuous = rec.pairedElements == 0;
    rec.pairingPass = rec.pairingVacuous || rec.pairing <= tols.pairing;

    double maxZ = 0.0;
    for (const Vec2& zk : flux.z) maxZ = std::max(maxZ, norm(zk));
    rec.supNorm = maxZ - 1.0;
    rec.supNormPass = rec.supNorm <= tols.supNorm;

    double zetaL2 = 0.0;
    for (int k = 0; k < mesh.elementCount(); ++k)
        zetaL2 += mesh.elementMeasures[k] * dot(flux.zeta[k], flux.zeta[k]);
    zetaL2 = std::sqrt(zetaL2);

    std::vector<double> pairingWithHats(mesh.nodeCount(), 0.0);
    std::vector<double> hatL2(mesh.nodeCount(), 0.0);
    for (int k = 0; k < mesh.elementCount(); ++k) {
        for (int j = 0; j < mesh.nodesPerElement(); ++j) {
            int i = mesh.elements[k][j];
            const Vec2& hat = mesh.hatGradients[k][j];
            pairingWithHats[i] += mesh.elementMeasures[k] * dot(flux.zeta[k], hat);
            hatL2[i] += mesh.elementMeasures[k] * dot(hat, hat);
        }
    }
    auto load = boundary_lumped_load(mesh, g);
    for (int i = 0; i < mesh.nodeCount(); ++i) {
        double scale = zetaL2 * std::sqrt(hatL2[i]);
        if (mesh.boundaryNode[i]) {
            double denom = std::max({scale, std::abs(load[i]), 1e-14});
            rec.boundaryFlux =
                std::max(rec.boundaryFlux, std::abs(pairingWithHats[i] - load[i]) / denom);
        } else {
            double denom = std::max(scale, 1e-14);
            rec.divergence = std::max(rec.divergence, std::abs(pairingWithHats[i]) / denom);
        }
    }
    rec.divergencePass = rec.divergence <= tols.divergence;
    rec.boundaryFluxPass = rec.boundaryFlux <= tols.boundaryFlux;

    rec.limitEnergy = limit_energy_cellwise(mesh, aCell, q, g, u);
    double uScale = 1.0;
    for (double v : u.values) uScale = std::max(uScale, std::abs(v));
    std::mt19937_64 rng(tols.seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    double margin = std::numeric_limits<double>::infinity();
    const int pure = tols.probes / 2;
    for (int j = 0; j < tols.probes; ++j) {
        std::vector<double> v(mesh.nodeCount());
        if (j < pure) {
            double amp = std::pow(10.0, (j % 4) - 2.0);
            for (double& vi : v) vi = amp * unif(rng);
        } else {
            double amp = std::pow(10.0, (j % 4) - 3.0) * uScale;
            for (int i = 0; i < mesh.nodeCount(); ++i) v[i] = u.values[i] + amp * unif(rng);
        }
        ScalarField probe = project_mean_zero(mesh, ScalarField(mesh, std::move(v)));
        margin = std::min(margin, limit_energy_cellwise(mesh, aCell, q, g, probe) -
                                      rec.limitEnergy);
    }
    rec.minimalityMargin = margin;
    rec.minimalityPass = margin >= -tols.minimality * (1.0 + std::abs(rec.limitEnergy));
    return rec;
}

VerificationRecord verify_limit_solution(const Mesh& mesh, const WeightField& a,
                                         double q, const BoundaryData& g,
                                         const ScalarField& u, const FluxField& flux,
                                         const VerifyTols& tols) {
    return verify_limit_solution_cellwise(mesh, a.centroidValues(), q, g, u, flux, tols);
}

namespace {

// Node-to-element adjacency plus the lumped boundary mass, shared by the
// constant estimators.
struct Adjacency {
    std::vector<double> boundaryMass;
    std::vector<std::vector<std::pair<int, int>>> nodeElements;  // (element, local)

    explicit Adjacency(const Mesh& mesh)
        : boundaryMass(mesh.nodeCount(), 0.0), nodeElements(mesh.nodeCount()) {
        for (const BoundaryFacet& f : mesh.boundaryFacets)
            for (int j = 0; j < mesh.facetNodeCount(); ++j)
                boundaryMass[f.nodes[j]] += f.measure / mesh.facetNodeCount();
        for (int k = 0; k < mesh.elementCount(); ++k)
            for (int j = 0; j < mesh.nodesPerElement(); ++j)
                nodeElements[mesh.elements[k][j]].push_back({k, j});
    }
};

// Coordinate ascent on the lumped trace ratio
//   sum_i bMass_i |v_i| / (sum_i w_i |v_i| + sum_K |K| |grad v_K|),
// keeping running sums and per-element gradients so a candidate move at one
// node costs only its star. Returns the best ratio reached.
double trace_ascent(const Mesh& mesh, const Adjacency& adj, std::vector<double> v,
                    int maxSweeps) {
    auto grads = gradient_operator(mesh, v);
    double num = 0.0, vol = 0.0, semi = 0.0;
    for (int i = 0; i < mesh.nodeCount(); ++i) {
        num += adj.boundaryMass[i] * std::abs(v[i]);
        vol += mesh.lumpedNodeMeasures[i] * std::abs(v[i]);
    }
    for (int k = 0; k < mesh.elementCount(); ++k)
        semi += mesh.elementMeasures[k] * norm(grads[k]);
    double den = vol + semi;
    if (den <= 0.0) return 0.0;
    double ratio = num / den;

    const double steps[] = {4.0, 2.0, 1.0, 0.5, 0.25, 0.125};
    for (int sweep = 0; sweep < maxSweeps; ++sweep) {
        bool improved = false;
        double vScale = 0.0;
        for (double vi : v) vScale = std::max(vScale, std::abs(vi));
        if (vScale == 0.0) vScale = 1.0;
        for (int i = 0; i < mesh.nodeCount(); ++i) {
            double s = std::max(std::abs(v[i]), 0.25 * vScale);
            double bestT = 0.0, bestRatio = ratio;
            auto consider = [&](double t) {
                if (t == 0.0) return;
                double dAbs = std::abs(v[i] + t) - std::abs(v[i]);
                double dNum = adj.boundaryMass[i] * dAbs;
                double dDen = mesh.lumpedNodeMeasures[i] * dAbs;
                for (const auto& [k, j] : adj.nodeElements[i])
                    dDen += mesh.elementMeasures[k] *
                            (norm(grads[k] + t * mesh.hatGradients[k][j]) - norm(grads[k]));
                double newDen = den + dDen;
                if (newDen <= 1e-300) return;
                double r = (num + dNum) / newDen;
                if (r > bestRatio + 1e-14) {
                    bestRatio = r;
                    bestT = t;
                }
            };
            for (double m : steps) {
                consider(m * s);
                consider(-m * s);
            }
            consider(-v[i]);
            if (bestT != 0.0) {
                double dAbs = std::abs(v[i] + bestT) - std::abs(v[i]);
                num += adj.boundaryMass[i] * dAbs;
                den += mesh.lumpedNodeMeasures[i] * dAbs;
                for (const auto& [k, j] : adj.nodeElements[i]) {
                    den -= mesh.elementMeasures[k] * norm(grads[k]);
                    grads[k] += bestT * mesh.hatGradients[k][j];
                    den += mesh.elementMeasures[k] * norm(grads[k]);
                }
                v[i] += bestT;
                ratio = num / den;
                improved = true;
            }
        }
        if (!improved) break;
    }
    return ratio;
}

std::vector<double> boundary_distance(const Mesh& mesh) {
    std::vector<double> d(mesh.nodeCount(), std::numeric_limits<double>::infinity());
    for (int i = 0; i < mesh.nodeCount(); ++i)
        for (int b = 0; b < mesh.nodeCount(); ++b)
            if (mesh.boundaryNode[b])
                d[i] = std::min(d[i], norm(mesh.nodes[i] - mesh.nodes[b]));
    return d;
}

}  // namespace

double estimate_trace_constant(const Mesh& mesh, int randomStarts, std::uint64_t seed) {
    if (randomStarts < 0) fail("invalid-parameter", "random start count must be nonnegative");
    Adjacency adj(mesh);
    const int n = mesh.nodeCount();
    std::vector<std::vector<double>> starts;

    starts.emplace_back(n, 1.0);
    for (int axis = 0; axis < mesh.dim; ++axis)
        for (double sign : {1.0, -1.0}) {
            std::vector<double> ramp(n);
            for (int i = 0; i < n; ++i)
                ramp[i] = sign * (axis == 0 ? mesh.nodes[i].x : mesh.nodes[i].y);
            starts.push_back(std::move(ramp));
        }

    std::vector<int> boundaryNodes;
    for (int i = 0; i < n; ++i)
        if (mesh.boundaryNode[i]) boundaryNodes.push_back(i);
    size_t stride = std::max<size_t>(1, boundaryNodes.size() / 64);
    for (size_t b = 0; b < boundaryNodes.size(); b += stride) {
        std::vector<double> hat(n, 0.0);
        hat[boundaryNodes[b]] = 1.0;
        starts.push_back(std::move(hat));
    }

    auto dist = boundary_distance(mesh);
    for (double delta : {0.05, 0.1, 0.2, 0.4}) {
        std::vector<double> layer(n);
        for (int i = 0; i < n; ++i) layer[i] = std::exp(-dist[i] / (delta * mesh.diameter));
        starts.push_back(std::move(layer));
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int r = 0; r < randomStarts; ++r) {
        std::vector<double> v(n);
        for (double& vi : v) vi = unif(rng);
        starts.push_back(std::move(v));
    }

    double best = 0.0;
    for (auto& start : starts)
        best = std::max(best, trace_ascent(mesh, adj, std::move(start), 25));
    return best;
}

double estimate_poincare_constant(const Mesh& mesh, const WeightField& a,
                                  const ExponentPair& pq, int randomStarts,
                                  std::uint64_t seed) {
    if (randomStarts < 0) fail("invalid-parameter", "random start count must be nonnegative");
    const int n = mesh.nodeCount();
    auto ratioOf = [&](const std::vector<double>& v) {
        ScalarField centered = project_mean_zero(mesh, ScalarField(mesh, v));
        double den = mesh.diameter *
                     luxemburg_norm(mesh, a, pq, gradient_operator(mesh, centered.values));
        if (den <= 0.0) return 0.0;
        return luxemburg_norm(mesh, a, pq, centered) / den;
    };

    std::vector<std::vector<double>> starts;
    for (int axis = 0; axis < mesh.dim; ++axis) {
        std::vector<double> ramp(n), bowl(n);
        for (int i = 0; i < n; ++i) {
            double c = axis == 0 ? mesh.nodes[i].x : mesh.nodes[i].y;
            ramp[i] = c;
            bowl[i] = c * c;
        }
        starts.push_back(std::move(ramp));
        starts.push_back(std::move(bowl));
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int r = 0; r < randomStarts; ++r) {
        std::vector<double> v(n);
        for (double& vi : v) vi = unif(rng);
        starts.push_back(std::move(v));
    }

    double best = 0.0;
    std::vector<double> bestStart;
    for (auto& start : starts) {
        double r = ratioOf(start);
        if (r > best) {
            best = r;
            bestStart = start;
        }
    }
    if (bestStart.empty()) return best;

    // Light polish of the best start only; every Luxemburg evaluation is a
    // full bisection, so the budget stays small.
    std::vector<double> v = std::move(bestStart);
    for (int sweep = 0; sweep < 2; ++sweep) {
        bool improved = false;
        double vScale = 0.0;
        for (double vi : v) vScale = std::max(vScale, std::abs(vi));
        if (vScale == 0.0) vScale = 1.0;
        for (int i = 0; i < n; ++i) {
            double s = 0.5 * vScale;
            for (double t : {s, -s, 0.25 * s, -0.25 * s}) {
                double saved = v[i];
                v[i] = saved + t;
                double r = ratioOf(v);
                if (r > best + 1e-12) {
                    best = r;
                    improved = true;
                } else {
                    v[i] = saved;
                }
            }
        }
        if (!improved) break;
    }
    return best;
}

SmallnessReport smallness_check(const Mesh& mesh, const BoundaryData& g,
                                double traceEstimate, double poincareEstimate) {
    if (!(traceEstimate >= 0.0) || !(poincareEstimate >= 0.0))
        fail("invalid-parameter", "constant estimates must be nonnegative");
    SmallnessReport rep;
    rep.traceEstimate = traceEstimate;
    rep.poincareEstimate = poincareEstimate;
    rep.diameter = mesh.diameter;
    for (double gf : g.values) rep.gInf = std::max(rep.gInf, std::abs(gf));
    rep.value = 2.0 * traceEstimate * (poincareEstimate * mesh.diameter + 1.0) * rep.gInf;
    rep.pass = rep.value < 1.0;
    rep.margin = 1.0 - rep.value;
    return rep;
}

ContinuationReport run_continuation(const Mesh& mesh, const WeightField& a, double q,
                                    const BoundaryData& g,
                                    const std::vector<double>& schedule,
                                    const ContinuationOptions& options) {
    if (schedule.empty()) fail("invalid-parameter", "continuation schedule is empty");
    for (double p : schedule)
        if (!(p > 1.0 && p < q))
            fail("invalid-parameter", "schedule exponents must satisfy 1 < p < q");
    for (size_t i = 1; i < schedule.size(); ++i)
        if (!(schedule[i] < schedule[i - 1]))
            fail("invalid-parameter", "continuation schedule must decrease strictly");

    ContinuationReport report;
    report.schedule = schedule;

    ExponentPair finalPq(schedule.back(), q, mesh.dim);
    auto hyp = check_weight_hypotheses(mesh, a, finalPq, false);
    bool limitRatioOk = q < 1.0 + 1.0 / mesh.dim;
    if (options.strictHypothesis) {
        if (!hyp.boundaryPositive)
            fail("hypothesis-violation", "weight is not strictly positive on the boundary");
        if (!limitRatioOk)
            fail("hypothesis-violation",
                 "q must stay below 1 + 1/N for the continuation limit");
        if (!hyp.lipschitzOk)
            fail("hypothesis-violation", "weight exceeds its declared Lipschitz constant");
    } else {
        if (!hyp.boundaryPositive)
            report.warnings.push_back("weight vanishes somewhere on the boundary");
        if (!limitRatioOk)
            report.warnings.push_back("q is not below 1 + 1/N; the limit passage is "
                                      "outside the supported regime");
        if (!hyp.lipschitzOk)
            report.warnings.push_back("weight exceeds its declared Lipschitz constant");
    }

    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);

    ScalarField current = ScalarField::zeros(mesh);
    std::vector<Vec2> prevGrads;
    double lastP = schedule.front();
    double lastEps = options.solve.eps.value_or(default_epsilon(lastP));

    for (size_t idx = 0; idx < schedule.size(); ++idx) {
        double p = schedule[idx];
        ExponentPair pq(p, q, mesh.dim);
        SolveOptions so = options.solve;
        double eps = so.eps.value_or(default_epsilon(p));
        so.eps = eps;

        ScalarField guess = current;
        if (options.warmStartJitter > 0.0 && idx > 0)
            for (double& gi : guess.values) gi += options.warmStartJitter * unif(rng);
        so.initialGuess = std::move(guess);

        SolveReport solve = minimize_approx(mesh, a, pq, g, so);

        StepRecord rec;
        rec.k = static_cast<int>(idx) + 1;
        rec.p = p;
        rec.eps = eps;
        rec.energy = solve.energy;
        rec.lambdaP = solve.lambdaP;
        rec.newtonIterations = solve.iterations;
        rec.gradientNorm = solve.gradientNorm;
        rec.converged = solve.converged;

        auto grads = gradient_operator(mesh, solve.solution.values);
        if (idx == 0) {
            rec.gradIncrementLqA = 0.0;
        } else {
            std::vector<Vec2> diff(grads.size());
            for (size_t k = 0; k < grads.size(); ++k) diff[k] = grads[k] - prevGrads[k];
            rec.gradIncrementLqA = weighted_lq_norm(mesh, a, q, diff);
        }
        report.steps.push_back(rec);

        current = solve.solution;
        prevGrads = std::move(grads);
        lastP = p;
        lastEps = eps;

        if (!solve.converged) {
            std::ostringstream reason;
            reason << "step " << rec.k << " (p = " << p << ") did not converge after "
                   << solve.iterations << " iterations (gradient norm "
                   << solve.gradientNorm << ")";
            report.aborted = true;
            report.abortReason = reason.str();
            break;
        }
    }

    ExponentPair lastPq(lastP, q, mesh.dim);
    report.solution = current;
    report.flux = extract_flux(mesh, a, lastPq, current, lastEps);
    if (!report.aborted) {
        if (options.verify)
            report.verification =
                verify_limit_solution(mesh, a, q, g, current, report.flux, options.tols);
        if (options.estimateConstants) {
            ConstantsRecord constants;
            constants.traceEstimate = estimate_trace_constant(mesh, 32, options.seed);
            constants.poincareEstimate =
                estimate_poincare_constant(mesh, a, lastPq, 8, options.seed);
            constants.smallness = smallness_check(mesh, g, constants.traceEstimate,
                                                  constants.poincareEstimate);
            report.constants = constants;
        }
    }
    return report;
}

}  // namespace dphase
