#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dphase/mesh.hpp"

namespace dphase {

/// Nodal scalar field (one value per mesh node).
struct ScalarField {
    const Mesh* mesh = nullptr;
    std::vector<double> values;

    ScalarField() = default;
    ScalarField(const Mesh& m, std::vector<double> v);

    static ScalarField zeros(const Mesh& m);

    double& operator[](int i) { return values[i]; }
    double operator[](int i) const { return values[i]; }
    int size() const { return static_cast<int>(values.size()); }
};

/// Nodal weight a >= 0 with an optionally declared Lipschitz constant.
struct WeightField {
    const Mesh* mesh = nullptr;
    std::vector<double> values;
    std::optional<double> lipschitzConstant;

    WeightField() = default;
    WeightField(const Mesh& m, std::vector<double> v,
                std::optional<double> lipschitz = std::nullopt);

    static WeightField constant(const Mesh& m, double value);

    /// P1 interpolant evaluated at an element centroid (mean of vertex values).
    double centroidValue(int element) const;

    /// Centroid values for every element, the quadrature weights used by the
    /// modular, the energies and the flux assembly.
    std::vector<double> centroidValues() const;
};

/// Neumann datum: one value per boundary facet, constant on the facet.
struct BoundaryData {
    const Mesh* mesh = nullptr;
    std::vector<double> values;

    BoundaryData() = default;
    BoundaryData(const Mesh& m, std::vector<double> v);

    static BoundaryData constant(const Mesh& m, double value);
};

struct CompatibilityReport {
    double residual = 0.0;  // integral of g over the boundary
    double scale = 0.0;     // max(1, integral of |g|)
    double tol = 0.0;
    bool pass = false;
};

struct WeightHypothesisReport {
    bool boundaryPositive = false;
    double minBoundaryValue = 0.0;
    bool ratioOk = false;
    double ratio = 0.0;       // q/p
    double ratioBound = 0.0;  // 1 + 1/N
    bool lipschitzDeclared = false;
    bool lipschitzOk = true;
    double maxDifferenceQuotient = 0.0;
    double declaredLipschitz = 0.0;

    bool allOk() const { return boundaryPositive && ratioOk && lipschitzOk; }
};

struct ExponentPair;  // orlicz.hpp

/// Exact integral of the P1 interpolant (midpoint/vertex-average quadrature).
double integrate_scalar(const Mesh& mesh, const ScalarField& u);

/// Subtract the mean so the integral vanishes; gradients are untouched.
ScalarField project_mean_zero(const Mesh& mesh, const ScalarField& u);

/// Orthogonal projection of a nodal dual vector (gradient, Hessian action)
/// onto the tangent space of the zero-mean constraint: afterwards the pairing
/// with the lumped node measures is zero, so the vector vanishes exactly at
/// points that are stationary within the mean-zero subspace.
std::vector<double> project_dual_mean_zero(const Mesh& mesh, std::vector<double> v);

/// Integral over the boundary of g times the P1 trace of v.
double boundary_integral(const Mesh& mesh, const BoundaryData& g, const ScalarField& v);

/// Neumann compatibility: the datum must integrate to zero over the boundary,
/// otherwise the energy is unbounded below along constants.
CompatibilityReport check_compatibility(const Mesh& mesh, const BoundaryData& g,
                                        double tol = 1e-10);

/// Structural hypotheses on the weight: strict positivity on the boundary,
/// the exponent ratio bound q/p < 1 + 1/N, and (when a Lipschitz constant is
/// declared) the nodal difference quotients staying below it. With
/// strictMode the first failing clause throws; otherwise the report carries
/// the outcome.
WeightHypothesisReport check_weight_hypotheses(const Mesh& mesh, const WeightField& a,
                                               const ExponentPair& pq,
                                               bool strictMode = false);

/// Sampled Muckenhoupt-style A_q estimate: the maximum over a dyadic family
/// of axis-parallel cubes (levels 0..cubeLevels within the bounding box) of
/// (avg_Q a) * (avg_Q a^{-1/(q-1)})^{q-1}, averages taken by midpoint
/// sampling of the P1 interpolant. A lower bound for the true constant,
/// monotone nondecreasing in cubeLevels.
double check_muckenhoupt(const Mesh& mesh, const WeightField& a, double q,
                         int cubeLevels);

inline std::vector<Vec2> gradient_operator(const Mesh& mesh, const ScalarField& u) {
    return gradient_operator(mesh, std::span<const double>(u.values));
}

}  // namespace dphase
