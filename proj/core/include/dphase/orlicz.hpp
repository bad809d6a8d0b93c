#pragma once

#include <span>

#include "dphase/fields.hpp"

namespace dphase {

/// Exponent pair 1 < p < q for the density theta(x,t) = t^p + a(x) t^q,
/// together with the ambient dimension and derived quantities.
struct ExponentPair {
    double p = 0.0;
    double q = 0.0;
    int dim = 0;
    double pConjugate = 0.0;  // p' = p/(p-1)
    double qConjugate = 0.0;  // q' = q/(q-1)
    bool hypothesisH = false;  // q/p < 1 + 1/N

    ExponentPair(double p_, double q_, int dim_);
};

/// Modular rho(v) = sum over elements of |K| (|v_K|^p + a_K |v_K|^q) for an
/// elementwise vector field; nodal scalar fields are reduced to the magnitude
/// of their centroid value first.
double modular_theta(const Mesh& mesh, const WeightField& a, const ExponentPair& pq,
                     std::span<const Vec2> v);
double modular_theta(const Mesh& mesh, const WeightField& a, const ExponentPair& pq,
                     const ScalarField& v);

/// Luxemburg norm inf{ lambda > 0 : rho(v/lambda) <= 1 }, located by
/// bracketing and bisection to 1e-12 relative accuracy (the modular at the
/// returned value is within 1e-10 of one). Zero input gives zero.
double luxemburg_norm(const Mesh& mesh, const WeightField& a, const ExponentPair& pq,
                      std::span<const Vec2> v);
double luxemburg_norm(const Mesh& mesh, const WeightField& a, const ExponentPair& pq,
                      const ScalarField& v);

/// Weighted norm (sum |K| a_K |v_K|^q)^{1/q}.
double weighted_lq_norm(const Mesh& mesh, const WeightField& a, double q,
                        std::span<const Vec2> v);

/// Total variation of the P1 interpolant: sum |K| |grad u_K|.
double discrete_total_variation(const Mesh& mesh, const ScalarField& u);

/// Boundary fractional seminorm diagnostic (2D only): traces are sampled at
/// facet midpoints and paired in a double sum
///   ( sum_{i != j} |u(x_i) - u(x_j)|^q / |x_i - x_j|^{(N-1) + q(1 - 1/q)}
///     * mu_i mu_j )^{1/q}.
/// Conventions for the kernel exponent in this seminorm vary; this diagnostic
/// fixes the one above rather than resolving the ambiguity.
double boundary_fractional_seminorm(const Mesh& mesh, const ScalarField& u, double q);

}  // namespace dphase
