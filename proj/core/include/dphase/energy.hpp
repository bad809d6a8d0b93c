#pragma once

#include "dphase/orlicz.hpp"

namespace dphase {

/// Default smoothing parameter for a given p: max(1e-10, 1e-4 * (p - 1)),
/// shrinking linearly as the continuation approaches p = 1.
double default_epsilon(double p);

/// Smoothed double-phase Neumann energy
///   F(u) = sum_K |K| [ (m^p - eps^p)/p + a_K (m^q - eps^q)/q ]
///          - integral over the boundary of g u,
/// with m = sqrt(|grad u_K|^2 + eps^2). The constant shifts make the zero
/// field have energy exactly zero for any eps.
double approx_energy(const Mesh& mesh, const WeightField& a, const ExponentPair& pq,
                     const BoundaryData& g, const ScalarField& u, double eps);

/// Nodal derivative of approx_energy, projected onto the mean-zero tangent
/// space; the zero vector is equivalent to discrete stationarity within the
/// zero-mean subspace.
ScalarField approx_gradient(const Mesh& mesh, const WeightField& a,
                            const ExponentPair& pq, const BoundaryData& g,
                            const ScalarField& u, double eps);

/// Action of the energy Hessian at u on a direction, projected like the
/// gradient. Symmetric and positive semidefinite; requires eps > 0 when
/// p < 2 because the unsmoothed density is not twice differentiable at zero
/// gradients.
ScalarField approx_hessian_apply(const Mesh& mesh, const WeightField& a,
                                 const ExponentPair& pq, const ScalarField& u,
                                 double eps, const ScalarField& direction);

/// Limit functional I(u) = TV(u) + (1/q) sum |K| a_K |grad u_K|^q
///                         - integral over the boundary of g u.
double limit_energy(const Mesh& mesh, const WeightField& a, double q,
                    const BoundaryData& g, const ScalarField& u);

/// Same with the weight already reduced to per-element values (used when the
/// weight arrives cellwise, e.g. re-ingested solution files).
double limit_energy_cellwise(const Mesh& mesh, std::span<const double> aCell, double q,
                             const BoundaryData& g, const ScalarField& u);

}  // namespace dphase
