#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "dphase/common.hpp"

namespace dphase {

/// One boundary facet: a vertex in 1D, an edge in 2D. Facets are inferred
/// from element connectivity (a face belonging to exactly one element) and
/// listed in lexicographic order of their sorted node indices.
struct BoundaryFacet {
    std::array<int, 2> nodes{-1, -1};  // nodes[1] unused in 1D
    Vec2 normal;                       // outward unit normal
    double measure = 0.0;              // length in 2D, counting measure 1 in 1D
    int element = -1;                  // the unique adjacent element
};

/// Conforming simplicial mesh of an interval (1D) or polygonal domain (2D)
/// with piecewise-affine (P1) nodal shape functions. All derived quantities
/// (measures, hat gradients, boundary facets, lumped node measures) are
/// computed once at construction; instances are immutable afterwards and
/// safe for concurrent reads.
struct Mesh {
    int dim = 0;
    std::vector<Vec2> nodes;
    std::vector<std::array<int, 3>> elements;  // elements[k][dim+1..] unused

    std::vector<double> elementMeasures;
    std::vector<std::array<Vec2, 3>> hatGradients;  // grad of each vertex hat
    std::vector<BoundaryFacet> boundaryFacets;
    std::vector<double> lumpedNodeMeasures;  // integral of each nodal hat
    std::vector<bool> boundaryNode;

    double volume = 0.0;
    double boundaryMeasure = 0.0;
    double diameter = 0.0;

    int nodeCount() const { return static_cast<int>(nodes.size()); }
    int elementCount() const { return static_cast<int>(elements.size()); }
    int nodesPerElement() const { return dim + 1; }
    int facetNodeCount() const { return dim; }  // 1 in 1D, 2 in 2D

    Vec2 centroid(int element) const;
};

/// Uniform mesh of (0, length) with n elements and n+1 nodes.
Mesh build_interval_mesh(int n, double length = 1.0);

/// Uniform triangulation of the unit square: (n+1)^2 nodes, 2 n^2 triangles,
/// every cell split along the same diagonal so nested refinements (n -> 2n)
/// contain the coarse P1 space.
Mesh build_unit_square_mesh(int n);

/// Plain-text mesh format:
///   dim N
///   nodes K
///   <K lines of N coordinates>
///   elements M
///   <M lines of N+1 zero-based node indices>
/// Blank lines and '#' comments are allowed. Boundary structure is always
/// inferred, never read.
Mesh load_mesh_file(const std::string& path);

/// Assemble a mesh from raw arrays (shared by the file loader and the VTK
/// reader); runs the same validation and boundary inference.
Mesh build_mesh_from_arrays(int dim, std::vector<Vec2> nodes,
                            std::vector<std::array<int, 3>> elements);

/// Elementwise gradient of the P1 interpolant of nodal values.
std::vector<Vec2> gradient_operator(const Mesh& mesh, std::span<const double> nodal);

}  // namespace dphase
