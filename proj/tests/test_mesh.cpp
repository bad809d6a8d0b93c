#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "support.hpp"

using namespace dphase;
using testsupport::error_kind;

TEST_CASE("interval mesh with two elements") {
    Mesh m = build_interval_mesh(2, 1.0);
    CHECK(m.dim == 1);
    CHECK(m.nodeCount() == 3);
    CHECK(m.elementCount() == 2);
    CHECK(m.elementMeasures[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(m.elementMeasures[1] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(m.volume == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(m.diameter == doctest::Approx(1.0).epsilon(1e-15));

    REQUIRE(m.boundaryFacets.size() == 2);
    double normalSum = 0.0;
    for (const BoundaryFacet& f : m.boundaryFacets) {
        CHECK(f.measure == 1.0);  // counting measure at interval endpoints
        CHECK(std::abs(f.normal.x) == doctest::Approx(1.0));
        normalSum += f.normal.x;
    }
    CHECK(normalSum == doctest::Approx(0.0));
    CHECK(m.boundaryMeasure == doctest::Approx(2.0));
}

TEST_CASE("one-cell unit square mesh") {
    Mesh m = build_unit_square_mesh(1);
    CHECK(m.dim == 2);
    CHECK(m.nodeCount() == 4);
    REQUIRE(m.elementCount() == 2);
    CHECK(m.elementMeasures[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(m.elementMeasures[1] == doctest::Approx(0.5).epsilon(1e-15));
    REQUIRE(m.boundaryFacets.size() == 4);
    for (const BoundaryFacet& f : m.boundaryFacets)
        CHECK(f.measure == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(m.volume == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(m.boundaryMeasure == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(m.diameter == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("hat gradients reproduce affine functions exactly") {
    for (const Mesh& m : {build_interval_mesh(7, 2.5), build_unit_square_mesh(4)}) {
        const double ax = 0.375, ay = -1.222, c = 0.81;
        std::vector<double> nodal(m.nodeCount());
        for (int i = 0; i < m.nodeCount(); ++i)
            nodal[i] = c + ax * m.nodes[i].x + ay * m.nodes[i].y;
        auto grads = gradient_operator(m, std::span<const double>(nodal));
        for (int k = 0; k < m.elementCount(); ++k) {
            CHECK(grads[k].x == doctest::Approx(ax).epsilon(1e-13));
            if (m.dim == 2) CHECK(grads[k].y == doctest::Approx(ay).epsilon(1e-13));
        }
    }
}

TEST_CASE("discrete divergence theorem for hat functions") {
    // For a constant vector field c, the volume sum |K| c.grad(phi_i) must
    // equal the boundary integral of phi_i times c.n for every node i.
    for (const Mesh& m : {build_interval_mesh(5, 1.0), build_unit_square_mesh(3)}) {
        const Vec2 c{0.7, -1.3};
        std::vector<double> volumeSide(m.nodeCount(), 0.0);
        for (int k = 0; k < m.elementCount(); ++k)
            for (int j = 0; j < m.nodesPerElement(); ++j)
                volumeSide[m.elements[k][j]] +=
                    m.elementMeasures[k] * dot(c, m.hatGradients[k][j]);
        std::vector<double> boundarySide(m.nodeCount(), 0.0);
        for (const BoundaryFacet& f : m.boundaryFacets)
            for (int j = 0; j < m.facetNodeCount(); ++j)
                boundarySide[f.nodes[j]] +=
                    dot(c, f.normal) * f.measure / m.facetNodeCount();
        for (int i = 0; i < m.nodeCount(); ++i)
            CHECK(volumeSide[i] == doctest::Approx(boundarySide[i]).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("hat gradients of one element sum to zero") {
    Mesh m = build_unit_square_mesh(3);
    for (int k = 0; k < m.elementCount(); ++k) {
        Vec2 s{0.0, 0.0};
        for (int j = 0; j < m.nodesPerElement(); ++j) s += m.hatGradients[k][j];
        CHECK(norm(s) < 1e-13);
    }
}

TEST_CASE("lumped node measures partition the volume") {
    for (const Mesh& m : {build_interval_mesh(9, 3.0), build_unit_square_mesh(5)}) {
        double total = 0.0;
        for (int i = 0; i < m.nodeCount(); ++i) {
            CHECK(m.lumpedNodeMeasures[i] > 0.0);
            total += m.lumpedNodeMeasures[i];
        }
        CHECK(total == doctest::Approx(m.volume).epsilon(1e-13));
    }
}

TEST_CASE("boundary nodes are flagged and normals point outward") {
    Mesh m = build_unit_square_mesh(3);
    int flagged = 0;
    for (int i = 0; i < m.nodeCount(); ++i) flagged += m.boundaryNode[i] ? 1 : 0;
    CHECK(flagged == 12);  // 4*(n+1) - 4 for n=3
    for (const BoundaryFacet& f : m.boundaryFacets) {
        Vec2 mid = 0.5 * (m.nodes[f.nodes[0]] + m.nodes[f.nodes[1]]);
        // Outward means moving along the normal leaves the unit square.
        Vec2 outside = mid + 0.01 * f.normal;
        bool left = outside.x < 0.0 || outside.x > 1.0 || outside.y < 0.0 || outside.y > 1.0;
        CHECK(left);
    }
}

TEST_CASE("mesh file loader round-trips a square mesh") {
    Mesh m = build_unit_square_mesh(2);
    const char* path = "roundtrip_mesh.txt";
    {
        std::ofstream out(path);
        out << "dim " << m.dim << "\n";
        out << "nodes " << m.nodeCount() << "\n";
        for (int i = 0; i < m.nodeCount(); ++i)
            out << m.nodes[i].x << " " << m.nodes[i].y << "\n";
        out << "elements " << m.elementCount() << "\n";
        for (int k = 0; k < m.elementCount(); ++k)
            out << m.elements[k][0] << " " << m.elements[k][1] << " " << m.elements[k][2]
                << "\n";
    }
    Mesh r = load_mesh_file(path);
    std::remove(path);
    REQUIRE(r.nodeCount() == m.nodeCount());
    REQUIRE(r.elementCount() == m.elementCount());
    CHECK(r.volume == doctest::Approx(m.volume).epsilon(1e-15));
    CHECK(r.boundaryFacets.size() == m.boundaryFacets.size());
    for (int k = 0; k < m.elementCount(); ++k)
        CHECK(r.elementMeasures[k] == doctest::Approx(m.elementMeasures[k]).epsilon(1e-15));
}

TEST_CASE("degenerate and broken meshes are rejected") {
    SUBCASE("zero-area triangle") {
        std::vector<Vec2> nodes{{0, 0}, {1, 0}, {2, 0}, {0, 1}};
        std::vector<std::array<int, 3>> elems{{0, 1, 3}, {0, 1, 2}};
        CHECK(error_kind([&] { build_mesh_from_arrays(2, nodes, elems); }) == "geometry");
    }
    SUBCASE("face shared by three elements") {
        std::vector<Vec2> nodes{{0, 0}, {1, 0}, {0, 1}, {1, 1}, {0.5, -1}};
        std::vector<std::array<int, 3>> elems{{0, 1, 2}, {1, 3, 2}, {1, 0, 4}, {0, 1, 3}};
        CHECK(error_kind([&] { build_mesh_from_arrays(2, nodes, elems); }) == "geometry");
    }
    SUBCASE("node index out of range") {
        std::vector<Vec2> nodes{{0, 0}, {1, 0}, {0, 1}};
        std::vector<std::array<int, 3>> elems{{0, 1, 7}};
        CHECK(error_kind([&] { build_mesh_from_arrays(2, nodes, elems); }) == "parse");
    }
    SUBCASE("unsupported dimension") {
        std::vector<Vec2> nodes{{0, 0}, {1, 0}};
        std::vector<std::array<int, 3>> elems{{0, 1, -1}};
        CHECK(error_kind([&] { build_mesh_from_arrays(3, nodes, elems); }) ==
              "unsupported-dimension");
    }
    SUBCASE("empty interval") {
        CHECK(error_kind([] { build_interval_mesh(0); }) == "invalid-parameter");
    }
}

TEST_CASE("gradient operator rejects mismatched vectors") {
    Mesh m = build_interval_mesh(4);
    std::vector<double> wrong(3, 0.0);
    CHECK(error_kind([&] { gradient_operator(m, std::span<const double>(wrong)); }) ==
          "dimension-mismatch");
}
