#include <doctest.h>

#include "support.hpp"

using namespace dphase;
using testsupport::error_kind;

TEST_CASE("zero datum gives the zero minimizer exactly") {
    for (const Mesh& mesh : {build_interval_mesh(16), build_unit_square_mesh(8)}) {
        for (auto [p, q] : {std::pair{1.5, 1.9}, std::pair{2.0, 3.0}}) {
            WeightField a = WeightField::constant(mesh, 1.0);
            BoundaryData g = BoundaryData::constant(mesh, 0.0);
            SolveReport rep = minimize_approx(mesh, a, ExponentPair(p, q, mesh.dim), g,
                                              SolveOptions{});
            CHECK(rep.converged);
            CHECK(testsupport::sup_norm(rep.solution.values) <= 1e-10);
            CHECK(std::abs(rep.energy) <= 1e-12);
        }
    }
}

TEST_CASE("solver reproduces the dense quadratic reference") {
    std::mt19937_64 rng(21);
    for (const Mesh& mesh : {build_interval_mesh(7), build_unit_square_mesh(3)}) {
        WeightField a = WeightField::constant(mesh, 0.0);
        BoundaryData g = testsupport::random_compatible_boundary(mesh, rng, 0.5);
        SolveReport rep =
            minimize_approx(mesh, a, ExponentPair(2.0, 3.0, mesh.dim), g, SolveOptions{});
        REQUIRE(rep.converged);
        auto reference = testsupport::quadratic_reference_solution(mesh, g);
        for (int i = 0; i < mesh.nodeCount(); ++i)
            CHECK(rep.solution[i] == doctest::Approx(reference[i]).epsilon(1e-8).scale(1.0));
    }
}

TEST_CASE("energy decreases monotonically along the iteration") {
    std::mt19937_64 rng(22);
    Mesh mesh = build_unit_square_mesh(4);
    WeightField a = WeightField::constant(mesh, 1.0);
    BoundaryData g = testsupport::random_compatible_boundary(mesh, rng, 0.3);
    SolveReport rep =
        minimize_approx(mesh, a, ExponentPair(1.5, 1.9, mesh.dim), g, SolveOptions{});
    REQUIRE(rep.converged);
    REQUIRE(rep.energyHistory.size() >= 2);
    for (size_t i = 1; i < rep.energyHistory.size(); ++i)
        CHECK(rep.energyHistory[i] <=
              rep.energyHistory[i - 1] + 1e-14 * (1.0 + std::abs(rep.energyHistory[i])));
}

TEST_CASE("minimizer is stationary in the weak form") {
    std::mt19937_64 rng(23);
    Mesh mesh = build_interval_mesh(12);
    WeightField a = WeightField::constant(mesh, 1.0);
    ExponentPair pq(1.6, 2.1, mesh.dim);
    BoundaryData g = testsupport::random_compatible_boundary(mesh, rng, 0.4);
    SolveReport rep = minimize_approx(mesh, a, pq, g, SolveOptions{});
    REQUIRE(rep.converged);
    // Raw nodal derivative without the projection: at an interior minimizer of
    // the constrained problem it vanishes identically because the assembled
    // rows always sum to zero against constants and g is compatible.
    ScalarField grad = approx_gradient(mesh, a, pq, g, rep.solution, rep.epsUsed);
    CHECK(testsupport::norm(grad.values) <= 1e-9);
}

TEST_CASE("solutions from random initial guesses coincide") {
    std::mt19937_64 rng(24);
    Mesh mesh = build_unit_square_mesh(3);
    WeightField a = WeightField::constant(mesh, 1.0);
    ExponentPair pq(1.5, 1.9, mesh.dim);
    BoundaryData g = testsupport::random_compatible_boundary(mesh, rng, 0.4);

    SolveOptions base;
    SolveReport ref = minimize_approx(mesh, a, pq, g, base);
    REQUIRE(ref.converged);
    auto refGrads = gradient_operator(mesh, ref.solution);

    for (int trial = 0; trial < 5; ++trial) {
        SolveOptions opts;
        opts.initialGuess = testsupport::random_field(mesh, rng, 2.0);
        SolveReport rep = minimize_approx(mesh, a, pq, g, opts);
        REQUIRE(rep.converged);
        auto grads = gradient_operator(mesh, rep.solution);
        for (int k = 0; k < mesh.elementCount(); ++k)
            CHECK(norm(grads[k] - refGrads[k]) < 1e-6);
    }
}

TEST_CASE("lambda_p report matches the Luxemburg norm of the gradient") {
    std::mt19937_64 rng(25);
    Mesh mesh = build_interval_mesh(10);
    WeightField a = WeightField::constant(mesh, 1.0);
    ExponentPair pq(1.5, 1.9, mesh.dim);
    BoundaryData g = testsupport::random_compatible_boundary(mesh, rng, 0.4);
    SolveReport rep = minimize_approx(mesh, a, pq, g, SolveOptions{});
    REQUIRE(rep.converged);
    auto grads = gradient_operator(mesh, rep.solution);
    CHECK(rep.lambdaP ==
          doctest::Approx(luxemburg_norm(mesh, a, pq, std::span<const Vec2>(grads)))
              .epsilon(1e-12));
}

TEST_CASE("1d ramp with p = 2, q = 3 has the predicted slope") {
    // With a == 1 and datum -t/+t at the endpoints the minimizer is linear
    // and its slope s solves s + s^2 = t; for t = 0.06 that gives
    // s = (-1 + sqrt(1.24)) / 2.
    const double expected = (-1.0 + std::sqrt(1.24)) / 2.0;
    for (int n : {8, 16, 32}) {
        Mesh mesh = build_interval_mesh(n);
        WeightField a = WeightField::constant(mesh, 1.0);
        std::vector<double> gvals;
        for (const BoundaryFacet& f : mesh.boundaryFacets)
            gvals.push_back(f.normal.x < 0.0 ? -0.06 : 0.06);
        BoundaryData g(mesh, gvals);
        SolveOptions opts;
        opts.eps = 1e-8;
        SolveReport rep =
            minimize_approx(mesh, a, ExponentPair(2.0, 3.0, mesh.dim), g, opts);
        REQUIRE(rep.converged);
        auto grads = gradient_operator(mesh, rep.solution);
        for (const Vec2& w : grads)
            CHECK(std::abs(w.x - expected) <= 1e-8);
    }
}

TEST_CASE("exhausted iteration budget is reported, not hidden") {
    std::mt19937_64 rng(28);
    Mesh mesh = build_unit_square_mesh(4);
    WeightField a = WeightField::constant(mesh, 1.0);
    BoundaryData g = testsupport::random_compatible_boundary(mesh, rng, 0.5);
    SolveOptions opts;
    opts.maxIterations = 1;
    opts.tol = 1e-14;
    SolveReport rep =
        minimize_approx(mesh, a, ExponentPair(1.5, 1.9, mesh.dim), g, opts);
    CHECK(!rep.converged);
    CHECK(rep.iterations <= 1);
    CHECK(std::isfinite(rep.energy));
}

TEST_CASE("solver failure modes") {
    Mesh mesh = build_unit_square_mesh(2);
    WeightField a = WeightField::constant(mesh, 1.0);
    ExponentPair pq(1.5, 1.9, mesh.dim);

    SUBCASE("incompatible data is a gate, not an iteration") {
        BoundaryData ones = BoundaryData::constant(mesh, 1.0);
        CHECK(error_kind([&] { minimize_approx(mesh, a, pq, ones, SolveOptions{}); }) ==
              "compatibility");
    }
    SUBCASE("eps zero is rejected below p = 2") {
        SolveOptions opts;
        opts.eps = 0.0;
        BoundaryData zero = BoundaryData::constant(mesh, 0.0);
        CHECK(error_kind([&] { minimize_approx(mesh, a, pq, zero, opts); }) ==
              "regularization-required");
    }
    SUBCASE("iteration budget must be positive") {
        SolveOptions opts;
        opts.maxIterations = 0;
        BoundaryData zero = BoundaryData::constant(mesh, 0.0);
        CHECK(error_kind([&] { minimize_approx(mesh, a, pq, zero, opts); }) ==
              "invalid-parameter");
    }
}

TEST_CASE("coordinate-descent oracle agrees with the Newton solver") {
    std::mt19937_64 rng(26);
    for (const Mesh& mesh : {build_interval_mesh(9), build_unit_square_mesh(2)}) {
        REQUIRE(mesh.nodeCount() <= 12);
        WeightField a = WeightField::constant(mesh, 1.0);
        for (int trial = 0; trial < 5; ++trial) {
            ExponentPair pq(trial % 2 == 0 ? 1.5 : 1.8, 2.2, mesh.dim);
            BoundaryData g = testsupport::random_compatible_boundary(mesh, rng, 0.5);
            const double eps = default_epsilon(pq.p);
            SolveReport oracle = oracle_minimize(mesh, a, pq, g, eps);
            CHECK(oracle.converged);
            SolveOptions opts;
            opts.eps = eps;
            SolveReport newton = minimize_approx(mesh, a, pq, g, opts);
            CHECK(newton.converged);
            CHECK(std::abs(newton.energy - oracle.energy) <=
                  1e-6 * (1.0 + std::abs(newton.energy)));
            for (int i = 0; i < mesh.nodeCount(); ++i)
                CHECK(newton.solution[i] ==
                      doctest::Approx(oracle.solution[i]).epsilon(1e-4).scale(1.0));
        }
    }
}

TEST_CASE("oracle refuses meshes beyond its scale") {
    Mesh mesh = build_interval_mesh(16);
    WeightField a = WeightField::constant(mesh, 1.0);
    BoundaryData g = BoundaryData::constant(mesh, 0.0);
    CHECK(error_kind([&] {
              oracle_minimize(mesh, a, ExponentPair(1.5, 1.9, mesh.dim), g, 1e-4);
          }) == "oracle-scale");
}

TEST_CASE("oracle energy decreases sweep over sweep") {
    std::mt19937_64 rng(27);
    Mesh mesh = build_interval_mesh(6);
    WeightField a = WeightField::constant(mesh, 1.0);
    ExponentPair pq(1.5, 1.9, mesh.dim);
    BoundaryData g = testsupport::random_compatible_boundary(mesh, rng, 0.5);
    SolveReport rep = oracle_minimize(mesh, a, pq, g, 1e-4);
    REQUIRE(rep.energyHistory.size() >= 2);
    for (size_t i = 1; i < rep.energyHistory.size(); ++i)
        CHECK(rep.energyHistory[i] <= rep.energyHistory[i - 1] + 1e-15);
}
