#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "dphase/config.hpp"
#include "support.hpp"

using namespace dphase;
using testsupport::error_kind;

namespace {

// Writes the content to a scratch config file and returns its path; each
// test names its file so parallel runs never collide.
std::string write_config(const std::string& name, const std::string& content) {
    std::string path = "cfg_" + name + ".cfg";
    std::ofstream out(path);
    out << content;
    return path;
}

template <class Fn>
std::string error_message(Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("minimal config fills in every default") {
    std::string path = write_config("minimal", "run.q = 1.9\n");
    RunConfig cfg = parse_config(path);
    CHECK(cfg.mode == RunMode::Continue);
    CHECK(!cfg.modeExplicit);
    CHECK(cfg.q == doctest::Approx(1.9).epsilon(1e-15));
    CHECK(cfg.mesh.kind == MeshSpec::Kind::Interval);
    CHECK(cfg.mesh.n == 16);
    CHECK(cfg.mesh.length == 1.0);
    CHECK(cfg.weight.kind == WeightSpec::Kind::Constant);
    CHECK(cfg.weight.value == 1.0);
    CHECK(cfg.boundary.kind == BoundarySpec::Kind::Constant);
    CHECK(cfg.boundary.value == 0.0);
    CHECK(cfg.solver.tol == 1e-10);
    CHECK(cfg.solver.maxIterations == 200);
    CHECK(!cfg.solver.eps.has_value());
    CHECK(cfg.schedule.empty());
    CHECK(cfg.modeP == 1.5);
    CHECK(cfg.outputDir == "out");
    CHECK(cfg.seed == 0);
    CHECK(!cfg.strict);
    std::remove(path.c_str());
}

TEST_CASE("full config lands every key") {
    std::string path = write_config("full",
                                    "# run section\n"
                                    "run.mode = solve-one-p\n"
                                    "run.q = 2.5\n"
                                    "run.p = 1.7   # inline comment\n"
                                    "run.seed = 42\n"
                                    "run.strict = true\n"
                                    "run.output = results\n"
                                    "\n"
                                    "mesh.kind = unit-square\n"
                                    "mesh.n = 6\n"
                                    "weight.kind = affine\n"
                                    "weight.c0 = 1.0\n"
                                    "weight.c1 = 0.25\n"
                                    "weight.c2 = -0.1\n"
                                    "weight.lipschitz = 0.3\n"
                                    "boundary.kind = segments\n"
                                    "boundary.left = -0.05\n"
                                    "boundary.right = 0.05\n"
                                    "solver.tol = 1e-9\n"
                                    "solver.max-iterations = 77\n"
                                    "solver.eps = 1e-6\n");
    RunConfig cfg = parse_config(path);
    CHECK(cfg.mode == RunMode::SolveOneP);
    CHECK(cfg.modeExplicit);
    CHECK(cfg.modeP == doctest::Approx(1.7).epsilon(1e-15));
    CHECK(cfg.seed == 42);
    CHECK(cfg.strict);
    CHECK(cfg.outputDir == "results");
    CHECK(cfg.mesh.kind == MeshSpec::Kind::UnitSquare);
    CHECK(cfg.mesh.n == 6);
    CHECK(cfg.weight.kind == WeightSpec::Kind::Affine);
    CHECK(cfg.weight.c1 == doctest::Approx(0.25).epsilon(1e-15));
    REQUIRE(cfg.weight.lipschitz.has_value());
    CHECK(*cfg.weight.lipschitz == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(cfg.boundary.kind == BoundarySpec::Kind::Segments);
    REQUIRE(cfg.boundary.segments.size() == 2);
    CHECK(cfg.boundary.segments[0].first == "left");
    CHECK(cfg.boundary.segments[0].second == doctest::Approx(-0.05).epsilon(1e-15));
    CHECK(cfg.solver.tol == doctest::Approx(1e-9).epsilon(1e-15));
    CHECK(cfg.solver.maxIterations == 77);
    REQUIRE(cfg.solver.eps.has_value());
    CHECK(*cfg.solver.eps == doctest::Approx(1e-6).epsilon(1e-15));
    std::remove(path.c_str());
}

TEST_CASE("step count expands to the default schedule, explicit lists pass through") {
    std::string p1 = write_config("steps", "run.q = 1.9\ncontinuation.steps = 3\n");
    RunConfig c1 = parse_config(p1);
    REQUIRE(c1.schedule.size() == 3);
    CHECK(c1.schedule[0] == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(c1.schedule[2] == doctest::Approx(1.125).epsilon(1e-15));
    std::remove(p1.c_str());

    std::string p2 = write_config(
        "schedule", "run.q = 1.9\ncontinuation.schedule = 1.4 1.2 1.05\n");
    RunConfig c2 = parse_config(p2);
    REQUIRE(c2.schedule.size() == 3);
    CHECK(c2.schedule[1] == doctest::Approx(1.2).epsilon(1e-15));
    std::remove(p2.c_str());
}

TEST_CASE("config-level rejections") {
    auto kind_of = [](const std::string& name, const std::string& content) {
        std::string path = write_config(name, content);
        std::string kind = error_kind([&] { parse_config(path); });
        std::remove(path.c_str());
        return kind;
    };

    CHECK(kind_of("noq", "run.mode = continue\n") == "config");
    CHECK(kind_of("lowq", "run.q = 0.9\n") == "config");
    CHECK(kind_of("badmode", "run.q = 1.9\nrun.mode = dance\n") == "config");
    CHECK(kind_of("unknown", "run.q = 1.9\nrun.colour = blue\n") == "config");
    CHECK(kind_of("negseed", "run.q = 1.9\nrun.seed = -4\n") == "config");
    CHECK(kind_of("bothsched",
                  "run.q = 1.9\ncontinuation.steps = 3\n"
                  "continuation.schedule = 1.5 1.25\n") == "config");
    CHECK(kind_of("zerosteps", "run.q = 1.9\ncontinuation.steps = 0\n") == "config");
    CHECK(kind_of("filemesh", "run.q = 1.9\nmesh.kind = file\n") == "config");
    CHECK(kind_of("tableweight", "run.q = 1.9\nweight.kind = table\n") == "config");
    CHECK(kind_of("tableboundary", "run.q = 1.9\nboundary.kind = table\n") == "config");
    CHECK(kind_of("nosides", "run.q = 1.9\nboundary.kind = segments\n") == "config");
    CHECK(kind_of("straysides", "run.q = 1.9\nboundary.left = 0.1\n") == "config");
    CHECK(kind_of("verifynoinput", "run.q = 1.9\nrun.mode = verify\n") == "config");
    CHECK(kind_of("prange", "run.q = 1.9\nrun.mode = solve-one-p\nrun.p = 2.4\n") ==
          "config");
    CHECK(kind_of("badn", "run.q = 1.9\nmesh.n = 0\n") == "config");
    CHECK(kind_of("badtol", "run.q = 1.9\nsolver.tol = 0\n") == "config");
}

TEST_CASE("parse-level rejections") {
    auto kind_of = [](const std::string& name, const std::string& content) {
        std::string path = write_config(name, content);
        std::string kind = error_kind([&] { parse_config(path); });
        std::remove(path.c_str());
        return kind;
    };

    CHECK(kind_of("noeq", "run.q 1.9\n") == "parse");
    CHECK(kind_of("novalue", "run.q =\n") == "parse");
    CHECK(kind_of("nodot", "runq = 1.9\n") == "parse");
    CHECK(kind_of("badnum", "run.q = fast\n") == "parse");
    CHECK(kind_of("badint", "run.q = 1.9\nmesh.n = 2.5\n") == "parse");
    CHECK(kind_of("badbool", "run.q = 1.9\nrun.strict = yes\n") == "parse");
}

TEST_CASE("duplicate keys report both lines") {
    std::string path = write_config("dup", "run.q = 1.9\nrun.q = 2.1\n");
    std::string msg = error_message([&] { parse_config(path); });
    CHECK(error_kind([&] { parse_config(path); }) == "parse");
    CHECK(msg.find("duplicate key 'run.q'") != std::string::npos);
    CHECK(msg.find("first set on line 1") != std::string::npos);
    CHECK(msg.find(":2:") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("missing file is an io error") {
    CHECK(error_kind([] { parse_config("no_such_file_anywhere.cfg"); }) == "io");
}

TEST_CASE("mode requirements re-checked after a mode change") {
    std::string path = write_config("latemode", "run.q = 1.9\n");
    RunConfig cfg = parse_config(path);
    cfg.mode = RunMode::Verify;
    CHECK(error_kind([&] { validate_mode_requirements(cfg, "test"); }) == "config");
    cfg.mode = RunMode::OracleCheck;
    cfg.modeP = 2.5;
    CHECK(error_kind([&] { validate_mode_requirements(cfg, "test"); }) == "config");
    cfg.modeP = 1.5;
    CHECK_NOTHROW(validate_mode_requirements(cfg, "test"));
    std::remove(path.c_str());
}
