#include "dphase/config.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "dphase/continuation.hpp"

namespace dphase {

std::string to_string(RunMode mode) {
    switch (mode) {
        case RunMode::SolveOneP: return "solve-one-p";
        case RunMode::Continue: return "continue";
        case RunMode::Verify: return "verify";
        case RunMode::OracleCheck: return "oracle-check";
    }
    fail("invalid-parameter", "unknown run mode");
}

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// Key/value store for one config file: duplicate keys are rejected while
// loading, every lookup consumes its key, and whatever is left at the end is
// reported as unknown.
class Entries {
public:
    explicit Entries(const std::string& path) : path_(path) {
        std::ifstream in(path);
        if (!in) fail("io", "cannot open config file: " + path);
        std::string line;
        int lineNo = 0;
        while (std::getline(in, line)) {
            ++lineNo;
            if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            std::string body = trim(line);
            if (body.empty()) continue;
            auto eq = body.find('=');
            if (eq == std::string::npos)
                fail("parse", where(lineNo) + "expected 'section.key = value'");
            std::string key = trim(body.substr(0, eq));
            std::string value = trim(body.substr(eq + 1));
            if (key.empty() || key.find('.') == std::string::npos ||
                key.find_first_of(" \t") != std::string::npos)
                fail("parse", where(lineNo) + "malformed key '" + key + "'");
            if (value.empty()) fail("parse", where(lineNo) + "missing value for '" + key + "'");
            auto [it, inserted] = entries_.emplace(key, ValueAt{value, lineNo});
            if (!inserted)
                fail("parse", where(lineNo) + "duplicate key '" + key +
                                  "' (first set on line " + std::to_string(it->second.line) +
                                  ")");
        }
    }

    std::optional<std::string> text(const std::string& key) {
        auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        std::string value = it->second.value;
        lastLine_ = it->second.line;
        entries_.erase(it);
        return value;
    }

    std::optional<double> number(const std::string& key) {
        auto raw = text(key);
        if (!raw) return std::nullopt;
        return parse_number(key, *raw);
    }

    std::optional<long long> integer(const std::string& key) {
        auto raw = text(key);
        if (!raw) return std::nullopt;
        size_t used = 0;
        long long v = 0;
        try {
            v = std::stoll(*raw, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != raw->size())
            fail("parse", here() + "key '" + key + "': not an integer: '" + *raw + "'");
        return v;
    }

    std::optional<bool> boolean(const std::string& key) {
        auto raw = text(key);
        if (!raw) return std::nullopt;
        if (*raw == "true") return true;
        if (*raw == "false") return false;
        fail("parse", here() + "key '" + key + "': expected true or false, got '" +
                          *raw + "'");
    }

    std::optional<std::vector<double>> numberList(const std::string& key) {
        auto raw = text(key);
        if (!raw) return std::nullopt;
        std::istringstream ls(*raw);
        std::vector<double> values;
        std::string tok;
        while (ls >> tok) values.push_back(parse_number(key, tok));
        if (values.empty())
            fail("parse", here() + "key '" + key + "': expected at least one number");
        return values;
    }

    void finish() const {
        if (entries_.empty()) return;
        fail("config", path_ + ": unknown key '" + entries_.begin()->first + "'");
    }

private:
    struct ValueAt {
        std::string value;
        int line = 0;
    };

    std::string where(int line) const {
        return path_ + ":" + std::to_string(line) + ": ";
    }
    std::string here() const { return where(lastLine_); }

    double parse_number(const std::string& key, const std::string& tok) const {
        size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != tok.size())
            fail("parse", here() + "key '" + key + "': not a number: '" + tok + "'");
        return v;
    }

    std::string path_;
    std::map<std::string, ValueAt> entries_;
    int lastLine_ = 0;
};

[[noreturn]] void bad_config(const std::string& path, const std::string& message) {
    fail("config", path + ": " + message);
}

}  // namespace

RunConfig parse_config(const std::string& path) {
    Entries e(path);
    RunConfig cfg;

    if (auto mode = e.text("run.mode")) {
        if (*mode == "solve-one-p") cfg.mode = RunMode::SolveOneP;
        else if (*mode == "continue") cfg.mode = RunMode::Continue;
        else if (*mode == "verify") cfg.mode = RunMode::Verify;
        else if (*mode == "oracle-check") cfg.mode = RunMode::OracleCheck;
        else bad_config(path, "unknown run.mode '" + *mode + "'");
        cfg.modeExplicit = true;
    }

    auto q = e.number("run.q");
    if (!q) bad_config(path, "run.q is required");
    if (!(*q > 1.0)) bad_config(path, "run.q must be greater than one");
    cfg.q = *q;

    if (auto p = e.number("run.p")) cfg.modeP = *p;
    if (auto seed = e.integer("run.seed")) {
        if (*seed < 0) bad_config(path, "run.seed must be nonnegative");
        cfg.seed = static_cast<std::uint64_t>(*seed);
    }
    if (auto strict = e.boolean("run.strict")) cfg.strict = *strict;
    if (auto out = e.text("run.output")) cfg.outputDir = *out;

    if (auto kind = e.text("mesh.kind")) {
        if (*kind == "interval") cfg.mesh.kind = MeshSpec::Kind::Interval;
        else if (*kind == "unit-square") cfg.mesh.kind = MeshSpec::Kind::UnitSquare;
        else if (*kind == "file") cfg.mesh.kind = MeshSpec::Kind::File;
        else bad_config(path, "unknown mesh.kind '" + *kind + "'");
    }
    if (auto n = e.integer("mesh.n")) {
        if (*n < 1) bad_config(path, "mesh.n must be at least one");
        cfg.mesh.n = static_cast<int>(*n);
    }
    if (auto length = e.number("mesh.length")) {
        if (!(*length > 0.0)) bad_config(path, "mesh.length must be positive");
        cfg.mesh.length = *length;
    }
    if (auto meshPath = e.text("mesh.path")) cfg.mesh.path = *meshPath;
    if (cfg.mesh.kind == MeshSpec::Kind::File && cfg.mesh.path.empty())
        bad_config(path, "mesh.kind = file requires mesh.path");

    if (auto kind = e.text("weight.kind")) {
        if (*kind == "constant") cfg.weight.kind = WeightSpec::Kind::Constant;
        else if (*kind == "affine") cfg.weight.kind = WeightSpec::Kind::Affine;
        else if (*kind == "table") cfg.weight.kind = WeightSpec::Kind::Table;
        else bad_config(path, "unknown weight.kind '" + *kind + "'");
    }
    if (auto v = e.number("weight.value")) cfg.weight.value = *v;
    if (auto c = e.number("weight.c0")) cfg.weight.c0 = *c;
    if (auto c = e.number("weight.c1")) cfg.weight.c1 = *c;
    if (auto c = e.number("weight.c2")) cfg.weight.c2 = *c;
    if (auto wPath = e.text("weight.path")) cfg.weight.path = *wPath;
    if (auto lip = e.number("weight.lipschitz")) {
        if (!(*lip >= 0.0)) bad_config(path, "weight.lipschitz must be nonnegative");
        cfg.weight.lipschitz = *lip;
    }
    if (cfg.weight.kind == WeightSpec::Kind::Table && cfg.weight.path.empty())
        bad_config(path, "weight.kind = table requires weight.path");

    if (auto kind = e.text("boundary.kind")) {
        if (*kind == "constant") cfg.boundary.kind = BoundarySpec::Kind::Constant;
        else if (*kind == "affine") cfg.boundary.kind = BoundarySpec::Kind::Affine;
        else if (*kind == "segments") cfg.boundary.kind = BoundarySpec::Kind::Segments;
        else if (*kind == "table") cfg.boundary.kind = BoundarySpec::Kind::Table;
        else bad_config(path, "unknown boundary.kind '" + *kind + "'");
    }
    if (auto v = e.number("boundary.value")) cfg.boundary.value = *v;
    if (auto c = e.number("boundary.c0")) cfg.boundary.c0 = *c;
    if (auto c = e.number("boundary.c1")) cfg.boundary.c1 = *c;
    if (auto c = e.number("boundary.c2")) cfg.boundary.c2 = *c;
    if (auto bPath = e.text("boundary.path")) cfg.boundary.path = *bPath;
    for (const char* side : {"left", "right", "bottom", "top"})
        if (auto v = e.number(std::string("boundary.") + side))
            cfg.boundary.segments.emplace_back(side, *v);
    if (cfg.boundary.kind == BoundarySpec::Kind::Table && cfg.boundary.path.empty())
        bad_config(path, "boundary.kind = table requires boundary.path");
    if (cfg.boundary.kind == BoundarySpec::Kind::Segments && cfg.boundary.segments.empty())
        bad_config(path, "boundary.kind = segments needs at least one side value");
    if (cfg.boundary.kind != BoundarySpec::Kind::Segments && !cfg.boundary.segments.empty())
        bad_config(path, "side values require boundary.kind = segments");

    if (auto tol = e.number("solver.tol")) {
        if (!(*tol > 0.0)) bad_config(path, "solver.tol must be positive");
        cfg.solver.tol = *tol;
    }
    if (auto it = e.integer("solver.max-iterations")) {
        if (*it < 1) bad_config(path, "solver.max-iterations must be at least one");
        cfg.solver.maxIterations = static_cast<int>(*it);
    }
    if (auto eps = e.number("solver.eps")) {
        if (!(*eps >= 0.0)) bad_config(path, "solver.eps must be nonnegative");
        cfg.solver.eps = *eps;
    }

    auto steps = e.integer("continuation.steps");
    auto schedule = e.numberList("continuation.schedule");
    if (steps && schedule)
        bad_config(path, "give continuation.steps or continuation.schedule, not both");
    if (steps) {
        if (*steps < 1) bad_config(path, "continuation.steps must be at least one");
        cfg.schedule = default_p_schedule(static_cast<int>(*steps));
    }
    if (schedule) cfg.schedule = *schedule;

    if (auto input = e.text("verify.input")) cfg.verifyInput = *input;

    e.finish();
    validate_mode_requirements(cfg, path);
    return cfg;
}

void validate_mode_requirements(const RunConfig& cfg, const std::string& context) {
    if (cfg.mode == RunMode::Verify && cfg.verifyInput.empty())
        bad_config(context, "verify mode requires verify.input");
    if (cfg.mode == RunMode::SolveOneP || cfg.mode == RunMode::OracleCheck) {
        if (!(cfg.modeP > 1.0 && cfg.modeP < cfg.q))
            bad_config(context, "run.p must satisfy 1 < p < q");
    }
}

}  // namespace dphase
