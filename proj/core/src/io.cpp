#include "dphase/io.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace dphase {

std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

namespace {

std::ofstream open_for_write(const std::string& path) {
    std::ofstream out(path);
    if (!out) fail("io", "cannot open file for writing: " + path);
    return out;
}

void write_vectors(std::ofstream& out, const std::string& name,
                   const std::vector<Vec2>& v) {
    out << "VECTORS " << name << " double\n";
    for (const Vec2& vk : v)
        out << format_double(vk.x) << " " << format_double(vk.y) << " 0\n";
}

}  // namespace

void write_solution_vtk(const std::string& path, const Mesh& mesh,
                        const ScalarField& u, const FluxField& flux,
                        std::span<const double> cellWeight) {
    if (static_cast<int>(u.values.size()) != mesh.nodeCount())
        fail("dimension-mismatch", "solution field does not match the mesh");
    if (static_cast<int>(flux.w.size()) != mesh.elementCount() ||
        static_cast<int>(flux.z.size()) != mesh.elementCount() ||
        static_cast<int>(flux.zeta.size()) != mesh.elementCount() ||
        static_cast<int>(cellWeight.size()) != mesh.elementCount())
        fail("dimension-mismatch", "cell data does not match the mesh");

    auto out = open_for_write(path);
    out << "# vtk DataFile Version 3.0\n";
    out << "double-phase solution\n";
    out << "ASCII\n";
    out << "DATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << mesh.nodeCount() << " double\n";
    for (const Vec2& x : mesh.nodes)
        out << format_double(x.x) << " " << format_double(x.y) << " 0\n";

    const int npe = mesh.nodesPerElement();
    out << "CELLS " << mesh.elementCount() << " " << mesh.elementCount() * (1 + npe)
        << "\n";
    for (int k = 0; k < mesh.elementCount(); ++k) {
        out << npe;
        for (int j = 0; j < npe; ++j) out << " " << mesh.elements[k][j];
        out << "\n";
    }
    const int cellType = mesh.dim == 1 ? 3 : 5;  // VTK_LINE / VTK_TRIANGLE
    out << "CELL_TYPES " << mesh.elementCount() << "\n";
    for (int k = 0; k < mesh.elementCount(); ++k) out << cellType << "\n";

    out << "POINT_DATA " << mesh.nodeCount() << "\n";
    out << "SCALARS u double 1\n";
    out << "LOOKUP_TABLE default\n";
    for (double v : u.values) out << format_double(v) << "\n";

    out << "CELL_DATA " << mesh.elementCount() << "\n";
    write_vectors(out, "grad_u", flux.w);
    write_vectors(out, "z", flux.z);
    write_vectors(out, "zeta", flux.zeta);
    out << "SCALARS weight double 1\n";
    out << "LOOKUP_TABLE default\n";
    for (double a : cellWeight) out << format_double(a) << "\n";

    out.flush();
    if (!out) fail("io", "write failed: " + path);
}

namespace {

// Whitespace tokenizer over a whole file, with parse errors that name the
// offending token.
struct Tokens {
    std::string path;
    std::vector<std::string> items;
    size_t pos = 0;

    explicit Tokens(const std::string& p) : path(p) {
        std::ifstream in(p);
        if (!in) fail("io", "cannot open file: " + p);
        std::string tok;
        while (in >> tok) items.push_back(tok);
    }

    std::string next(const char* what) {
        if (pos >= items.size())
            fail("parse", path + ": unexpected end of file, expected " + std::string(what));
        return items[pos++];
    }

    void expect(const std::string& literal) {
        std::string tok = next(literal.c_str());
        if (tok != literal)
            fail("parse", path + ": expected '" + literal + "', got '" + tok + "'");
    }

    long long integer(const char* what) {
        std::string tok = next(what);
        size_t used = 0;
        long long v = 0;
        try {
            v = std::stoll(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != tok.size())
            fail("parse", path + ": expected integer for " + std::string(what) +
                              ", got '" + tok + "'");
        return v;
    }

    double number(const char* what) {
        std::string tok = next(what);
        size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != tok.size())
            fail("parse", path + ": expected number for " + std::string(what) +
                              ", got '" + tok + "'");
        return v;
    }
};

std::vector<Vec2> read_vectors(Tokens& t, const std::string& name, int count) {
    t.expect("VECTORS");
    t.expect(name);
    t.expect("double");
    std::vector<Vec2> v(count);
    for (int k = 0; k < count; ++k) {
        v[k].x = t.number("vector x");
        v[k].y = t.number("vector y");
        t.number("vector z");
    }
    return v;
}

std::vector<double> read_scalars(Tokens& t, const std::string& name, int count) {
    t.expect("SCALARS");
    t.expect(name);
    t.expect("double");
    t.expect("1");
    t.expect("LOOKUP_TABLE");
    t.expect("default");
    std::vector<double> v(count);
    for (int k = 0; k < count; ++k) v[k] = t.number("scalar value");
    return v;
}

}  // namespace

VtkSolution read_solution_vtk(const std::string& path) {
    Tokens t(path);
    t.expect("#");
    t.expect("vtk");
    t.expect("DataFile");
    t.expect("Version");
    t.next("version number");
    t.expect("double-phase");
    t.expect("solution");
    t.expect("ASCII");
    t.expect("DATASET");
    t.expect("UNSTRUCTURED_GRID");

    t.expect("POINTS");
    long long pointCount = t.integer("point count");
    if (pointCount < 1) fail("parse", path + ": point count must be positive");
    t.expect("double");
    std::vector<Vec2> nodes(pointCount);
    for (auto& x : nodes) {
        x.x = t.number("point x");
        x.y = t.number("point y");
        t.number("point z");
    }

    t.expect("CELLS");
    long long cellCount = t.integer("cell count");
    if (cellCount < 1) fail("parse", path + ": cell count must be positive");
    t.integer("cell list size");
    std::vector<std::array<int, 3>> elements(cellCount, {0, 0, 0});
    long long npe = 0;
    for (auto& el : elements) {
        long long thisNpe = t.integer("nodes per cell");
        if (thisNpe != 2 && thisNpe != 3)
            fail("parse", path + ": cells must have 2 or 3 nodes");
        if (npe == 0) npe = thisNpe;
        if (thisNpe != npe) fail("parse", path + ": mixed cell sizes");
        for (long long j = 0; j < thisNpe; ++j) {
            long long idx = t.integer("cell node index");
            if (idx < 0 || idx >= pointCount)
                fail("parse", path + ": cell node index out of range");
            el[j] = static_cast<int>(idx);
        }
    }
    t.expect("CELL_TYPES");
    t.integer("cell type count");
    const long long wantType = npe == 2 ? 3 : 5;
    for (long long k = 0; k < cellCount; ++k)
        if (t.integer("cell type") != wantType)
            fail("parse", path + ": unexpected cell type");

    VtkSolution sol;
    sol.mesh = build_mesh_from_arrays(npe == 2 ? 1 : 2, std::move(nodes),
                                      std::move(elements));

    t.expect("POINT_DATA");
    if (t.integer("point data count") != pointCount)
        fail("parse", path + ": point data count mismatch");
    sol.u = read_scalars(t, "u", static_cast<int>(pointCount));

    t.expect("CELL_DATA");
    if (t.integer("cell data count") != cellCount)
        fail("parse", path + ": cell data count mismatch");
    sol.gradU = read_vectors(t, "grad_u", static_cast<int>(cellCount));
    sol.z = read_vectors(t, "z", static_cast<int>(cellCount));
    sol.zeta = read_vectors(t, "zeta", static_cast<int>(cellCount));
    sol.cellWeight = read_scalars(t, "weight", static_cast<int>(cellCount));
    if (t.pos != t.items.size()) fail("parse", path + ": trailing content");
    return sol;
}

void write_steps_csv(const std::string& path, const std::vector<StepRecord>& steps) {
    auto out = open_for_write(path);
    out << "k,p,energy,lambda_p,grad_increment_lq_a,newton_iters\n";
    for (const StepRecord& s : steps)
        out << s.k << "," << format_double(s.p) << "," << format_double(s.energy) << ","
            << format_double(s.lambdaP) << "," << format_double(s.gradIncrementLqA)
            << "," << s.newtonIterations << "\n";
    out.flush();
    if (!out) fail("io", "write failed: " + path);
}

std::vector<double> read_value_table(const std::string& path, int expectedCount,
                                     const std::string& what) {
    std::ifstream in(path);
    if (!in) fail("io", "cannot open " + what + " table: " + path);
    std::vector<double> values;
    std::string line;
    int lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        std::string extra;
        if (used != tok.size() || (ls >> extra))
            fail("parse", path + ":" + std::to_string(lineNo) +
                              ": expected one number per line");
        values.push_back(v);
    }
    if (static_cast<int>(values.size()) != expectedCount)
        fail("parse", path + ": " + what + " table has " +
                          std::to_string(values.size()) + " values, expected " +
                          std::to_string(expectedCount));
    return values;
}

}  // namespace dphase
