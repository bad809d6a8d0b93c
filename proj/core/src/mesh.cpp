#include "dphase/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace dphase {

namespace {

// Signed parallelogram area spanned by the two edge vectors of a triangle.
double signed_double_area(Vec2 p0, Vec2 p1, Vec2 p2) {
    Vec2 e1 = p1 - p0;
    Vec2 e2 = p2 - p0;
    return e1.x * e2.y - e1.y * e2.x;
}

void check_node_index(int idx, int nodeCount, const std::string& where) {
    if (idx < 0 || idx >= nodeCount)
        fail("parse", where + ": node index " + std::to_string(idx) +
                          " out of range [0, " + std::to_string(nodeCount) + ")");
}

// Boundary inference and derived-quantity setup shared by all constructors.
void finalize(Mesh& m) {
    const int nn = m.nodeCount();
    const int ne = m.elementCount();
    const int npe = m.nodesPerElement();
    if (m.dim != 1 && m.dim != 2)
        fail("unsupported-dimension", "mesh dimension must be 1 or 2");
    if (nn < 2 || ne < 1) fail("geometry", "mesh needs at least one element");

    double bboxScale = 0.0;
    {
        Vec2 lo = m.nodes.front(), hi = m.nodes.front();
        for (Vec2 p : m.nodes) {
            lo.x = std::min(lo.x, p.x);
            lo.y = std::min(lo.y, p.y);
            hi.x = std::max(hi.x, p.x);
            hi.y = std::max(hi.y, p.y);
        }
        bboxScale = norm(hi - lo);
        if (!(bboxScale > 0.0)) fail("geometry", "mesh has zero extent");
    }

    m.elementMeasures.assign(ne, 0.0);
    m.hatGradients.assign(ne, {});
    const double degenerate = 1e-14 * std::pow(bboxScale, m.dim);
    for (int k = 0; k < ne; ++k) {
        const auto& el = m.elements[k];
        for (int j = 0; j < npe; ++j) check_node_index(el[j], nn, "element " + std::to_string(k));
        if (m.dim == 1) {
            double h = m.nodes[el[1]].x - m.nodes[el[0]].x;
            m.elementMeasures[k] = std::abs(h);
            if (m.elementMeasures[k] <= degenerate)
                fail("geometry", "inverted element " + std::to_string(k) +
                                     " (non-positive measure)");
            m.hatGradients[k][0] = {-1.0 / h, 0.0};
            m.hatGradients[k][1] = {1.0 / h, 0.0};
        } else {
            Vec2 p0 = m.nodes[el[0]], p1 = m.nodes[el[1]], p2 = m.nodes[el[2]];
            double D = signed_double_area(p0, p1, p2);
            m.elementMeasures[k] = 0.5 * std::abs(D);
            if (m.elementMeasures[k] <= degenerate)
                fail("geometry", "inverted element " + std::to_string(k) +
                                     " (non-positive measure)");
            m.hatGradients[k][0] = rot90(p2 - p1) * (1.0 / D);
            m.hatGradients[k][1] = rot90(p0 - p2) * (1.0 / D);
            m.hatGradients[k][2] = rot90(p1 - p0) * (1.0 / D);
        }
    }

    // A face on exactly one element is a boundary facet; more than two
    // elements sharing a face is a broken (non-manifold) mesh.
    std::map<std::array<int, 2>, std::pair<int, int>> faceCount;  // key -> (count, element)
    auto addFace = [&](int a, int b, int element) {
        std::array<int, 2> key{std::min(a, b), std::max(a, b)};
        auto [it, fresh] = faceCount.try_emplace(key, 0, element);
        it->second.first += 1;
        if (fresh) it->second.second = element;
        if (it->second.first > 2)
            fail("geometry", "non-manifold face at nodes " + std::to_string(key[0]) +
                                 (m.dim == 2 ? "," + std::to_string(key[1]) : "") +
                                 " shared by more than two elements");
    };
    for (int k = 0; k < ne; ++k) {
        const auto& el = m.elements[k];
        if (m.dim == 1) {
            addFace(el[0], el[0], k);
            addFace(el[1], el[1], k);
        } else {
            addFace(el[0], el[1], k);
            addFace(el[1], el[2], k);
            addFace(el[2], el[0], k);
        }
    }

    m.boundaryFacets.clear();
    m.boundaryNode.assign(nn, false);
    m.boundaryMeasure = 0.0;
    for (const auto& [key, info] : faceCount) {
        if (info.first != 1) continue;
        BoundaryFacet f;
        f.element = info.second;
        Vec2 centroid = m.centroid(f.element);
        if (m.dim == 1) {
            f.nodes = {key[0], -1};
            f.measure = 1.0;
            f.normal = {m.nodes[key[0]].x > centroid.x ? 1.0 : -1.0, 0.0};
            m.boundaryNode[key[0]] = true;
        } else {
            f.nodes = {key[0], key[1]};
            Vec2 pa = m.nodes[key[0]], pb = m.nodes[key[1]];
            f.measure = norm(pb - pa);
            if (f.measure <= 0.0) fail("geometry", "degenerate boundary facet");
            Vec2 n = rot90(pb - pa) * (1.0 / f.measure);
            Vec2 mid = (pa + pb) * 0.5;
            if (dot(n, mid - centroid) < 0.0) n = n * -1.0;
            f.normal = n;
            m.boundaryNode[key[0]] = true;
            m.boundaryNode[key[1]] = true;
        }
        m.boundaryMeasure += f.measure;
        m.boundaryFacets.push_back(f);
    }
    if (m.boundaryFacets.empty()) fail("geometry", "mesh has no boundary facets");

    m.volume = 0.0;
    m.lumpedNodeMeasures.assign(nn, 0.0);
    for (int k = 0; k < ne; ++k) {
        m.volume += m.elementMeasures[k];
        double share = m.elementMeasures[k] / npe;
        for (int j = 0; j < npe; ++j) m.lumpedNodeMeasures[m.elements[k][j]] += share;
    }

    // Exact diameter for the mesh sizes this tool targets; the bounding-box
    // diagonal (an upper bound, exact on boxes) past that.
    if (nn <= 4096) {
        double best = 0.0;
        for (int i = 0; i < nn; ++i)
            for (int j = i + 1; j < nn; ++j) best = std::max(best, norm(m.nodes[i] - m.nodes[j]));
        m.diameter = best;
    } else {
        m.diameter = bboxScale;
    }
}

}  // namespace

Vec2 Mesh::centroid(int element) const {
    const auto& el = elements[element];
    Vec2 c = nodes[el[0]];
    for (int j = 1; j < nodesPerElement(); ++j) c += nodes[el[j]];
    return c * (1.0 / nodesPerElement());
}

Mesh build_interval_mesh(int n, double length) {
    if (n < 1) fail("invalid-parameter", "interval mesh needs n >= 1 elements");
    if (!(length > 0.0)) fail("invalid-parameter", "interval length must be positive");
    Mesh m;
    m.dim = 1;
    m.nodes.resize(n + 1);
    for (int i = 0; i <= n; ++i) m.nodes[i] = {length * i / n, 0.0};
    m.elements.resize(n);
    for (int i = 0; i < n; ++i) m.elements[i] = {i, i + 1, -1};
    finalize(m);
    return m;
}

Mesh build_unit_square_mesh(int n) {
    if (n < 1) fail("invalid-parameter", "unit square mesh needs n >= 1 cells per side");
    Mesh m;
    m.dim = 2;
    m.nodes.resize((n + 1) * (n + 1));
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            m.nodes[j * (n + 1) + i] = {double(i) / n, double(j) / n};
    m.elements.reserve(2 * n * n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            int v00 = j * (n + 1) + i;
            int v10 = v00 + 1;
            int v01 = v00 + (n + 1);
            int v11 = v01 + 1;
            m.elements.push_back({v00, v10, v11});
            m.elements.push_back({v00, v11, v01});
        }
    }
    finalize(m);
    return m;
}

Mesh build_mesh_from_arrays(int dim, std::vector<Vec2> nodes,
                            std::vector<std::array<int, 3>> elements) {
    Mesh m;
    m.dim = dim;
    m.nodes = std::move(nodes);
    m.elements = std::move(elements);
    finalize(m);
    return m;
}

namespace {

// Tokenizer for the plain-text mesh format: skips blanks and '#' comments,
// reports the line of the first offending token.
struct LineReader {
    std::ifstream in;
    std::string path;
    int lineNo = 0;
    std::istringstream line;

    explicit LineReader(const std::string& p) : in(p), path(p) {
        if (!in) fail("io", "cannot open mesh file '" + p + "'");
    }

    bool nextToken(std::string& tok) {
        while (true) {
            if (line >> tok) {
                if (tok[0] == '#') {
                    line.str("");
                    line.clear();
                    continue;
                }
                return true;
            }
            std::string raw;
            if (!std::getline(in, raw)) return false;
            ++lineNo;
            line.str(raw);
            line.clear();
        }
    }

    std::string expectToken(const std::string& what) {
        std::string tok;
        if (!nextToken(tok))
            fail("parse", path + ": unexpected end of file, expected " + what);
        return tok;
    }

    long expectInt(const std::string& what) {
        std::string tok = expectToken(what);
        try {
            size_t pos = 0;
            long v = std::stol(tok, &pos);
            if (pos != tok.size()) throw std::invalid_argument(tok);
            return v;
        } catch (const std::exception&) {
            fail("parse", path + " line " + std::to_string(lineNo) + ": expected " +
                              what + ", got '" + tok + "'");
        }
    }

    double expectDouble(const std::string& what) {
        std::string tok = expectToken(what);
        try {
            size_t pos = 0;
            double v = std::stod(tok, &pos);
            if (pos != tok.size()) throw std::invalid_argument(tok);
            return v;
        } catch (const std::exception&) {
            fail("parse", path + " line " + std::to_string(lineNo) + ": expected " +
                              what + ", got '" + tok + "'");
        }
    }

    void expectKeyword(const std::string& kw) {
        std::string tok = expectToken("keyword '" + kw + "'");
        if (tok != kw)
            fail("parse", path + " line " + std::to_string(lineNo) + ": expected '" +
                              kw + "', got '" + tok + "'");
    }
};

}  // namespace

Mesh load_mesh_file(const std::string& path) {
    LineReader r(path);
    r.expectKeyword("dim");
    long dim = r.expectInt("dimension");
    if (dim != 1 && dim != 2)
        fail("parse", path + ": dimension must be 1 or 2, got " + std::to_string(dim));

    r.expectKeyword("nodes");
    long nn = r.expectInt("node count");
    if (nn < 2) fail("parse", path + ": node count must be at least 2");
    std::vector<Vec2> nodes(nn);
    for (long i = 0; i < nn; ++i) {
        nodes[i].x = r.expectDouble("node coordinate");
        nodes[i].y = dim == 2 ? r.expectDouble("node coordinate") : 0.0;
    }

    r.expectKeyword("elements");
    long ne = r.expectInt("element count");
    if (ne < 1) fail("parse", path + ": element count must be at least 1");
    std::vector<std::array<int, 3>> elements(ne, {-1, -1, -1});
    for (long k = 0; k < ne; ++k)
        for (long j = 0; j <= dim; ++j)
            elements[k][j] = static_cast<int>(r.expectInt("element node index"));

    std::string extra;
    if (r.nextToken(extra))
        fail("parse", path + " line " + std::to_string(r.lineNo) +
                          ": trailing content '" + extra + "'");

    return build_mesh_from_arrays(static_cast<int>(dim), std::move(nodes),
                                  std::move(elements));
}

std::vector<Vec2> gradient_operator(const Mesh& mesh, std::span<const double> nodal) {
    if (static_cast<int>(nodal.size()) != mesh.nodeCount())
        fail("dimension-mismatch", "nodal vector has " + std::to_string(nodal.size()) +
                                       " entries for " + std::to_string(mesh.nodeCount()) +
                                       " nodes");
    std::vector<Vec2> grads(mesh.elementCount());
    for (int k = 0; k < mesh.elementCount(); ++k) {
        Vec2 g{0.0, 0.0};
        for (int j = 0; j < mesh.nodesPerElement(); ++j)
            g += nodal[mesh.elements[k][j]] * mesh.hatGradients[k][j];
        grads[k] = g;
    }
    return grads;
}

}  // namespace dphase
