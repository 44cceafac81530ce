#include "cylbench/mesh.hpp"
#include "cylbench/predicates.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace cylbench::mesh {

void Mesh::rebuild_edges() {
    // remember markers / curved nodes by vertex pair
    std::map<std::pair<Index, Index>, geo::Marker> markers;
    std::map<std::pair<Index, Index>, std::vector<Vec2>> curved;
    for (const Edge& e : edges)
        if (e.marker != geo::Marker::None) markers[{e.v0, e.v1}] = e.marker;
    for (const CurvedEdge& ce : curved_edges)
        if (ce.edge >= 0 && ce.edge < static_cast<Index>(edges.size()))
            curved[{edges[ce.edge].v0, edges[ce.edge].v1}] = ce.nodes;

    edges.clear();
    cell_edges.assign(cells.size(), {-1, -1, -1});
    std::map<std::pair<Index, Index>, Index> lookup;
    for (Index c = 0; c < num_cells(); ++c) {
        for (int le = 0; le < 3; ++le) {
            const Index a = cells[c][(le + 1) % 3];
            const Index b = cells[c][(le + 2) % 3];
            const std::pair<Index, Index> key{std::min(a, b), std::max(a, b)};
            auto it = lookup.find(key);
            if (it == lookup.end()) {
                Edge e;
                e.v0 = key.first;
                e.v1 = key.second;
                e.cell0 = c;
                const Index id = static_cast<Index>(edges.size());
                edges.push_back(e);
                lookup.emplace(key, id);
                cell_edges[c][le] = id;
            } else {
                Edge& e = edges[it->second];
                if (e.cell1 >= 0)
                    throw GeometryError("rebuild_edges: edge shared by more than two cells");
                e.cell1 = c;
                cell_edges[c][le] = it->second;
            }
        }
    }
    for (Edge& e : edges) {
        auto it = markers.find({e.v0, e.v1});
        if (it != markers.end()) e.marker = it->second;
    }
    edge_curved.assign(edges.size(), -1);
    curved_edges.clear();
    for (auto& [key, nodes] : curved) {
        auto it = lookup.find(key);
        if (it == lookup.end()) throw GeometryError("rebuild_edges: curved edge not found in cells");
        CurvedEdge ce;
        ce.edge = it->second;
        ce.nodes = nodes;
        edge_curved[ce.edge] = static_cast<Index>(curved_edges.size());
        curved_edges.push_back(std::move(ce));
    }
}

Real Mesh::cell_diameter(Index c) const {
    Real d = 0.0;
    for (int i = 0; i < 3; ++i)
        d = std::max(d, (vertices[cells[c][i]] - vertices[cells[c][(i + 1) % 3]]).norm());
    return d;
}

int Mesh::local_edge_index(Index cell, Index edge) const {
    for (int le = 0; le < 3; ++le)
        if (cell_edges[cell][le] == edge) return le;
    return -1;
}

int Mesh::edge_sign(Index cell, int le) const {
    const Index a = cells[cell][(le + 1) % 3];
    const Index b = cells[cell][(le + 2) % 3];
    return a < b ? 1 : -1;
}

bool Mesh::cell_is_curved(Index c) const {
    if (geometry_order <= 1) return false;
    for (int le = 0; le < 3; ++le)
        if (edge_curved[cell_edges[c][le]] >= 0) return true;
    return false;
}

void Mesh::validate() const {
    if (cells.empty()) throw GeometryError("mesh validation: no cells");
    if (cell_edges.size() != cells.size() || edge_curved.size() != edges.size())
        throw GeometryError("mesh validation: stale edge tables (call rebuild_edges)");
    for (Index c = 0; c < num_cells(); ++c) {
        const auto& cell = cells[c];
        for (int i = 0; i < 3; ++i)
            if (cell[i] < 0 || cell[i] >= num_vertices())
                throw GeometryError("mesh validation: cell vertex out of range");
        if (orient2d(vertices[cell[0]], vertices[cell[1]], vertices[cell[2]]) <= 0)
            throw GeometryError("mesh validation: cell " + std::to_string(c) +
                                " is not positively oriented");
    }
    for (Index e = 0; e < num_edges(); ++e) {
        const Edge& ed = edges[e];
        if (ed.cell0 < 0) throw GeometryError("mesh validation: edge without cells");
        const bool boundary = ed.cell1 < 0;
        if (boundary && ed.marker == geo::Marker::None)
            throw GeometryError("mesh validation: boundary edge " + std::to_string(e) +
                                " has no marker");
        if (!boundary && ed.marker != geo::Marker::None)
            throw GeometryError("mesh validation: interior edge carries boundary marker");
    }
    if (geometry_order < 1) throw GeometryError("mesh validation: geometry_order must be >= 1");
    for (const CurvedEdge& ce : curved_edges) {
        if (static_cast<int>(ce.nodes.size()) != geometry_order - 1)
            throw GeometryError("mesh validation: curved edge node count mismatch");
        if (!domain) throw GeometryError("mesh validation: curved edges without a domain");
        const Real r = domain->cylinder_radius;
        for (const Vec2& p : ce.nodes) {
            const Real dev = std::abs((p - domain->cylinder_center).norm() - r);
            if (dev > 1e-12 * r)
                throw GeometryError("mesh validation: curved-edge node off the circle");
        }
    }
}

// ---------------------------------------------------------------------------
// plain-text container
// ---------------------------------------------------------------------------

namespace {

void write_real(std::FILE* f, Real v) { std::fprintf(f, "%.17g", v); }

[[noreturn]] void parse_fail(const std::string& path, int line, const std::string& what) {
    throw GeometryError(path + ":" + std::to_string(line) + ": " + what);
}

} // namespace

void save_mesh(const Mesh& m, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw GeometryError("save_mesh: cannot open " + path);
    std::fprintf(f, "cylbench-mesh 1\n");
    std::fprintf(f, "geometry_order %d\n", m.geometry_order);
    if (m.domain) {
        std::fprintf(f, "domain ");
        write_real(f, m.domain->x_min); std::fprintf(f, " ");
        write_real(f, m.domain->x_max); std::fprintf(f, " ");
        write_real(f, m.domain->y_half); std::fprintf(f, " ");
        write_real(f, m.domain->cylinder_radius); std::fprintf(f, " ");
        write_real(f, m.domain->cylinder_center.x()); std::fprintf(f, " ");
        write_real(f, m.domain->cylinder_center.y()); std::fprintf(f, "\n");
    }
    std::fprintf(f, "vertices %lld\n", static_cast<long long>(m.num_vertices()));
    for (const Vec2& v : m.vertices) {
        write_real(f, v.x()); std::fprintf(f, " ");
        write_real(f, v.y()); std::fprintf(f, "\n");
    }
    std::fprintf(f, "cells %lld\n", static_cast<long long>(m.num_cells()));
    for (const auto& c : m.cells)
        std::fprintf(f, "%lld %lld %lld\n", static_cast<long long>(c[0]),
                     static_cast<long long>(c[1]), static_cast<long long>(c[2]));
    Index nb = 0;
    for (const Edge& e : m.edges)
        if (e.marker != geo::Marker::None) ++nb;
    std::fprintf(f, "boundary_edges %lld\n", static_cast<long long>(nb));
    for (const Edge& e : m.edges)
        if (e.marker != geo::Marker::None)
            std::fprintf(f, "%lld %lld %d\n", static_cast<long long>(e.v0),
                         static_cast<long long>(e.v1), static_cast<int>(e.marker));
    std::fprintf(f, "curved_edges %lld\n", static_cast<long long>(m.curved_edges.size()));
    for (const CurvedEdge& ce : m.curved_edges) {
        const Edge& e = m.edges[ce.edge];
        std::fprintf(f, "%lld %lld %d", static_cast<long long>(e.v0),
                     static_cast<long long>(e.v1), static_cast<int>(ce.nodes.size()));
        for (const Vec2& p : ce.nodes) {
            std::fprintf(f, " ");
            write_real(f, p.x()); std::fprintf(f, " ");
            write_real(f, p.y());
        }
        std::fprintf(f, "\n");
    }
    std::fprintf(f, "end\n");
    std::fclose(f);
}

Mesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw GeometryError("load_mesh: cannot open " + path);
    int lineno = 0;
    auto next_line = [&](const char* block) -> std::string {
        std::string line;
        if (!std::getline(in, line))
            parse_fail(path, lineno, std::string("unexpected end of file in block '") + block + "'");
        ++lineno;
        return line;
    };

    Mesh m;
    {
        std::istringstream is(next_line("header"));
        std::string tag;
        int version = 0;
        is >> tag >> version;
        if (tag != "cylbench-mesh" || version != 1)
            parse_fail(path, lineno, "bad header (expected 'cylbench-mesh 1')");
    }

    std::string line = next_line("geometry_order");
    {
        std::istringstream is(line);
        std::string key;
        is >> key >> m.geometry_order;
        if (key != "geometry_order" || is.fail())
            parse_fail(path, lineno, "expected 'geometry_order <k>'");
    }

    line = next_line("domain or vertices");
    if (line.rfind("domain", 0) == 0) {
        std::istringstream is(line);
        std::string key;
        geo::DomainSpec d;
        is >> key >> d.x_min >> d.x_max >> d.y_half >> d.cylinder_radius >>
            d.cylinder_center.x() >> d.cylinder_center.y();
        if (is.fail()) parse_fail(path, lineno, "malformed domain line");
        m.domain = d;
        line = next_line("vertices");
    }

    auto read_count = [&](const std::string& l, const char* key) -> Index {
        std::istringstream is(l);
        std::string k;
        long long n = -1;
        is >> k >> n;
        if (k != key || n < 0) parse_fail(path, lineno, std::string("expected '") + key + " <count>'");
        return n;
    };

    const Index nv = read_count(line, "vertices");
    m.vertices.resize(nv);
    for (Index i = 0; i < nv; ++i) {
        std::istringstream is(next_line("vertices"));
        is >> m.vertices[i].x() >> m.vertices[i].y();
        if (is.fail()) parse_fail(path, lineno, "malformed vertex line");
    }

    const Index nc = read_count(next_line("cells"), "cells");
    m.cells.resize(nc);
    for (Index i = 0; i < nc; ++i) {
        std::istringstream is(next_line("cells"));
        is >> m.cells[i][0] >> m.cells[i][1] >> m.cells[i][2];
        if (is.fail()) parse_fail(path, lineno, "malformed cell line");
    }

    struct BEdge { Index v0, v1; int marker; };
    std::vector<BEdge> bedges;
    const Index nb = read_count(next_line("boundary_edges"), "boundary_edges");
    for (Index i = 0; i < nb; ++i) {
        std::istringstream is(next_line("boundary_edges"));
        BEdge b{};
        is >> b.v0 >> b.v1 >> b.marker;
        if (is.fail()) parse_fail(path, lineno, "malformed boundary edge line");
        bedges.push_back(b);
    }

    struct CEdge { Index v0, v1; std::vector<Vec2> nodes; };
    std::vector<CEdge> cedges;
    const Index ncv = read_count(next_line("curved_edges"), "curved_edges");
    for (Index i = 0; i < ncv; ++i) {
        std::istringstream is(next_line("curved_edges"));
        CEdge ce;
        int n = 0;
        is >> ce.v0 >> ce.v1 >> n;
        ce.nodes.resize(n);
        for (int j = 0; j < n; ++j) is >> ce.nodes[j].x() >> ce.nodes[j].y();
        if (is.fail()) parse_fail(path, lineno, "malformed curved edge line");
        cedges.push_back(std::move(ce));
    }
    if (next_line("end") != "end") parse_fail(path, lineno, "missing 'end' terminator");

    m.rebuild_edges();
    std::map<std::pair<Index, Index>, Index> lookup;
    for (Index e = 0; e < m.num_edges(); ++e) lookup[{m.edges[e].v0, m.edges[e].v1}] = e;
    for (const BEdge& b : bedges) {
        auto it = lookup.find({std::min(b.v0, b.v1), std::max(b.v0, b.v1)});
        if (it == lookup.end()) parse_fail(path, lineno, "boundary edge not present in cells");
        m.edges[it->second].marker = static_cast<geo::Marker>(b.marker);
    }
    for (const CEdge& c : cedges) {
        auto it = lookup.find({std::min(c.v0, c.v1), std::max(c.v0, c.v1)});
        if (it == lookup.end()) parse_fail(path, lineno, "curved edge not present in cells");
        CurvedEdge ce;
        ce.edge = it->second;
        ce.nodes = c.nodes;
        m.edge_curved[ce.edge] = static_cast<Index>(m.curved_edges.size());
        m.curved_edges.push_back(std::move(ce));
    }
    m.validate();
    return m;
}

bool meshes_equal(const Mesh& a, const Mesh& b) {
    if (a.geometry_order != b.geometry_order) return false;
    if (a.domain.has_value() != b.domain.has_value()) return false;
    if (a.domain) {
        if (a.domain->x_min != b.domain->x_min || a.domain->x_max != b.domain->x_max ||
            a.domain->y_half != b.domain->y_half ||
            a.domain->cylinder_radius != b.domain->cylinder_radius ||
            a.domain->cylinder_center != b.domain->cylinder_center)
            return false;
    }
    if (a.vertices != b.vertices || a.cells != b.cells) return false;
    if (a.edges.size() != b.edges.size() || a.curved_edges.size() != b.curved_edges.size())
        return false;
    for (size_t e = 0; e < a.edges.size(); ++e) {
        const Edge &ea = a.edges[e], &eb = b.edges[e];
        if (ea.v0 != eb.v0 || ea.v1 != eb.v1 || ea.cell0 != eb.cell0 || ea.cell1 != eb.cell1 ||
            ea.marker != eb.marker)
            return false;
    }
    for (size_t c = 0; c < a.curved_edges.size(); ++c) {
        if (a.curved_edges[c].edge != b.curved_edges[c].edge) return false;
        if (a.curved_edges[c].nodes != b.curved_edges[c].nodes) return false;
    }
    return true;
}

SingularVertexReport check_singular_vertices(const Mesh& m, Real threshold_deg) {
    std::vector<char> on_boundary(m.num_vertices(), 0);
    for (const Edge& e : m.edges)
        if (e.cell1 < 0) on_boundary[e.v0] = on_boundary[e.v1] = 1;

    std::vector<std::vector<Index>> incident(m.num_vertices());
    for (Index e = 0; e < m.num_edges(); ++e) {
        incident[m.edges[e].v0].push_back(e);
        incident[m.edges[e].v1].push_back(e);
    }

    SingularVertexReport report;
    for (Index v = 0; v < m.num_vertices(); ++v) {
        if (on_boundary[v]) {
            report.boundary_vertices.push_back(v);
            continue;
        }
        if (incident[v].empty()) continue;
        ++report.num_interior;
        Real deviation = 180.0;
        if (incident[v].size() == 4) {
            std::vector<Real> angles;
            for (Index e : incident[v]) {
                const Index other = (m.edges[e].v0 == v) ? m.edges[e].v1 : m.edges[e].v0;
                const Vec2 d = m.vertices[other] - m.vertices[v];
                angles.push_back(std::atan2(d.y(), d.x()));
            }
            std::sort(angles.begin(), angles.end());
            const Real d1 = std::abs(std::abs(angles[2] - angles[0]) - M_PI);
            const Real d2 = std::abs(std::abs(angles[3] - angles[1]) - M_PI);
            deviation = std::max(d1, d2) * 180.0 / M_PI;
        }
        report.min_deviation_deg = std::min(report.min_deviation_deg, deviation);
        if (deviation < threshold_deg) {
            report.flagged.push_back(v);
            report.flagged_deviation_deg.push_back(deviation);
        }
    }
    return report;
}

} // namespace cylbench::mesh
