#pragma once

#include "cylbench/geometry.hpp"
#include "cylbench/types.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace cylbench::mesh {

struct MeshParams {
    Real h_max = 8.0;
    Real grading_ratio = 250.0; // h_min = h_max / grading_ratio at the cylinder
    int geometry_order = 1;     // polynomial order of the curved-edge mapping
};

struct Edge {
    Index v0 = -1, v1 = -1;     // v0 < v1 (global orientation)
    Index cell0 = -1, cell1 = -1; // cell1 < 0 on the boundary
    geo::Marker marker = geo::Marker::None;
};

/// Internal geometry nodes of a curved (cylinder) edge, ordered from v0 to v1.
struct CurvedEdge {
    Index edge = -1;
    std::vector<Vec2> nodes; // geometry_order - 1 points, all on the circle
};

struct Mesh {
    std::vector<Vec2> vertices;
    std::vector<std::array<Index, 3>> cells; // CCW vertex triples
    std::vector<Edge> edges;
    std::vector<std::array<Index, 3>> cell_edges; // local edge i opposite vertex i
    std::vector<Index> edge_curved;               // per edge: index into curved_edges or -1
    std::vector<CurvedEdge> curved_edges;
    int geometry_order = 1;
    std::optional<geo::DomainSpec> domain; // present for the channel-with-cylinder meshes

    Index num_vertices() const { return static_cast<Index>(vertices.size()); }
    Index num_cells() const { return static_cast<Index>(cells.size()); }
    Index num_edges() const { return static_cast<Index>(edges.size()); }

    /// Rebuilds edges / cell_edges / edge_curved from the cell list. Boundary
    /// markers and curved edges are re-attached by vertex pair.
    void rebuild_edges();

    /// Longest edge (chord) length of a cell.
    Real cell_diameter(Index c) const;

    /// Local index (0..2) of `edge` within `cell`, or -1.
    int local_edge_index(Index cell, Index edge) const;

    /// +1 when the local direction of edge `le` of `cell` agrees with the
    /// global v0 -> v1 direction, else -1.
    int edge_sign(Index cell, int le) const;

    bool cell_is_curved(Index c) const;

    /// Checks orientation, edge/cell consistency, boundary markers, and
    /// curved-node placement; throws GeometryError with a message on failure.
    void validate() const;
};

/// Plain-text mesh container round-trip. Numbers are written with 17
/// significant digits so save/load is bit-exact.
void save_mesh(const Mesh& m, const std::string& path);
Mesh load_mesh(const std::string& path);

/// Deep comparison of all serialized fields.
bool meshes_equal(const Mesh& a, const Mesh& b);

struct SingularVertexReport {
    /// Interior vertices whose 4 incident edges are pairwise collinear to
    /// within the threshold angle.
    std::vector<Index> flagged;
    std::vector<Real> flagged_deviation_deg;
    Real min_deviation_deg = 180.0; // minimum over all interior vertices
    Index num_interior = 0;
    std::vector<Index> boundary_vertices; // excluded from the interior check
};

/// A 4-valent interior vertex is (nearly) singular when its edges fall on two
/// straight lines; the deviation is the larger collinearity defect of the two
/// opposite edge pairs. Vertices of other valence cannot be singular and
/// report 180 degrees.
SingularVertexReport check_singular_vertices(const Mesh& m, Real threshold_deg = 5.0);

} // namespace cylbench::mesh
