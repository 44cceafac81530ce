#pragma once

#include "cylbench/mesh.hpp"
#include "cylbench/quadrature.hpp"
#include "cylbench/types.hpp"

#include <map>
#include <memory>
#include <vector>

namespace cylbench::fem {

/// Geometry nodes (ReferenceLagrange order-q layout) of one cell: vertices,
/// edge nodes (curved cylinder edges follow the circle, straight edges are
/// subdivided uniformly), then linearly blended interior nodes.
std::vector<Vec2> cell_geometry_nodes(const mesh::Mesh& m, Index c, int order);

/// Per-cell mapping data at the points of one triangle rule.
struct CellGeom {
    bool curved = false;
    // straight cells: constant affine data
    Vec2 base;
    Mat2 F;
    Mat2 Finv; // inverse of F
    Real detJ = 0.0;
    // curved cells: per quadrature point (empty otherwise)
    std::vector<Vec2> x;
    std::vector<Mat2> Fq;
    std::vector<Mat2> Finvq;
    std::vector<Real> detJq;
    std::vector<std::array<Mat2, 2>> dFq; // dF/dref_m (map hessian), Piola gradients

    const Mat2& jac(int q) const { return curved ? Fq[q] : F; }
    const Mat2& jac_inv(int q) const { return curved ? Finvq[q] : Finv; }
    Real det(int q) const { return curved ? detJq[q] : detJ; }
};

/// One side (adjacent cell) of an edge: where the edge-rule points land in
/// that cell's reference coordinates, ordered by the global edge parameter.
struct EdgeSide {
    Index cell = -1;
    int local_edge = -1;
    bool flip = false; // local edge direction opposite the global v0->v1
    std::vector<Vec2> ref_pts;
    // map data at the edge points when the adjacent cell is curved
    bool curved = false;
    std::vector<Mat2> Fq, Finvq;
    std::vector<Real> detJq;
    std::vector<std::array<Mat2, 2>> dFq;
};

/// Per-edge quadrature geometry, ordered by the global parameter s in [0,1]
/// running from v0 to v1.
struct EdgeGeom {
    bool curved = false;
    std::vector<Vec2> x;       // physical points
    std::vector<Vec2> normal;  // unit normal rot_{-90}(tangent); see side0_outward
    std::vector<Real> w_ds;    // rule weight times arc-length factor
    int side0_sign = 1;        // +1 when `normal` is outward for side(0).cell
    EdgeSide sides[2];

    bool boundary() const { return sides[1].cell < 0; }
};

/// Caches mapping tables per quadrature degree for one mesh.
class GeometryCache {
public:
    explicit GeometryCache(const mesh::Mesh& m) : mesh_(&m) {}

    const mesh::Mesh& mesh() const { return *mesh_; }

    /// Cell tables at triangle_rule(degree); curved cells get the degree
    /// inflated by 2*(geometry_order-1) extra exactness via the same rule
    /// (callers pick the degree; inflation is the caller's policy).
    const std::vector<CellGeom>& cells(int degree);

    const std::vector<EdgeGeom>& edges(int degree);

    /// Physical coordinates of a reference point in a cell.
    Vec2 physical_point(Index cell, const Vec2& ref, int any_degree = 4);

private:
    const mesh::Mesh* mesh_;
    std::map<int, std::vector<CellGeom>> cell_cache_;
    std::map<int, std::vector<EdgeGeom>> edge_cache_;
};

} // namespace cylbench::fem
