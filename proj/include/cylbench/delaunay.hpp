#pragma once

#include "cylbench/types.hpp"

#include <array>
#include <vector>

namespace cylbench::mesh {

/// Incremental Bowyer-Watson Delaunay triangulation with a super-triangle.
/// Vertices 0..2 are the synthetic super-triangle corners; user points get
/// ids >= 3. Triangles keep CCW orientation and edge-neighbor adjacency
/// (edge i is opposite vertex i).
class Delaunay {
public:
    struct Tri {
        std::array<Index, 3> v;
        std::array<Index, 3> adj; // -1: no neighbor
        bool alive = true;
    };

    /// Bounding box of all points that will ever be inserted.
    Delaunay(const Vec2& lo, const Vec2& hi);

    /// Inserts p; returns its vertex id. Exactly duplicated points are
    /// not re-inserted (the existing id is returned).
    Index insert(const Vec2& p);

    const std::vector<Vec2>& points() const { return points_; }
    const std::vector<Tri>& triangles() const { return tris_; }

    /// Ids of alive triangles not touching the super-triangle.
    std::vector<Index> interior_triangles() const;

    bool is_super_vertex(Index v) const { return v < 3; }

private:
    Index locate(const Vec2& p) const;
    bool point_in_triangle(Index t, const Vec2& p) const;

    std::vector<Vec2> points_;
    std::vector<Tri> tris_;
    Index last_ = 0; // walk hint
};

} // namespace cylbench::mesh
