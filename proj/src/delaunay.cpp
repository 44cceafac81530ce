#include "cylbench/delaunay.hpp"
#include "cylbench/predicates.hpp"

#include <map>
#include <stdexcept>

namespace cylbench::mesh {

Delaunay::Delaunay(const Vec2& lo, const Vec2& hi) {
    const Vec2 c = 0.5 * (lo + hi);
    const Real r = 4.0 * std::max({hi.x() - lo.x(), hi.y() - lo.y(), Real(1)});
    points_.push_back(c + Vec2(0.0, 64.0 * r));
    points_.push_back(c + Vec2(-64.0 * r, -64.0 * r));
    points_.push_back(c + Vec2(64.0 * r, -64.0 * r));
    tris_.push_back(Tri{{0, 1, 2}, {-1, -1, -1}, true});
}

bool Delaunay::point_in_triangle(Index t, const Vec2& p) const {
    const Tri& tri = tris_[t];
    for (int e = 0; e < 3; ++e) {
        if (orient2d(points_[tri.v[(e + 1) % 3]], points_[tri.v[(e + 2) % 3]], p) < 0) return false;
    }
    return true;
}

Index Delaunay::locate(const Vec2& p) const {
    Index t = last_;
    if (t < 0 || t >= static_cast<Index>(tris_.size()) || !tris_[t].alive) t = -1;
    if (t < 0) {
        for (Index i = static_cast<Index>(tris_.size()) - 1; i >= 0; --i)
            if (tris_[i].alive) { t = i; break; }
    }
    const Index max_steps = 4 * static_cast<Index>(tris_.size()) + 64;
    for (Index step = 0; step < max_steps; ++step) {
        const Tri& tri = tris_[t];
        bool moved = false;
        for (int e = 0; e < 3; ++e) {
            if (orient2d(points_[tri.v[(e + 1) % 3]], points_[tri.v[(e + 2) % 3]], p) < 0) {
                const Index next = tri.adj[e];
                if (next >= 0) {
                    t = next;
                    moved = true;
                    break;
                }
            }
        }
        if (!moved) return t;
    }
    // walk failed (should not happen inside the super-triangle); scan everything
    for (Index i = 0; i < static_cast<Index>(tris_.size()); ++i)
        if (tris_[i].alive && point_in_triangle(i, p)) return i;
    throw std::runtime_error("Delaunay::locate: point outside triangulation");
}

Index Delaunay::insert(const Vec2& p) {
    const Index t0 = locate(p);

    // exact duplicate -> return existing vertex
    for (int i = 0; i < 3; ++i) {
        const Index v = tris_[t0].v[i];
        if (points_[v] == p) return v;
    }

    // grow cavity of triangles whose circumcircle strictly contains p
    std::vector<Index> cavity;
    std::vector<Index> stack{t0};
    std::vector<char> in_cavity(tris_.size(), 0);
    in_cavity[t0] = 1;
    while (!stack.empty()) {
        const Index t = stack.back();
        stack.pop_back();
        cavity.push_back(t);
        for (int e = 0; e < 3; ++e) {
            const Index nb = tris_[t].adj[e];
            if (nb < 0 || in_cavity[nb]) continue;
            const Tri& tri = tris_[nb];
            if (incircle(points_[tri.v[0]], points_[tri.v[1]], points_[tri.v[2]], p) > 0) {
                in_cavity[nb] = 1;
                stack.push_back(nb);
            }
        }
    }

    const Index pid = static_cast<Index>(points_.size());
    points_.push_back(p);

    // cavity boundary edges (ordered CCW within their old triangle)
    struct BEdge {
        Index va, vb;
        Index outside; // neighbor triangle beyond the cavity (-1 at hull)
        int outside_edge;
    };
    std::vector<BEdge> boundary;
    for (Index t : cavity) {
        const Tri& tri = tris_[t];
        for (int e = 0; e < 3; ++e) {
            const Index nb = tri.adj[e];
            if (nb >= 0 && in_cavity[nb]) continue;
            BEdge be;
            be.va = tri.v[(e + 1) % 3];
            be.vb = tri.v[(e + 2) % 3];
            be.outside = nb;
            be.outside_edge = -1;
            if (nb >= 0) {
                for (int k = 0; k < 3; ++k)
                    if (tris_[nb].adj[k] == t) be.outside_edge = k;
            }
            boundary.push_back(be);
        }
    }

    for (Index t : cavity) tris_[t].alive = false;

    // fan of new triangles around p
    std::map<std::pair<Index, Index>, std::pair<Index, int>> open; // spoke edge -> (tri, local edge)
    for (const BEdge& be : boundary) {
        const Index nt = static_cast<Index>(tris_.size());
        Tri tri;
        tri.v = {pid, be.va, be.vb};
        tri.adj = {be.outside, -1, -1}; // edge 0 = (va, vb)
        tris_.push_back(tri);
        if (be.outside >= 0 && be.outside_edge >= 0) tris_[be.outside].adj[be.outside_edge] = nt;

        // spokes: edge 1 = (vb, p), edge 2 = (p, va)
        const auto link = [&](Index a, Index b, int local) {
            const auto key = std::minmax(a, b);
            auto it = open.find({key.first, key.second});
            if (it == open.end()) {
                open[{key.first, key.second}] = {nt, local};
            } else {
                tris_[nt].adj[local] = it->second.first;
                tris_[it->second.first].adj[it->second.second] = nt;
                open.erase(it);
            }
        };
        link(be.vb, pid, 1);
        link(pid, be.va, 2);
    }

    last_ = static_cast<Index>(tris_.size()) - 1;
    return pid;
}

std::vector<Index> Delaunay::interior_triangles() const {
    std::vector<Index> out;
    for (Index t = 0; t < static_cast<Index>(tris_.size()); ++t) {
        const Tri& tri = tris_[t];
        if (!tri.alive) continue;
        if (is_super_vertex(tri.v[0]) || is_super_vertex(tri.v[1]) || is_super_vertex(tri.v[2]))
            continue;
        out.push_back(t);
    }
    return out;
}

} // namespace cylbench::mesh
