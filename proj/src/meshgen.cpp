#include "cylbench/meshgen.hpp"
#include <memory>
#include "cylbench/delaunay.hpp"
#include "cylbench/predicates.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace cylbench::mesh {

namespace {

struct TriGeom {
    Vec2 circumcenter;
    Real circumradius;
    Real min_angle_deg;
};

bool tri_geom(const Vec2& a, const Vec2& b, const Vec2& c, TriGeom& out) {
    const Vec2 ab = b - a, ac = c - a;
    const Real d = 2.0 * (ab.x() * ac.y() - ab.y() * ac.x());
    if (d == 0.0) return false;
    const Real ab2 = ab.squaredNorm(), ac2 = ac.squaredNorm();
    const Vec2 cc = a + Vec2(ac.y() * ab2 - ab.y() * ac2, ab.x() * ac2 - ac.x() * ab2) / d;
    out.circumcenter = cc;
    out.circumradius = (cc - a).norm();
    const Real la = (b - c).norm(), lb = (c - a).norm(), lc = (a - b).norm();
    const auto angle = [](Real opp, Real s1, Real s2) {
        const Real cosv = std::clamp((s1 * s1 + s2 * s2 - opp * opp) / (2.0 * s1 * s2), -1.0, 1.0);
        return std::acos(cosv) * 180.0 / M_PI;
    };
    out.min_angle_deg = std::min({angle(la, lb, lc), angle(lb, lc, la), angle(lc, la, lb)});
    return true;
}

class Generator {
public:
    Generator(const geo::Geometry& geom, const MeshParams& params)
        : geom_(geom), params_(params), size_(geom, params.h_max, params.grading_ratio) {}

    Mesh run() {
        sample_boundary();
        triangulate();
        refine();
        for (int sweep = 0; sweep < 3; ++sweep) smooth();
        // Scott-Vogelius needs meshes free of (nearly) singular vertices; a
        // 4-valent interior vertex with pairwise-collinear edges is removed
        // and the neighborhood re-relaxed.
        for (int attempt = 0; attempt < 10; ++attempt) {
            const std::vector<Index> bad = nearly_singular_points();
            if (bad.empty()) break;
            remove_points(bad);
            smooth();
        }
        return extract();
    }

private:
    void sample_side(const Vec2& a, const Vec2& b) {
        const Real len = (b - a).norm();
        // greedy subdivision against the size field, then rescale to land on b
        std::vector<Real> ts{0.0};
        int guard = 0;
        while (ts.back() < 1.0 && ++guard < 1000000) {
            const Vec2 p = a + ts.back() * (b - a);
            ts.push_back(ts.back() + std::max(size_(p) / len, Real(1e-9)));
        }
        const int n = std::max<int>(1, static_cast<int>(ts.size()) - 1);
        for (int i = 1; i < n; ++i) boundary_pts_.push_back(a + (ts[i] / ts[n]) * (b - a));
    }

    void sample_boundary() {
        const Vec2 c00(geom_.x_min, geom_.y_min), c10(geom_.x_max, geom_.y_min);
        const Vec2 c11(geom_.x_max, geom_.y_max), c01(geom_.x_min, geom_.y_max);
        boundary_pts_ = {c00, c10, c11, c01};
        sample_side(c00, c10);
        sample_side(c10, c11);
        sample_side(c11, c01);
        sample_side(c01, c00);
        if (geom_.has_hole()) {
            const Real r = geom_.hole->cylinder_radius;
            const Vec2 ctr = geom_.hole->cylinder_center;
            const int n = std::max<int>(16, static_cast<int>(std::ceil(2.0 * M_PI * r / size_.h_min())));
            for (int i = 0; i < n; ++i) {
                const Real th = 2.0 * M_PI * i / n;
                boundary_pts_.push_back(ctr + r * Vec2(std::cos(th), std::sin(th)));
            }
        }
    }

    void triangulate() {
        dt_ = std::make_unique<Delaunay>(Vec2(geom_.x_min, geom_.y_min), Vec2(geom_.x_max, geom_.y_max));
        for (const Vec2& p : boundary_pts_) dt_->insert(p);
        num_boundary_ = static_cast<Index>(boundary_pts_.size()) + 3; // incl. super vertices
    }

    bool in_domain(const Vec2& p) const {
        if (p.x() <= geom_.x_min || p.x() >= geom_.x_max) return false;
        if (p.y() <= geom_.y_min || p.y() >= geom_.y_max) return false;
        return geom_.hole_distance(p) > 0.0;
    }

    bool admissible(const Vec2& p, Real h) const {
        if (p.x() < geom_.x_min + 0.4 * h || p.x() > geom_.x_max - 0.4 * h) return false;
        if (p.y() < geom_.y_min + 0.4 * h || p.y() > geom_.y_max - 0.4 * h) return false;
        return geom_.hole_distance(p) >= 0.5 * h;
    }

    Vec2 centroid(const Delaunay::Tri& t) const {
        return (dt_->points()[t.v[0]] + dt_->points()[t.v[1]] + dt_->points()[t.v[2]]) / 3.0;
    }

    void refine() {
        Index inserted_total = 0;
        for (int sweep = 0; sweep < 100; ++sweep) {
            const Index ntri = static_cast<Index>(dt_->triangles().size());
            bool changed = false;
            for (Index t = 0; t < ntri; ++t) {
                const Delaunay::Tri& tri = dt_->triangles()[t];
                if (!tri.alive) continue;
                if (dt_->is_super_vertex(tri.v[0]) || dt_->is_super_vertex(tri.v[1]) ||
                    dt_->is_super_vertex(tri.v[2]))
                    continue;
                const Vec2 cen = centroid(tri);
                if (!in_domain(cen)) continue;
                TriGeom g;
                if (!tri_geom(dt_->points()[tri.v[0]], dt_->points()[tri.v[1]],
                              dt_->points()[tri.v[2]], g))
                    continue;
                const Real h = size_(cen);
                const bool oversized = g.circumradius > 0.62 * h;
                const bool bad_shape = g.min_angle_deg < 25.0 && g.circumradius > 0.35 * h;
                if (!oversized && !bad_shape) continue;
                Vec2 cand = g.circumcenter;
                if (!admissible(cand, size_(in_domain(cand) ? cand : cen))) {
                    if (g.circumradius <= 1.1 * h) continue;
                    cand = cen;
                    if (!admissible(cand, size_(cand))) continue;
                }
                dt_->insert(cand);
                changed = true;
                if (++inserted_total > 2000000)
                    throw GeometryError("generate_mesh: refinement did not converge "
                                        "(inserted > 2e6 points; h_max=" +
                                        std::to_string(params_.h_max) + ")");
            }
            if (!changed) return;
        }
        throw GeometryError("generate_mesh: refinement did not settle within 100 sweeps");
    }

    void smooth() {
        const auto& pts = dt_->points();
        const Index npts = static_cast<Index>(pts.size());
        std::vector<Vec2> sum(npts, Vec2::Zero());
        std::vector<int> count(npts, 0);
        for (Index t : dt_->interior_triangles()) {
            const auto& tri = dt_->triangles()[t];
            if (!in_domain(centroid(tri))) continue;
            for (int i = 0; i < 3; ++i) {
                const Index a = tri.v[i], b = tri.v[(i + 1) % 3];
                sum[a] += pts[b];
                sum[b] += pts[a];
                count[a]++;
                count[b]++;
            }
        }
        std::vector<Vec2> next(pts.begin(), pts.end());
        for (Index v = num_boundary_; v < npts; ++v) {
            if (count[v] == 0) continue;
            const Vec2 avg = sum[v] / count[v];
            if (in_domain(avg) && admissible(avg, 0.6 * size_(avg))) next[v] = avg;
        }
        // rebuild the triangulation with moved points (ids preserved)
        auto fresh = std::make_unique<Delaunay>(Vec2(geom_.x_min, geom_.y_min),
                                                Vec2(geom_.x_max, geom_.y_max));
        for (Index v = 3; v < npts; ++v) fresh->insert(next[v]);
        dt_ = std::move(fresh);
    }

    std::vector<Index> nearly_singular_points() const {
        const auto& pts = dt_->points();
        std::vector<std::vector<Index>> nb(pts.size());
        std::vector<char> on_hull(pts.size(), 0);
        for (Index t : dt_->interior_triangles()) {
            const auto& tri = dt_->triangles()[t];
            if (!in_domain(centroid(tri))) continue;
            for (int i = 0; i < 3; ++i) {
                const Index a = tri.v[i], b = tri.v[(i + 1) % 3];
                nb[a].push_back(b);
                nb[b].push_back(a);
            }
        }
        std::vector<Index> flagged;
        for (Index v = num_boundary_; v < static_cast<Index>(pts.size()); ++v) {
            auto& n = nb[v];
            std::sort(n.begin(), n.end());
            n.erase(std::unique(n.begin(), n.end()), n.end());
            if (n.size() != 4) continue;
            std::vector<Real> angles;
            for (Index o : n) {
                const Vec2 d = pts[o] - pts[v];
                angles.push_back(std::atan2(d.y(), d.x()));
            }
            std::sort(angles.begin(), angles.end());
            const Real d1 = std::abs(std::abs(angles[2] - angles[0]) - M_PI);
            const Real d2 = std::abs(std::abs(angles[3] - angles[1]) - M_PI);
            // margin above the 5-degree reporting threshold
            if (std::max(d1, d2) * 180.0 / M_PI < 8.0) flagged.push_back(v);
        }
        return flagged;
    }

    void remove_points(const std::vector<Index>& bad) {
        const auto& pts = dt_->points();
        std::vector<char> drop(pts.size(), 0);
        for (Index v : bad) drop[v] = 1;
        auto fresh = std::make_unique<Delaunay>(Vec2(geom_.x_min, geom_.y_min),
                                                Vec2(geom_.x_max, geom_.y_max));
        for (Index v = 3; v < static_cast<Index>(pts.size()); ++v)
            if (!drop[v]) fresh->insert(pts[v]);
        dt_ = std::move(fresh);
    }

    Mesh extract() {
        Mesh m;
        m.geometry_order = params_.geometry_order;
        if (geom_.has_hole()) m.domain = *geom_.hole;

        const auto& pts = dt_->points();
        std::vector<Index> vmap(pts.size(), -1);
        for (Index t : dt_->interior_triangles()) {
            const auto& tri = dt_->triangles()[t];
            if (!in_domain(centroid(tri))) continue;
            std::array<Index, 3> cell;
            for (int i = 0; i < 3; ++i) {
                const Index v = tri.v[i];
                if (vmap[v] < 0) {
                    vmap[v] = m.num_vertices();
                    m.vertices.push_back(pts[v]);
                }
                cell[i] = vmap[v];
            }
            if (orient2d(m.vertices[cell[0]], m.vertices[cell[1]], m.vertices[cell[2]]) < 0)
                std::swap(cell[1], cell[2]);
            m.cells.push_back(cell);
        }
        if (m.cells.empty()) throw GeometryError("generate_mesh: no cells inside the domain");

        m.rebuild_edges();
        assign_markers(m);
        curve_cylinder_edges(m);
        m.validate();
        return m;
    }

    void assign_markers(Mesh& m) const {
        const Real tol = 1e-9 * std::max(geom_.width(), geom_.height());
        for (Edge& e : m.edges) {
            if (e.cell1 >= 0) continue;
            const Vec2 p0 = m.vertices[e.v0], p1 = m.vertices[e.v1];
            if (geom_.has_hole() && std::abs(geom_.hole_distance(p0)) < tol &&
                std::abs(geom_.hole_distance(p1)) < tol) {
                e.marker = geo::Marker::Cylinder;
            } else if (std::abs(p0.x() - geom_.x_min) < tol && std::abs(p1.x() - geom_.x_min) < tol) {
                e.marker = geo::Marker::Inflow;
            } else if (std::abs(p0.x() - geom_.x_max) < tol && std::abs(p1.x() - geom_.x_max) < tol) {
                e.marker = geo::Marker::Outflow;
            } else if ((std::abs(p0.y() - geom_.y_min) < tol && std::abs(p1.y() - geom_.y_min) < tol) ||
                       (std::abs(p0.y() - geom_.y_max) < tol && std::abs(p1.y() - geom_.y_max) < tol)) {
                e.marker = geo::Marker::Walls;
            } else {
                throw GeometryError("generate_mesh: boundary edge could not be classified");
            }
        }
    }

    void curve_cylinder_edges(Mesh& m) const {
        if (params_.geometry_order < 2 || !geom_.has_hole()) return;
        const Vec2 c = geom_.hole->cylinder_center;
        const Real r = geom_.hole->cylinder_radius;
        const int q = params_.geometry_order;
        for (Index e = 0; e < m.num_edges(); ++e) {
            if (m.edges[e].marker != geo::Marker::Cylinder) continue;
            const Vec2 d0 = m.vertices[m.edges[e].v0] - c;
            const Vec2 d1 = m.vertices[m.edges[e].v1] - c;
            const Real th0 = std::atan2(d0.y(), d0.x());
            Real dth = std::atan2(d1.y(), d1.x()) - th0;
            if (dth > M_PI) dth -= 2.0 * M_PI;
            if (dth < -M_PI) dth += 2.0 * M_PI;
            CurvedEdge ce;
            ce.edge = e;
            for (int j = 1; j < q; ++j) {
                const Real th = th0 + dth * j / q;
                ce.nodes.push_back(c + r * Vec2(std::cos(th), std::sin(th)));
            }
            m.edge_curved[e] = static_cast<Index>(m.curved_edges.size());
            m.curved_edges.push_back(std::move(ce));
        }
    }

    const geo::Geometry& geom_;
    MeshParams params_;
    geo::SizeField size_;
    std::vector<Vec2> boundary_pts_;
    std::unique_ptr<Delaunay> dt_;
    Index num_boundary_ = 0;
};

} // namespace

Mesh generate_mesh(const geo::Geometry& geom, const MeshParams& params) {
    if (!(params.h_max > 0.0)) throw GeometryError("generate_mesh: h_max must be positive");
    if (!(params.grading_ratio >= 1.0)) throw GeometryError("generate_mesh: grading_ratio >= 1");
    if (params.geometry_order < 1) throw GeometryError("generate_mesh: geometry_order >= 1");
    Generator gen(geom, params);
    return gen.run();
}

Mesh structured_rectangle(Real x0, Real x1, Real y0, Real y1, int nx, int ny) {
    if (nx < 1 || ny < 1 || !(x0 < x1) || !(y0 < y1))
        throw GeometryError("structured_rectangle: bad arguments");
    Mesh m;
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            m.vertices.emplace_back(x0 + (x1 - x0) * i / nx, y0 + (y1 - y0) * j / ny);
    const auto vid = [&](int i, int j) { return static_cast<Index>(j * (nx + 1) + i); };
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            m.cells.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
            m.cells.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
        }
    }
    m.rebuild_edges();
    const Real tol = 1e-12 * std::max(x1 - x0, y1 - y0);
    for (Edge& e : m.edges) {
        if (e.cell1 >= 0) continue;
        const Vec2 p0 = m.vertices[e.v0], p1 = m.vertices[e.v1];
        if (std::abs(p0.x() - x0) < tol && std::abs(p1.x() - x0) < tol)
            e.marker = geo::Marker::Inflow;
        else if (std::abs(p0.x() - x1) < tol && std::abs(p1.x() - x1) < tol)
            e.marker = geo::Marker::Outflow;
        else
            e.marker = geo::Marker::Walls;
    }
    m.validate();
    return m;
}

void check_grading(const Mesh& m, const geo::Geometry& geom, const MeshParams& params) {
    const geo::SizeField size(geom, params.h_max, params.grading_ratio);
    std::vector<Real> diam(m.num_cells());
    for (Index c = 0; c < m.num_cells(); ++c) diam[c] = m.cell_diameter(c);

    for (Index e = 0; e < m.num_edges(); ++e) {
        const Edge& ed = m.edges[e];
        if (ed.marker == geo::Marker::Cylinder) {
            if (diam[ed.cell0] > 1.5 * size.h_min())
                throw GeometryError("check_grading: cell at cylinder exceeds 1.5*h_min (diameter " +
                                    std::to_string(diam[ed.cell0]) + ")");
        }
        if (ed.cell1 >= 0) {
            const Real ratio = std::max(diam[ed.cell0], diam[ed.cell1]) /
                               std::min(diam[ed.cell0], diam[ed.cell1]);
            if (ratio > 2.0)
                throw GeometryError("check_grading: adjacent cell diameters differ by " +
                                    std::to_string(ratio));
        }
    }
    for (Index c = 0; c < m.num_cells(); ++c) {
        if (diam[c] > 1.5 * params.h_max)
            throw GeometryError("check_grading: cell diameter " + std::to_string(diam[c]) +
                                " exceeds 1.5*h_max");
    }
}

} // namespace cylbench::mesh
