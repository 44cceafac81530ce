#include "cylbench/geometry_map.hpp"
#include <Eigen/Dense>
#include "cylbench/lagrange.hpp"

#include <cmath>

namespace cylbench::fem {

namespace {

// equispaced 1D Lagrange basis on [0,1] (nodes i/q)
void lagrange1d(int q, Real s, std::vector<Real>& vals, std::vector<Real>* derivs) {
    const int n = q + 1;
    vals.assign(n, 0.0);
    if (derivs) derivs->assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const Real ti = static_cast<Real>(i) / q;
        Real denom = 1.0, v = 1.0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            denom *= (ti - static_cast<Real>(j) / q);
            v *= (s - static_cast<Real>(j) / q);
        }
        vals[i] = v / denom;
        if (derivs) {
            Real dsum = 0.0;
            for (int k = 0; k < n; ++k) {
                if (k == i) continue;
                Real term = 1.0;
                for (int j = 0; j < n; ++j) {
                    if (j == i || j == k) continue;
                    term *= (s - static_cast<Real>(j) / q);
                }
                dsum += term;
            }
            (*derivs)[i] = dsum / denom;
        }
    }
}

Vec2 circle_point(const geo::DomainSpec& d, Real theta) {
    return d.cylinder_center + d.cylinder_radius * Vec2(std::cos(theta), std::sin(theta));
}

// angle of p on the cylinder circle
Real circle_angle(const geo::DomainSpec& d, const Vec2& p) {
    const Vec2 r = p - d.cylinder_center;
    return std::atan2(r.y(), r.x());
}

Real wrap_delta(Real dth) {
    if (dth > M_PI) return dth - 2.0 * M_PI;
    if (dth < -M_PI) return dth + 2.0 * M_PI;
    return dth;
}

} // namespace

std::vector<Vec2> cell_geometry_nodes(const mesh::Mesh& m, Index c, int order) {
    const ReferenceLagrange& ref = ReferenceLagrange::get(order);
    const Vec2 v[3] = {m.vertices[m.cells[c][0]], m.vertices[m.cells[c][1]],
                       m.vertices[m.cells[c][2]]};
    std::vector<Vec2> nodes(ref.size());
    nodes[0] = v[0];
    nodes[1] = v[1];
    nodes[2] = v[2];

    struct CurvedLocal {
        int le;
        Real th_a, dth; // angle at local first vertex, sweep to local second
    };
    std::vector<CurvedLocal> curved;

    for (int le = 0; le < 3; ++le) {
        const Index ge = m.cell_edges[c][le];
        const Index curved_id = m.edge_curved[ge];
        const int a = (le + 1) % 3, b = (le + 2) % 3;
        if (curved_id < 0 || order < 2) {
            for (int n = 0; n < order - 1; ++n) {
                const Real s = static_cast<Real>(n + 1) / order;
                nodes[ref.edge_node(le, n)] = v[a] + s * (v[b] - v[a]);
            }
            continue;
        }
        const auto& d = *m.domain;
        const Real th_a = circle_angle(d, v[a]);
        const Real th_b = circle_angle(d, v[b]);
        const Real dth = wrap_delta(th_b - th_a);
        curved.push_back({le, th_a, dth});
        for (int n = 0; n < order - 1; ++n) {
            const Real s = static_cast<Real>(n + 1) / order;
            nodes[ref.edge_node(le, n)] = circle_point(d, th_a + s * dth);
        }
    }

    for (int n = 0; n < ref.num_interior_nodes(); ++n) {
        const Vec2 p = ref.nodes()[ref.interior_node(n)];
        const Real lam[3] = {1.0 - p.x() - p.y(), p.x(), p.y()};
        Vec2 x = lam[0] * v[0] + lam[1] * v[1] + lam[2] * v[2];
        // linear blending of the curved-edge displacement (vanishes on the
        // other edges, so straight edges of curved cells stay affine)
        for (const CurvedLocal& cl : curved) {
            const int a = (cl.le + 1) % 3, b = (cl.le + 2) % 3;
            const Real w = lam[a] + lam[b];
            if (w <= 0.0) continue;
            const Real s = lam[b] / w;
            const Vec2 on_curve = circle_point(*m.domain, cl.th_a + s * cl.dth);
            const Vec2 on_chord = v[a] + s * (v[b] - v[a]);
            x += w * (on_curve - on_chord);
        }
        nodes[ref.interior_node(n)] = x;
    }
    return nodes;
}

const std::vector<CellGeom>& GeometryCache::cells(int degree) {
    auto it = cell_cache_.find(degree);
    if (it != cell_cache_.end()) return it->second;

    const mesh::Mesh& m = *mesh_;
    const TriangleRule& rule = triangle_rule(degree);
    std::vector<CellGeom> out(m.num_cells());
    const int q = m.geometry_order;
    std::vector<Real> vals;
    std::vector<Vec2> grads;
    for (Index c = 0; c < m.num_cells(); ++c) {
        CellGeom& g = out[c];
        const Vec2 v0 = m.vertices[m.cells[c][0]];
        const Vec2 v1 = m.vertices[m.cells[c][1]];
        const Vec2 v2 = m.vertices[m.cells[c][2]];
        g.base = v0;
        g.F.col(0) = v1 - v0;
        g.F.col(1) = v2 - v0;
        g.detJ = g.F.determinant();
        if (g.detJ <= 0.0)
            throw GeometryError("GeometryCache: nonpositive Jacobian in cell " + std::to_string(c));
        g.Finv = g.F.inverse();
        if (!m.cell_is_curved(c)) continue;

        g.curved = true;
        const ReferenceLagrange& ref = ReferenceLagrange::get(q);
        const std::vector<Vec2> nodes = cell_geometry_nodes(m, c, q);
        const int nq = rule.size();
        g.x.resize(nq);
        g.Fq.resize(nq);
        g.Finvq.resize(nq);
        g.detJq.resize(nq);
        g.dFq.resize(nq);
        std::vector<Eigen::Vector3d> hess;
        for (int qp = 0; qp < nq; ++qp) {
            ref.eval(rule.points[qp], vals, &grads, &hess);
            Vec2 x = Vec2::Zero();
            Mat2 F = Mat2::Zero();
            Mat2 dF0 = Mat2::Zero(), dF1 = Mat2::Zero(); // d F / d ref_m
            for (int i = 0; i < ref.size(); ++i) {
                x += vals[i] * nodes[i];
                F += nodes[i] * grads[i].transpose();
                // (dF0)_{ij} = sum_i nodes * d2 N / (dref_j dref_0)
                dF0.col(0) += nodes[i] * hess[i][0]; // d2/dxdx -> j=0
                dF0.col(1) += nodes[i] * hess[i][1]; // d2/dxdy -> j=1, m=0
                dF1.col(0) += nodes[i] * hess[i][1];
                dF1.col(1) += nodes[i] * hess[i][2];
            }
            g.x[qp] = x;
            g.Fq[qp] = F;
            g.detJq[qp] = F.determinant();
            if (g.detJq[qp] <= 0.0)
                throw GeometryError("GeometryCache: nonpositive Jacobian at quadrature point of "
                                    "curved cell " + std::to_string(c));
            g.Finvq[qp] = F.inverse();
            g.dFq[qp][0] = dF0;
            g.dFq[qp][1] = dF1;
        }
    }
    return cell_cache_.emplace(degree, std::move(out)).first->second;
}

const std::vector<EdgeGeom>& GeometryCache::edges(int degree) {
    auto it = edge_cache_.find(degree);
    if (it != edge_cache_.end()) return it->second;

    const mesh::Mesh& m = *mesh_;
    const SegmentRule& rule = segment_rule(degree);
    const int nq = rule.size();
    const int q = m.geometry_order;
    std::vector<EdgeGeom> out(m.num_edges());
    std::vector<Real> l1v, l1d;
    for (Index e = 0; e < m.num_edges(); ++e) {
        const mesh::Edge& ed = m.edges[e];
        EdgeGeom& g = out[e];
        const Vec2 p0 = m.vertices[ed.v0], p1 = m.vertices[ed.v1];
        g.x.resize(nq);
        g.normal.resize(nq);
        g.w_ds.resize(nq);

        const Index curved_id = m.edge_curved[e];
        if (curved_id < 0 || q < 2) {
            const Vec2 t = p1 - p0;
            const Real len = t.norm();
            const Vec2 n = Vec2(t.y(), -t.x()) / len;
            for (int k = 0; k < nq; ++k) {
                g.x[k] = p0 + rule.points[k] * t;
                g.normal[k] = n;
                g.w_ds[k] = rule.weights[k] * len;
            }
        } else {
            g.curved = true;
            const auto& nodes = m.curved_edges[curved_id].nodes;
            std::vector<Vec2> pts;
            pts.push_back(p0);
            pts.insert(pts.end(), nodes.begin(), nodes.end());
            pts.push_back(p1);
            for (int k = 0; k < nq; ++k) {
                lagrange1d(q, rule.points[k], l1v, &l1d);
                Vec2 x = Vec2::Zero(), dx = Vec2::Zero();
                for (int i = 0; i <= q; ++i) {
                    x += l1v[i] * pts[i];
                    dx += l1d[i] * pts[i];
                }
                const Real len = dx.norm();
                g.x[k] = x;
                g.normal[k] = Vec2(dx.y(), -dx.x()) / len;
                g.w_ds[k] = rule.weights[k] * len;
            }
        }

        const Index cells[2] = {ed.cell0, ed.cell1};
        for (int s = 0; s < 2; ++s) {
            EdgeSide& side = g.sides[s];
            side.cell = cells[s];
            if (side.cell < 0) continue;
            side.local_edge = m.local_edge_index(side.cell, e);
            side.flip = m.edge_sign(side.cell, side.local_edge) < 0;
            const int a = (side.local_edge + 1) % 3, b = (side.local_edge + 2) % 3;
            const Vec2 ra = (a == 0) ? Vec2(0, 0) : (a == 1) ? Vec2(1, 0) : Vec2(0, 1);
            const Vec2 rb = (b == 0) ? Vec2(0, 0) : (b == 1) ? Vec2(1, 0) : Vec2(0, 1);
            side.ref_pts.resize(nq);
            for (int k = 0; k < nq; ++k) {
                const Real sl = side.flip ? 1.0 - rule.points[k] : rule.points[k];
                side.ref_pts[k] = ra + sl * (rb - ra);
            }
            if (m.cell_is_curved(side.cell)) {
                side.curved = true;
                const ReferenceLagrange& ref = ReferenceLagrange::get(q);
                const std::vector<Vec2> nodes = cell_geometry_nodes(m, side.cell, q);
                side.Fq.resize(nq);
                side.Finvq.resize(nq);
                side.detJq.resize(nq);
                side.dFq.resize(nq);
                std::vector<Real> vals;
                std::vector<Vec2> grads;
                std::vector<Eigen::Vector3d> hess;
                for (int k = 0; k < nq; ++k) {
                    ref.eval(side.ref_pts[k], vals, &grads, &hess);
                    Mat2 F = Mat2::Zero(), dF0 = Mat2::Zero(), dF1 = Mat2::Zero();
                    for (int i = 0; i < ref.size(); ++i) {
                        F += nodes[i] * grads[i].transpose();
                        dF0.col(0) += nodes[i] * hess[i][0];
                        dF0.col(1) += nodes[i] * hess[i][1];
                        dF1.col(0) += nodes[i] * hess[i][1];
                        dF1.col(1) += nodes[i] * hess[i][2];
                    }
                    side.Fq[k] = F;
                    side.detJq[k] = F.determinant();
                    side.Finvq[k] = F.inverse();
                    side.dFq[k][0] = dF0;
                    side.dFq[k][1] = dF1;
                }
            }
        }
        g.side0_sign = m.edge_sign(ed.cell0, m.local_edge_index(ed.cell0, e));
    }
    return edge_cache_.emplace(degree, std::move(out)).first->second;
}

Vec2 GeometryCache::physical_point(Index cell, const Vec2& ref, int) {
    const mesh::Mesh& m = *mesh_;
    if (!m.cell_is_curved(cell)) {
        const Vec2 v0 = m.vertices[m.cells[cell][0]];
        const Vec2 v1 = m.vertices[m.cells[cell][1]];
        const Vec2 v2 = m.vertices[m.cells[cell][2]];
        return v0 + ref.x() * (v1 - v0) + ref.y() * (v2 - v0);
    }
    const int q = m.geometry_order;
    const ReferenceLagrange& rl = ReferenceLagrange::get(q);
    const std::vector<Vec2> nodes = cell_geometry_nodes(m, cell, q);
    std::vector<Real> vals;
    rl.eval(ref, vals);
    Vec2 x = Vec2::Zero();
    for (int i = 0; i < rl.size(); ++i) x += vals[i] * nodes[i];
    return x;
}

} // namespace cylbench::fem
