#include <doctest.h>

#include "cylbench/fe_space.hpp"
#include "cylbench/meshgen.hpp"
#include "cylbench/polynomials.hpp"
#include "cylbench/quadrature.hpp"

#include <cmath>
#include <random>

using namespace cylbench;
using namespace cylbench::fem;

namespace {

mesh::Mesh irregular_patch() {
    // small unstructured-ish rectangle mesh (perturbed structured)
    mesh::Mesh m = mesh::structured_rectangle(0.0, 1.0, 0.0, 1.0, 3, 3);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-0.08, 0.08);
    std::vector<char> boundary(m.num_vertices(), 0);
    for (const auto& e : m.edges)
        if (e.cell1 < 0) boundary[e.v0] = boundary[e.v1] = 1;
    for (Index v = 0; v < m.num_vertices(); ++v) {
        if (boundary[v]) continue;
        m.vertices[v] += Vec2(u(rng), u(rng));
    }
    m.rebuild_edges();
    for (auto& e : m.edges)
        if (e.cell1 < 0 && e.marker == geo::Marker::None) e.marker = geo::Marker::Walls;
    m.validate();
    return m;
}

// evaluate a coefficient field of a vector space at an edge quadrature point
Vec2 eval_edge_side(const FESpace& sp, const VecX& coeffs, const PhysicalEdgeBasis& basis, Index cell,
                    int q) {
    Vec2 v = Vec2::Zero();
    const Index* dofs = sp.cell_dofs(cell);
    const Real* w = sp.cell_weights(cell);
    for (int l = 0; l < sp.local_size(); ++l) {
        const Real c = coeffs[dofs[l]] * w[l];
        v.x() += c * basis.val[0](q, l);
        v.y() += c * basis.val[1](q, l);
    }
    return v;
}

} // namespace

TEST_CASE("BDM normal traces are continuous across interior edges") {
    mesh::Mesh m = irregular_patch();
    GeometryCache geom(m);
    for (int k : {1, 2, 3, 4}) {
        FESpace sp(m, Family::BDM, k);
        std::mt19937 rng(17 + k);
        std::normal_distribution<double> gauss;
        VecX coeffs(sp.n_dofs());
        for (Index i = 0; i < sp.n_dofs(); ++i) coeffs[i] = gauss(rng);

        const int deg = 2 * k + 3;
        const auto& edges = geom.edges(deg);
        const auto& cells = geom.cells(deg);
        double max_jump = 0.0, max_val = 0.0;
        for (Index e = 0; e < m.num_edges(); ++e) {
            const EdgeGeom& eg = edges[e];
            if (eg.boundary()) continue;
            PhysicalEdgeBasis b0, b1;
            b0.load(sp, sp.trace_tables(deg, eg.sides[0].local_edge, eg.sides[0].flip),
                    cells[eg.sides[0].cell], eg.sides[0]);
            b1.load(sp, sp.trace_tables(deg, eg.sides[1].local_edge, eg.sides[1].flip),
                    cells[eg.sides[1].cell], eg.sides[1]);
            for (int q = 0; q < static_cast<int>(eg.x.size()); ++q) {
                const Vec2 v0 = eval_edge_side(sp, coeffs, b0, eg.sides[0].cell, q);
                const Vec2 v1 = eval_edge_side(sp, coeffs, b1, eg.sides[1].cell, q);
                max_jump = std::max(max_jump, std::abs((v0 - v1).dot(eg.normal[q])));
                max_val = std::max({max_val, v0.norm(), v1.norm()});
            }
        }
        CHECK(max_jump <= 1e-12 * std::max(1.0, max_val));
    }
}

TEST_CASE("BDM divergence of each shape function is degree k-1 and matches grad trace") {
    mesh::Mesh m = mesh::structured_rectangle(0.0, 1.0, 0.0, 1.0, 1, 1);
    GeometryCache geom(m);
    const int k = 3;
    FESpace sp(m, Family::BDM, k);
    const int deg = 2 * k + 2;
    const auto& cells = geom.cells(deg);
    PhysicalCellBasis basis;
    basis.load(sp, sp.cell_tables(deg), cells[0]);
    // div table consistency with the gradient tables
    for (int q = 0; q < basis.nq; ++q)
        for (int l = 0; l < basis.ndof; ++l)
            CHECK(std::abs(basis.div(q, l) -
                           (basis.grad[0][0](q, l) + basis.grad[1][1](q, l))) <= 1e-11);
}

TEST_CASE("lagrange continuous space dof count and vector blocks") {
    mesh::Mesh m = irregular_patch();
    FESpace v(m, Family::LagrangeContinuous, 4, 2);
    const Index scalar = m.num_vertices() + 3 * m.num_edges() + 3 * m.num_cells();
    CHECK(v.n_dofs() == 2 * scalar);
    FESpace p(m, Family::LagrangeContinuous, 3, 1);
    CHECK(p.n_dofs() == m.num_vertices() + 2 * m.num_edges() + m.num_cells());
    FESpace q(m, Family::LagrangeDiscontinuous, 3, 1);
    CHECK(q.n_dofs() == 10 * m.num_cells());
}

TEST_CASE("facet-tangential family reports unsupported") {
    mesh::Mesh m = mesh::structured_rectangle(0.0, 1.0, 0.0, 1.0, 1, 1);
    CHECK_THROWS_AS(FESpace(m, Family::FacetTangential, 2), FemError);
}

TEST_CASE("stress element: nt-trace continuity and trace-zero values") {
    mesh::Mesh m = irregular_patch();
    GeometryCache geom(m);
    const int k = 3;
    FESpace sp(m, Family::McsStress, k);
    std::mt19937 rng(23);
    std::normal_distribution<double> gauss;
    VecX coeffs(sp.n_dofs());
    for (Index i = 0; i < sp.n_dofs(); ++i) coeffs[i] = gauss(rng);

    const int deg = 2 * k + 3;
    const auto& edges = geom.edges(deg);
    const auto& cells = geom.cells(deg);

    // trace-zero pointwise on cells
    {
        PhysicalCellBasis basis;
        basis.load(sp, sp.cell_tables(deg), cells[0]);
        for (int q = 0; q < basis.nq; ++q)
            for (int l = 0; l < basis.ndof; ++l)
                CHECK(std::abs(basis.val[0](q, l) + basis.val[3](q, l)) <= 1e-12);
    }

    double max_jump = 0.0, max_val = 0.0;
    for (Index e = 0; e < m.num_edges(); ++e) {
        const EdgeGeom& eg = edges[e];
        if (eg.boundary()) continue;
        PhysicalEdgeBasis b0, b1;
        b0.load(sp, sp.trace_tables(deg, eg.sides[0].local_edge, eg.sides[0].flip),
                cells[eg.sides[0].cell], eg.sides[0]);
        b1.load(sp, sp.trace_tables(deg, eg.sides[1].local_edge, eg.sides[1].flip),
                cells[eg.sides[1].cell], eg.sides[1]);
        const Vec2 t = (m.vertices[m.edges[e].v1] - m.vertices[m.edges[e].v0]).normalized();
        const Vec2 n(t.y(), -t.x());
        for (int q = 0; q < static_cast<int>(eg.x.size()); ++q) {
            double s0 = 0.0, s1 = 0.0;
            const auto nt_of = [&](const PhysicalEdgeBasis& b, Index cell) {
                Mat2 sig = Mat2::Zero();
                const Index* dofs = sp.cell_dofs(cell);
                const Real* w = sp.cell_weights(cell);
                for (int l = 0; l < sp.local_size(); ++l) {
                    const Real c = coeffs[dofs[l]] * w[l];
                    sig(0, 0) += c * b.val[0](q, l);
                    sig(0, 1) += c * b.val[1](q, l);
                    sig(1, 0) += c * b.val[2](q, l);
                    sig(1, 1) += c * b.val[3](q, l);
                }
                return n.dot(sig * t);
            };
            s0 = nt_of(b0, eg.sides[0].cell);
            s1 = nt_of(b1, eg.sides[1].cell);
            max_jump = std::max(max_jump, std::abs(s0 - s1));
            max_val = std::max({max_val, std::abs(s0), std::abs(s1)});
        }
    }
    CHECK(max_val > 0.1); // the trace is not trivially zero
    CHECK(max_jump <= 1e-11 * std::max(1.0, max_val));
}

TEST_CASE("physical basis reproduces polynomials on curved cells") {
    // interpolate u(x) = x^2 + 2xy on the curved benchmark mesh and check the
    // Lagrange pullback gradient against the analytic one
    geo::DomainSpec spec;
    const geo::Geometry g = geo::build_domain(spec);
    mesh::MeshParams params;
    params.h_max = 8.0;
    params.geometry_order = 3;
    mesh::Mesh m = generate_mesh(g, params);
    GeometryCache geom(m);
    FESpace sp(m, Family::LagrangeContinuous, 2, 1);

    // nodal interpolation via boundary machinery is not available for the
    // interior; instead check shape-function partition of unity and gradient
    // consistency cell by cell.
    const int deg = 8;
    const auto& cells = geom.cells(deg);
    const TriangleRule& rule = triangle_rule(deg);
    PhysicalCellBasis basis;
    Index checked = 0;
    for (Index c = 0; c < m.num_cells() && checked < 30; ++c) {
        if (!m.cell_is_curved(c)) continue;
        ++checked;
        basis.load(sp, sp.cell_tables(deg), cells[c]);
        for (int q = 0; q < rule.size(); ++q) {
            double sum = 0.0, gx = 0.0, gy = 0.0;
            for (int l = 0; l < basis.ndof; ++l) {
                sum += basis.val[0](q, l);
                gx += basis.grad[0][0](q, l);
                gy += basis.grad[0][1](q, l);
            }
            CHECK(std::abs(sum - 1.0) <= 1e-11);
            CHECK(std::abs(gx) <= 1e-9);
            CHECK(std::abs(gy) <= 1e-9);
        }
    }
    CHECK(checked > 0);
}
