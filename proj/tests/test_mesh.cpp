#include <doctest.h>

#include "cylbench/delaunay.hpp"
#include "cylbench/geometry.hpp"
#include "cylbench/mesh.hpp"
#include "cylbench/meshgen.hpp"
#include "cylbench/predicates.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

using namespace cylbench;
using namespace cylbench::geo;
using namespace cylbench::mesh;

TEST_CASE("build_domain validates the spec") {
    CHECK_NOTHROW(build_domain(DomainSpec{}));
    DomainSpec degenerate;
    degenerate.cylinder_radius = 0.0;
    CHECK_THROWS_AS(build_domain(degenerate), GeometryError);
    DomainSpec escape;
    escape.cylinder_center = Vec2(295.0, 0.0);
    escape.cylinder_radius = 10.0;
    CHECK_THROWS_AS(build_domain(escape), GeometryError);
}

TEST_CASE("size field interpolates from h_min at the cylinder to h_max") {
    const Geometry g = build_domain(DomainSpec{});
    const SizeField size(g, 8.0, 250.0);
    CHECK(size.h_min() == doctest::Approx(0.032));
    CHECK(size(Vec2(1.0, 0.0)) == doctest::Approx(0.032));
    CHECK(size(Vec2(100.0, 0.0)) == doctest::Approx(8.0));
    CHECK(size(Vec2(31.0, 0.0)) == doctest::Approx(8.0));
    const double mid = size(Vec2(16.0, 0.0));
    CHECK(mid > 0.032);
    CHECK(mid < 8.0);
}

TEST_CASE("delaunay of random points is empty-circumcircle") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Delaunay dt(Vec2(0, 0), Vec2(1, 1));
    std::vector<Vec2> pts;
    for (int i = 0; i < 300; ++i) {
        pts.emplace_back(u(rng), u(rng));
        dt.insert(pts.back());
    }
    int ntri = 0;
    for (Index t : dt.interior_triangles()) {
        const auto& tri = dt.triangles()[t];
        CHECK(orient2d(dt.points()[tri.v[0]], dt.points()[tri.v[1]], dt.points()[tri.v[2]]) > 0);
        // spot-check the Delaunay property against 40 random other points
        for (int k = 0; k < 40; ++k) {
            const Index other = 3 + (std::uniform_int_distribution<int>(0, 299)(rng));
            if (other == tri.v[0] || other == tri.v[1] || other == tri.v[2]) continue;
            CHECK(incircle(dt.points()[tri.v[0]], dt.points()[tri.v[1]], dt.points()[tri.v[2]],
                           dt.points()[other]) <= 0);
        }
        ++ntri;
    }
    CHECK(ntri > 400); // ~2n triangles for n interior points
}

TEST_CASE("structured rectangle mesh is valid and uniform") {
    Mesh m = structured_rectangle(0.0, 1.0, 0.0, 1.0, 4, 4);
    CHECK(m.num_cells() == 32);
    CHECK_NOTHROW(m.validate());
    for (Index c = 0; c < m.num_cells(); ++c)
        CHECK(m.cell_diameter(c) == doctest::Approx(std::sqrt(2.0) / 4.0));
}

TEST_CASE("ungraded rectangle gives a near-uniform mesh") {
    const Geometry g = build_rectangle(0.0, 1.0, 0.0, 1.0);
    MeshParams params;
    params.h_max = 0.25;
    params.grading_ratio = 1.0;
    Mesh m = generate_mesh(g, params);
    CHECK_NOTHROW(m.validate());
    CHECK_NOTHROW(check_grading(m, g, params));
    Real dmin = 1e30, dmax = 0.0;
    for (Index c = 0; c < m.num_cells(); ++c) {
        dmin = std::min(dmin, m.cell_diameter(c));
        dmax = std::max(dmax, m.cell_diameter(c));
    }
    CHECK(dmax <= 1.5 * params.h_max);
    CHECK(dmin >= 0.25 * params.h_max);
}

TEST_CASE("benchmark mesh: grading, markers, curvature, singular vertices") {
    const Geometry g = build_domain(DomainSpec{});
    MeshParams params;
    params.h_max = 8.0;
    params.grading_ratio = 250.0;
    params.geometry_order = 3;
    Mesh m = generate_mesh(g, params);
    CHECK_NOTHROW(m.validate());
    CHECK_NOTHROW(check_grading(m, g, params));

    // all four markers present
    int counts[5] = {0, 0, 0, 0, 0};
    for (const Edge& e : m.edges)
        if (e.cell1 < 0) counts[static_cast<int>(e.marker)]++;
    CHECK(counts[static_cast<int>(Marker::Inflow)] > 0);
    CHECK(counts[static_cast<int>(Marker::Outflow)] > 0);
    CHECK(counts[static_cast<int>(Marker::Walls)] > 0);
    CHECK(counts[static_cast<int>(Marker::Cylinder)] >= 16);

    // cylinder-adjacent cell size approx h_min
    for (const Edge& e : m.edges) {
        if (e.marker != Marker::Cylinder) continue;
        CHECK(m.cell_diameter(e.cell0) <= 1.5 * 0.032);
        CHECK(m.cell_diameter(e.cell0) >= 0.2 * 0.032);
    }

    // curved nodes sit on the circle
    CHECK(m.curved_edges.size() == static_cast<size_t>(counts[static_cast<int>(Marker::Cylinder)]));
    for (const CurvedEdge& ce : m.curved_edges) {
        CHECK(ce.nodes.size() == 2);
        for (const Vec2& p : ce.nodes) CHECK(std::abs(p.norm() - 1.0) <= 1e-12);
    }

    const SingularVertexReport report = check_singular_vertices(m);
    CHECK(report.flagged.empty());
    CHECK(report.num_interior > 0);
    CHECK(!report.boundary_vertices.empty());
}

TEST_CASE("halving h_max roughly quadruples the cell count") {
    const Geometry g = build_domain(DomainSpec{});
    MeshParams p8;
    p8.h_max = 8.0;
    MeshParams p4;
    p4.h_max = 4.0;
    const Mesh m8 = generate_mesh(g, p8);
    const Mesh m4 = generate_mesh(g, p4);
    const double ratio = static_cast<double>(m4.num_cells()) / m8.num_cells();
    CHECK(ratio >= 3.0);
    CHECK(ratio <= 6.0);
}

TEST_CASE("criss-cross patch has a singular center vertex") {
    Mesh m;
    m.vertices = {Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1), Vec2(0.5, 0.5)};
    m.cells = {{0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4}};
    m.rebuild_edges();
    for (Edge& e : m.edges)
        if (e.cell1 < 0) e.marker = Marker::Walls;
    CHECK_NOTHROW(m.validate());
    const SingularVertexReport report = check_singular_vertices(m);
    REQUIRE(report.flagged.size() == 1);
    CHECK(report.flagged[0] == 4);
    CHECK(report.flagged_deviation_deg[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(report.boundary_vertices.size() == 4);
}

TEST_CASE("mesh save/load round trip is bit-exact") {
    const Geometry g = build_domain(DomainSpec{});
    MeshParams params;
    params.h_max = 8.0;
    params.geometry_order = 2;
    Mesh m = generate_mesh(g, params);
    const std::string path = "roundtrip_mesh.txt";
    save_mesh(m, path);
    Mesh loaded = load_mesh(path);
    CHECK(meshes_equal(m, loaded));
    // and a second generation is deterministic
    Mesh m2 = generate_mesh(g, params);
    CHECK(meshes_equal(m, m2));
    std::remove(path.c_str());
}

TEST_CASE("load_mesh rejects truncated and invalid files") {
    Mesh m = structured_rectangle(0.0, 1.0, 0.0, 1.0, 2, 2);
    const std::string path = "bad_mesh.txt";
    save_mesh(m, path);

    // truncate: drop the last lines (curved block + end)
    std::ifstream in(path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    in.close();
    {
        std::ofstream out(path);
        for (size_t i = 0; i + 4 < lines.size(); ++i) out << lines[i] << "\n";
    }
    CHECK_THROWS_WITH_AS(load_mesh(path), doctest::Contains("unexpected end of file"),
                         GeometryError);

    // negative orientation cell
    Mesh bad = m;
    std::swap(bad.cells[0][0], bad.cells[0][1]);
    save_mesh(bad, path);
    CHECK_THROWS_WITH_AS(load_mesh(path), doctest::Contains("not positively oriented"),
                         GeometryError);
    std::remove(path.c_str());
}
