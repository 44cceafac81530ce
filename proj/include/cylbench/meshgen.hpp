#pragma once

#include "cylbench/geometry.hpp"
#include "cylbench/mesh.hpp"

namespace cylbench::mesh {

/// Graded unstructured triangulation of the domain via Delaunay refinement
/// against the SizeField, followed by Laplacian smoothing and (for the
/// channel-with-cylinder domain) isoparametric curving of the cylinder edges.
Mesh generate_mesh(const geo::Geometry& geom, const MeshParams& params);

/// Uniform right-triangle split of a rectangle (test meshes, convergence
/// studies). nx, ny cells per direction -> 2*nx*ny triangles.
Mesh structured_rectangle(Real x0, Real x1, Real y0, Real y1, int nx, int ny);

/// Audits the generated mesh against the size field: cell size at the
/// cylinder <= 1.5 h_min, bulk size <= 1.5 h_max, and adjacent cell diameters
/// within a factor of 2. Throws GeometryError with diagnostics on failure.
void check_grading(const Mesh& m, const geo::Geometry& geom, const MeshParams& params);

} // namespace cylbench::mesh
