#pragma once

#include "cylbench/geometry_map.hpp"
#include "cylbench/mesh.hpp"
#include "cylbench/types.hpp"

#include <array>
#include <functional>
#include <map>
#include <set>
#include <vector>

namespace cylbench::fem {

enum class Family {
    LagrangeContinuous,
    LagrangeDiscontinuous,
    BDM,
    McsStress,
    FacetTangential,
};

/// Reference shape tables at the points of one triangle rule.
/// Layout: val[comp](q, local_dof), grad[comp][ref_dir](q, local_dof).
/// Scalar spaces fill comp 0 only; vector-valued spaces fill 2 components;
/// the stress space fills 4 (tensor entries xx, xy, yx, yy).
struct RefCellTables {
    int nq = 0, ndof = 0, ncomp = 1;
    std::array<MatX, 4> val;
    std::array<std::array<MatX, 2>, 4> grad;
};

/// Same layout at segment-rule points of one local edge (flip = local edge
/// direction opposite the global one). Points follow the global parameter.
struct RefTraceTables {
    int nq = 0, ndof = 0, ncomp = 1;
    std::array<MatX, 4> val;
    std::array<std::array<MatX, 2>, 4> grad;
};

/// A finite-element space over a triangular mesh.
///
/// vdim stacks `vdim` copies of a scalar Lagrange space into a vector field
/// (dof blocks per component); BDM and the stress space are natively
/// vector/tensor valued and require vdim = 1.
class FESpace {
public:
    FESpace(const mesh::Mesh& mesh, Family family, int order, int vdim = 1);

    const mesh::Mesh& mesh() const { return *mesh_; }
    Family family() const { return family_; }
    int order() const { return order_; }
    int vdim() const { return vdim_; }
    int value_dim() const; // 1 scalar, 2 vector, 4 tensor

    Index n_dofs() const { return n_dofs_; }
    Index n_scalar_dofs() const { return n_dofs_ / vdim_; }
    int local_size() const { return local_size_; }
    int scalar_local_size() const { return local_size_ / vdim_; }

    const Index* cell_dofs(Index c) const { return dofs_.data() + c * local_size_; }
    const Real* cell_weights(Index c) const { return weights_.data() + c * local_size_; }

    /// Reference tables, cached per rule degree.
    const RefCellTables& cell_tables(int degree) const;
    const RefTraceTables& trace_tables(int degree, int local_edge, bool flip) const;

    /// Dofs strongly constrained on the marked boundary edges, with values
    /// interpolating g. For Lagrange this is nodal interpolation (on the
    /// curved geometry); for BDM the normal-trace moments of g. The scalar
    /// overload applies one component function to a vdim = 1 space.
    std::vector<std::pair<Index, Real>> boundary_dof_values(
        const std::set<geo::Marker>& markers, const std::function<Vec2(const Vec2&)>& g,
        GeometryCache& geom) const;

    /// All dofs living on the marked boundary (no values).
    std::vector<Index> boundary_dofs(const std::set<geo::Marker>& markers) const;

    /// Required quadrature degree for products of `nfactors` shape functions
    /// and the Jacobian inflation on curved meshes.
    int quadrature_degree(int nfactors = 2) const;

private:
    void build_lagrange_continuous();
    void build_lagrange_discontinuous();
    void build_bdm();
    void build_mcs_stress();

    const mesh::Mesh* mesh_;
    Family family_;
    int order_;
    int vdim_;
    Index n_dofs_ = 0;
    int local_size_ = 0;
    std::vector<Index> dofs_;
    std::vector<Real> weights_;

    mutable std::map<int, RefCellTables> cell_tables_;
    mutable std::map<std::tuple<int, int, bool>, RefTraceTables> trace_tables_;
};

/// Physical (Piola-mapped) shape tables of one cell, materialized from the
/// reference tables: val[c](q,l), grad[c][d](q,l) = d(value_c)/dx_d, and the
/// divergence table for vector spaces. Matrix assembly and generic form
/// evaluation run off these; per-step hot kernels use pulled-back
/// contractions instead.
struct PhysicalCellBasis {
    int nq = 0, ndof = 0, ncomp = 1;
    std::array<MatX, 4> val;
    std::array<std::array<MatX, 2>, 4> grad;
    MatX div; // vector spaces only

    void load(const FESpace& space, const RefCellTables& tables, const CellGeom& geom);
};

/// Physical traces on one side of an edge (values and gradients at the
/// edge-rule points, global parameter order).
struct PhysicalEdgeBasis {
    int nq = 0, ndof = 0, ncomp = 1;
    std::array<MatX, 4> val;
    std::array<std::array<MatX, 2>, 4> grad;

    void load(const FESpace& space, const RefTraceTables& tables, const CellGeom& cell_geom,
              const EdgeSide& side);
};

} // namespace cylbench::fem
