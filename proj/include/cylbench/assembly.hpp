#pragma once

#include "cylbench/fe_space.hpp"
#include "cylbench/types.hpp"

#include <Eigen/Sparse>
#include <functional>
#include <vector>

namespace cylbench::fem {

/// Compressed-row sparse matrix (sorted, unique column indices per row).
using SparseMat = Eigen::SparseMatrix<Real, Eigen::RowMajor, Index>;

/// Assembles sum_cells local cell matrices into test x trial CSR.
///
/// The kernel fills `local` (test.local_size() x trial.local_size()) for one
/// cell; dof weights are applied here. Cells are processed in parallel chunks
/// but merged in fixed cell order, so the result is bit-identical for any
/// thread count.
SparseMat assemble_cells(const FESpace& test, const FESpace& trial,
                         const std::function<void(Index, MatX&)>& kernel, int num_threads = 1);

/// Edge-loop variant. The kernel fills the four side blocks
/// local[ts][tr] (test side x trial side); unused blocks (boundary edges,
/// or kernels coupling one side) must be resized to 0 x 0.
using EdgeBlocks = std::array<std::array<MatX, 2>, 2>;
SparseMat assemble_edges(const FESpace& test, const FESpace& trial,
                         const std::function<void(Index, EdgeBlocks&)>& kernel,
                         int num_threads = 1);

/// Sum of two structurally different CSR matrices.
SparseMat add(const SparseMat& a, const SparseMat& b);

/// Assembles a load/residual vector from per-cell kernels.
VecX assemble_cell_vector(const FESpace& test, const std::function<void(Index, VecX&)>& kernel,
                          int num_threads = 1);

/// Symmetric elimination of Dirichlet dofs: for each (dof, value), the rhs is
/// reduced by value * column, the row and column are zeroed, the diagonal is
/// set to 1 and rhs[dof] = value. The sparsity pattern is preserved.
void apply_dirichlet(SparseMat& A, VecX& rhs, const std::vector<std::pair<Index, Real>>& bc);

/// Zeroes rows/columns only (used when the same pattern is reused with
/// increment unknowns, where constrained increments are zero).
void apply_dirichlet_homogeneous(SparseMat& A, const std::vector<Index>& dofs);

} // namespace cylbench::fem
