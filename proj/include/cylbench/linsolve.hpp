#pragma once

#include "cylbench/assembly.hpp"
#include "cylbench/types.hpp"

#include <cstdint>
#include <memory>

namespace cylbench::linsolve {

using fem::SparseMat;

enum class Kind {
    General,           // sparse LU with partial pivoting
    SymmetricPositive, // simplicial LDLT
};

struct SolveStats {
    Real residual_norm = 0.0; // ||Ax - b||_2 after the last refinement
    int refine_steps = 0;
};

/// Direct sparse factorization with factorization reuse and optional
/// iterative refinement. Refinement (up to 3 steps) engages automatically
/// when the condition estimate exceeds 1e12, and can be requested explicitly.
class Factorization {
public:
    Factorization(const SparseMat& A, Kind kind = Kind::General);

    Index rows() const { return A_.rows(); }

    /// Content stamp of the factored matrix (structure + values).
    std::uint64_t stamp() const { return stamp_; }

    /// Rough condition estimate from a few power/inverse-power iterations.
    Real condition_estimate() const { return cond_estimate_; }

    VecX solve(const VecX& b) const;
    VecX solve(const VecX& b, int refine_steps, SolveStats* stats = nullptr) const;

private:
    VecX raw_solve(const VecX& b) const;

    Eigen::SparseMatrix<Real> A_; // column-major copy used by the factorization
    Kind kind_;
    std::uint64_t stamp_ = 0;
    Real cond_estimate_ = 0.0;
    int auto_refine_ = 0;
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

std::uint64_t matrix_stamp(const SparseMat& A);

} // namespace cylbench::linsolve
