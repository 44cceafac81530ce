#include "cylbench/linsolve.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <cmath>

namespace cylbench::linsolve {

namespace {

std::uint64_t fnv1a(const void* data, size_t n, std::uint64_t h) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace

std::uint64_t matrix_stamp(const SparseMat& A) {
    std::uint64_t h = 1469598103934665603ull;
    const Index rows = A.rows(), cols = A.cols(), nnz = A.nonZeros();
    h = fnv1a(&rows, sizeof(rows), h);
    h = fnv1a(&cols, sizeof(cols), h);
    h = fnv1a(&nnz, sizeof(nnz), h);
    h = fnv1a(A.outerIndexPtr(), sizeof(Index) * (A.outerSize() + 1), h);
    h = fnv1a(A.innerIndexPtr(), sizeof(Index) * nnz, h);
    h = fnv1a(A.valuePtr(), sizeof(Real) * nnz, h);
    return h;
}

struct Factorization::Impl {
    Eigen::SparseLU<Eigen::SparseMatrix<Real>> lu;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<Real>> ldlt;
};

Factorization::Factorization(const SparseMat& A, Kind kind)
    : A_(A), kind_(kind), impl_(std::make_shared<Impl>()) {
    if (A.rows() != A.cols()) throw SolverError("factorize: matrix must be square");
    stamp_ = matrix_stamp(A);
    A_.makeCompressed();
    if (kind_ == Kind::General) {
        impl_->lu.compute(A_);
        if (impl_->lu.info() != Eigen::Success)
            throw SolverError("factorize: " + std::string(impl_->lu.lastErrorMessage()));
    } else {
        impl_->ldlt.compute(A_);
        if (impl_->ldlt.info() != Eigen::Success)
            throw SolverError("factorize: LDLT factorization failed (matrix not SPD?)");
    }

    // condition estimate: power iteration for ||A||, inverse iteration for
    // 1/sigma_min; deterministic start vectors
    const Index n = A_.rows();
    VecX v = VecX::Ones(n);
    for (Index i = 0; i < n; ++i) v[i] += 0.5 * std::sin(static_cast<Real>(i));
    v.normalize();
    Real norm_a = 1.0;
    for (int it = 0; it < 5; ++it) {
        v = A_ * v;
        norm_a = v.norm();
        if (norm_a == 0.0) break;
        v /= norm_a;
    }
    VecX w = VecX::Ones(n);
    for (Index i = 0; i < n; ++i) w[i] += 0.25 * std::cos(static_cast<Real>(i));
    w.normalize();
    Real inv_sigma = 1.0;
    for (int it = 0; it < 5; ++it) {
        w = raw_solve(w);
        inv_sigma = w.norm();
        if (!std::isfinite(inv_sigma) || inv_sigma == 0.0) break;
        w /= inv_sigma;
    }
    cond_estimate_ = (std::isfinite(inv_sigma) && inv_sigma > 0.0) ? norm_a * inv_sigma : 1e300;
    auto_refine_ = cond_estimate_ > 1e12 ? 3 : 0;
}

VecX Factorization::raw_solve(const VecX& b) const {
    if (b.size() != A_.rows()) throw SolverError("solve: dimension mismatch");
    if (kind_ == Kind::General) return impl_->lu.solve(b);
    return impl_->ldlt.solve(b);
}

VecX Factorization::solve(const VecX& b) const { return solve(b, auto_refine_, nullptr); }

VecX Factorization::solve(const VecX& b, int refine_steps, SolveStats* stats) const {
    VecX x = raw_solve(b);
    Real rnorm = 0.0;
    int used = 0;
    if (refine_steps > 0) {
        VecX r = b - A_ * x;
        rnorm = r.norm();
        for (int it = 0; it < refine_steps; ++it) {
            if (rnorm == 0.0) break;
            const VecX dx = raw_solve(r);
            const VecX x_new = x + dx;
            const VecX r_new = b - A_ * x_new;
            if (r_new.norm() >= rnorm) break; // stagnation
            x = x_new;
            r = r_new;
            rnorm = r.norm();
            ++used;
        }
    } else if (stats) {
        rnorm = (b - A_ * x).norm();
    }
    if (stats) {
        stats->residual_norm = rnorm;
        stats->refine_steps = used;
    }
    return x;
}

} // namespace cylbench::linsolve
