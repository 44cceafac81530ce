#include "cylbench/assembly.hpp"

#include <thread>

namespace cylbench::fem {

namespace {

using Triplet = Eigen::Triplet<Real, Index>;

// run kernel over [0, n) in `nt` chunks (parallel), buffers merged in chunk order
template <typename Work>
std::vector<std::vector<Triplet>> run_chunks(Index n, int nt, const Work& work) {
    nt = std::max(1, nt);
    const Index chunk = (n + nt - 1) / std::max<Index>(1, nt);
    std::vector<std::vector<Triplet>> buffers(nt);
    std::vector<std::thread> threads;
    for (int t = 0; t < nt; ++t) {
        const Index begin = t * chunk, end = std::min<Index>(n, (t + 1) * chunk);
        if (begin >= end) continue;
        threads.emplace_back([&, t, begin, end] { work(t, begin, end, buffers[t]); });
    }
    for (auto& th : threads) th.join();
    return buffers;
}

SparseMat from_buffers(Index rows, Index cols, std::vector<std::vector<Triplet>>& buffers) {
    std::vector<Triplet> all;
    size_t total = 0;
    for (const auto& b : buffers) total += b.size();
    all.reserve(total);
    for (auto& b : buffers) all.insert(all.end(), b.begin(), b.end());
    SparseMat A(rows, cols);
    A.setFromTriplets(all.begin(), all.end());
    A.makeCompressed();
    return A;
}

} // namespace

SparseMat assemble_cells(const FESpace& test, const FESpace& trial,
                         const std::function<void(Index, MatX&)>& kernel, int num_threads) {
    const Index ncells = test.mesh().num_cells();
    auto buffers = run_chunks(ncells, num_threads,
        [&](int, Index begin, Index end, std::vector<Triplet>& buf) {
            MatX local;
            for (Index c = begin; c < end; ++c) {
                local.setZero(test.local_size(), trial.local_size());
                kernel(c, local);
                const Index* rd = test.cell_dofs(c);
                const Real* rw = test.cell_weights(c);
                const Index* cd = trial.cell_dofs(c);
                const Real* cw = trial.cell_weights(c);
                for (int i = 0; i < test.local_size(); ++i)
                    for (int j = 0; j < trial.local_size(); ++j) {
                        const Real v = local(i, j) * rw[i] * cw[j];
                        if (v != 0.0) buf.emplace_back(rd[i], cd[j], v);
                    }
            }
        });
    return from_buffers(test.n_dofs(), trial.n_dofs(), buffers);
}

SparseMat assemble_edges(const FESpace& test, const FESpace& trial,
                         const std::function<void(Index, EdgeBlocks&)>& kernel, int num_threads) {
    const mesh::Mesh& m = test.mesh();
    const Index nedges = m.num_edges();
    auto buffers = run_chunks(nedges, num_threads,
        [&](int, Index begin, Index end, std::vector<Triplet>& buf) {
            EdgeBlocks blocks;
            for (Index e = begin; e < end; ++e) {
                for (auto& row : blocks)
                    for (auto& b : row) b.resize(0, 0);
                kernel(e, blocks);
                const Index cells[2] = {m.edges[e].cell0, m.edges[e].cell1};
                for (int ts = 0; ts < 2; ++ts) {
                    for (int tr = 0; tr < 2; ++tr) {
                        const MatX& b = blocks[ts][tr];
                        if (b.size() == 0) continue;
                        const Index ct = cells[ts], cr = cells[tr];
                        if (ct < 0 || cr < 0)
                            throw FemError("assemble_edges: kernel filled a missing side");
                        const Index* rd = test.cell_dofs(ct);
                        const Real* rw = test.cell_weights(ct);
                        const Index* cd = trial.cell_dofs(cr);
                        const Real* cw = trial.cell_weights(cr);
                        for (int i = 0; i < test.local_size(); ++i)
                            for (int j = 0; j < trial.local_size(); ++j) {
                                const Real v = b(i, j) * rw[i] * cw[j];
                                if (v != 0.0) buf.emplace_back(rd[i], cd[j], v);
                            }
                    }
                }
            }
        });
    return from_buffers(test.n_dofs(), trial.n_dofs(), buffers);
}

SparseMat add(const SparseMat& a, const SparseMat& b) {
    SparseMat out = a + b;
    out.makeCompressed();
    return out;
}

VecX assemble_cell_vector(const FESpace& test, const std::function<void(Index, VecX&)>& kernel,
                          int num_threads) {
    const Index ncells = test.mesh().num_cells();
    num_threads = std::max(1, num_threads);
    std::vector<VecX> partial(num_threads, VecX::Zero(test.n_dofs()));
    const Index chunk = (ncells + num_threads - 1) / num_threads;
    std::vector<std::thread> threads;
    for (int t = 0; t < num_threads; ++t) {
        const Index begin = t * chunk, end = std::min<Index>(ncells, (t + 1) * chunk);
        if (begin >= end) continue;
        threads.emplace_back([&, t, begin, end] {
            VecX local;
            for (Index c = begin; c < end; ++c) {
                local.setZero(test.local_size());
                kernel(c, local);
                const Index* rd = test.cell_dofs(c);
                const Real* rw = test.cell_weights(c);
                for (int i = 0; i < test.local_size(); ++i) partial[t][rd[i]] += local[i] * rw[i];
            }
        });
    }
    for (auto& th : threads) th.join();
    // fixed-order reduction
    VecX out = VecX::Zero(test.n_dofs());
    for (int t = 0; t < num_threads; ++t) out += partial[t];
    return out;
}

void apply_dirichlet(SparseMat& A, VecX& rhs, const std::vector<std::pair<Index, Real>>& bc) {
    if (bc.empty()) return;
    std::vector<char> constrained(A.rows(), 0);
    VecX values = VecX::Zero(A.rows());
    for (const auto& [dof, val] : bc) {
        constrained[dof] = 1;
        values[dof] = val;
    }
    // rhs -= A(:, constrained) * values, rows/cols zeroed, unit diagonal
    for (Index r = 0; r < A.outerSize(); ++r) {
        bool has_diag = false;
        for (SparseMat::InnerIterator it(A, r); it; ++it) {
            const Index c = it.col();
            if (r == c) has_diag = true;
            if (constrained[r]) {
                it.valueRef() = (r == c) ? 1.0 : 0.0;
            } else if (constrained[c]) {
                rhs[r] -= it.value() * values[c];
                it.valueRef() = 0.0;
            }
        }
        if (constrained[r] && !has_diag)
            throw SolverError("apply_dirichlet: missing structural diagonal in constrained row");
    }
    for (const auto& [dof, val] : bc) rhs[dof] = val;
}

void apply_dirichlet_homogeneous(SparseMat& A, const std::vector<Index>& dofs) {
    if (dofs.empty()) return;
    std::vector<char> constrained(A.rows(), 0);
    for (Index d : dofs) constrained[d] = 1;
    for (Index r = 0; r < A.outerSize(); ++r) {
        for (SparseMat::InnerIterator it(A, r); it; ++it) {
            const Index c = it.col();
            if (constrained[r])
                it.valueRef() = (r == c) ? 1.0 : 0.0;
            else if (constrained[c])
                it.valueRef() = 0.0;
        }
    }
}

} // namespace cylbench::fem
