#include "cylbench/fe_space.hpp"
#include <Eigen/Dense>
#include "cylbench/lagrange.hpp"
#include "cylbench/polynomials.hpp"
#include "cylbench/quadrature.hpp"
#include "cylbench/ref_elements.hpp"

#include <algorithm>
#include <cmath>

namespace cylbench::fem {

FESpace::FESpace(const mesh::Mesh& mesh, Family family, int order, int vdim)
    : mesh_(&mesh), family_(family), order_(order), vdim_(vdim) {
    if (order < 1) throw FemError("FESpace: order must be >= 1");
    if (vdim != 1 && vdim != 2) throw FemError("FESpace: vdim must be 1 or 2");
    switch (family) {
        case Family::LagrangeContinuous:
            build_lagrange_continuous();
            break;
        case Family::LagrangeDiscontinuous:
            build_lagrange_discontinuous();
            break;
        case Family::BDM:
            if (vdim != 1) throw FemError("FESpace: BDM is natively vector-valued (vdim = 1)");
            build_bdm();
            break;
        case Family::McsStress:
            if (vdim != 1) throw FemError("FESpace: stress space is natively tensor-valued");
            build_mcs_stress();
            break;
        case Family::FacetTangential:
            throw FemError("FESpace: unsupported family/order combination: the facet-tangential "
                           "space belongs to the hybridized realization, which this "
                           "implementation replaces by direct tangential coupling");
    }
}

int FESpace::value_dim() const {
    switch (family_) {
        case Family::BDM: return 2;
        case Family::McsStress: return 4;
        default: return vdim_;
    }
}

int FESpace::quadrature_degree(int nfactors) const {
    int deg = nfactors * order_ + 2;
    if (mesh_->geometry_order > 1 && !mesh_->curved_edges.empty())
        deg += 2 * (mesh_->geometry_order - 1);
    return deg;
}

void FESpace::build_lagrange_continuous() {
    const mesh::Mesh& m = *mesh_;
    const int k = order_;
    const int n_edge = k - 1;
    const int n_int = (k - 1) * (k - 2) / 2;
    const Index n_scalar = m.num_vertices() + m.num_edges() * n_edge + m.num_cells() * n_int;
    n_dofs_ = n_scalar * vdim_;
    const int nloc_scalar = (k + 1) * (k + 2) / 2;
    local_size_ = nloc_scalar * vdim_;
    dofs_.resize(m.num_cells() * local_size_);
    weights_.assign(m.num_cells() * local_size_, 1.0);

    for (Index c = 0; c < m.num_cells(); ++c) {
        Index* out = dofs_.data() + c * local_size_;
        // scalar pattern first
        std::vector<Index> scalar(nloc_scalar);
        for (int i = 0; i < 3; ++i) scalar[i] = m.cells[c][i];
        for (int le = 0; le < 3; ++le) {
            const Index ge = m.cell_edges[c][le];
            const bool flip = m.edge_sign(c, le) < 0;
            for (int n = 0; n < n_edge; ++n) {
                const int gn = flip ? (n_edge - 1 - n) : n;
                scalar[3 + le * n_edge + n] = m.num_vertices() + ge * n_edge + gn;
            }
        }
        for (int n = 0; n < n_int; ++n)
            scalar[3 + 3 * n_edge + n] =
                m.num_vertices() + m.num_edges() * n_edge + c * n_int + n;
        for (int comp = 0; comp < vdim_; ++comp)
            for (int i = 0; i < nloc_scalar; ++i)
                out[comp * nloc_scalar + i] = comp * n_scalar + scalar[i];
    }
}

void FESpace::build_lagrange_discontinuous() {
    const mesh::Mesh& m = *mesh_;
    const int nd = (order_ + 1) * (order_ + 2) / 2;
    const Index n_scalar = m.num_cells() * nd;
    n_dofs_ = n_scalar * vdim_;
    local_size_ = nd * vdim_;
    dofs_.resize(m.num_cells() * local_size_);
    weights_.assign(m.num_cells() * local_size_, 1.0);
    for (Index c = 0; c < m.num_cells(); ++c) {
        Index* out = dofs_.data() + c * local_size_;
        for (int comp = 0; comp < vdim_; ++comp)
            for (int i = 0; i < nd; ++i) out[comp * nd + i] = comp * n_scalar + c * nd + i;
    }
}

void FESpace::build_bdm() {
    const mesh::Mesh& m = *mesh_;
    const int k = order_;
    const int n_edge = k + 1;
    const int n_int = (k + 1) * (k - 1);
    n_dofs_ = m.num_edges() * n_edge + m.num_cells() * n_int;
    local_size_ = 3 * n_edge + n_int;
    dofs_.resize(m.num_cells() * local_size_);
    weights_.assign(m.num_cells() * local_size_, 1.0);
    for (Index c = 0; c < m.num_cells(); ++c) {
        Index* out = dofs_.data() + c * local_size_;
        Real* w = weights_.data() + c * local_size_;
        for (int le = 0; le < 3; ++le) {
            const Index ge = m.cell_edges[c][le];
            const bool flip = m.edge_sign(c, le) < 0;
            for (int j = 0; j < n_edge; ++j) {
                out[le * n_edge + j] = ge * n_edge + j;
                w[le * n_edge + j] = !flip ? 1.0 : ((j % 2 == 0) ? -1.0 : 1.0);
            }
        }
        for (int n = 0; n < n_int; ++n)
            out[3 * n_edge + n] = m.num_edges() * n_edge + c * n_int + n;
    }
}

void FESpace::build_mcs_stress() {
    const mesh::Mesh& m = *mesh_;
    if (!m.curved_edges.empty())
        throw FemError("FESpace: the stress space supports straight (geometry_order 1) meshes; "
                       "use the H(div)-DG viscous path on curved meshes");
    const int k = order_;
    const int nd = (k + 1) * (k + 2) / 2;
    const int n_edge = k;
    const int n_int = 3 * nd - 3 - 3 * k;
    n_dofs_ = m.num_edges() * n_edge + m.num_cells() * n_int;
    local_size_ = 3 * n_edge + n_int;
    dofs_.resize(m.num_cells() * local_size_);
    weights_.assign(m.num_cells() * local_size_, 1.0);
    for (Index c = 0; c < m.num_cells(); ++c) {
        Index* out = dofs_.data() + c * local_size_;
        Real* w = weights_.data() + c * local_size_;
        const Real detJ =
            (Mat2() << m.vertices[m.cells[c][1]] - m.vertices[m.cells[c][0]],
             m.vertices[m.cells[c][2]] - m.vertices[m.cells[c][0]])
                .finished()
                .determinant();
        const Real ref_len[3] = {M_SQRT2, 1.0, 1.0};
        for (int le = 0; le < 3; ++le) {
            const Index ge = m.cell_edges[c][le];
            const bool flip = m.edge_sign(c, le) < 0;
            const Real len = (m.vertices[m.edges[ge].v1] - m.vertices[m.edges[ge].v0]).norm();
            for (int j = 0; j < n_edge; ++j) {
                out[le * n_edge + j] = ge * n_edge + j;
                const Real parity = (!flip || j % 2 == 0) ? 1.0 : -1.0;
                w[le * n_edge + j] = parity * len / (detJ * ref_len[le]);
            }
        }
        for (int n = 0; n < n_int; ++n)
            out[3 * n_edge + n] = m.num_edges() * n_edge + c * n_int + n;
    }
}

namespace {

void lagrange_scalar_tables(const ReferenceLagrange& ref, const std::vector<Vec2>& pts, MatX& val,
                            MatX& gx, MatX& gy) {
    const int nq = static_cast<int>(pts.size());
    const int ns = ref.size();
    val.resize(nq, ns);
    gx.resize(nq, ns);
    gy.resize(nq, ns);
    std::vector<Real> v;
    std::vector<Vec2> g;
    for (int q = 0; q < nq; ++q) {
        ref.eval(pts[q], v, &g);
        for (int i = 0; i < ns; ++i) {
            val(q, i) = v[i];
            gx(q, i) = g[i].x();
            gy(q, i) = g[i].y();
        }
    }
}

void dubiner_tables(const DubinerBasis& dub, const std::vector<Vec2>& pts, MatX& val, MatX& gx,
                    MatX& gy) {
    const int nq = static_cast<int>(pts.size());
    const int nd = dub.size();
    val.resize(nq, nd);
    gx.resize(nq, nd);
    gy.resize(nq, nd);
    std::vector<Real> v;
    std::vector<Vec2> g;
    for (int q = 0; q < nq; ++q) {
        dub.eval(pts[q], v, &g);
        for (int i = 0; i < nd; ++i) {
            val(q, i) = v[i];
            gx(q, i) = g[i].x();
            gy(q, i) = g[i].y();
        }
    }
}

template <typename Tables>
void fill_tables(const FESpace& sp, const std::vector<Vec2>& pts, Tables& t) {
    const int nq = static_cast<int>(pts.size());
    t.nq = nq;
    t.ndof = sp.local_size();
    t.ncomp = sp.value_dim();
    switch (sp.family()) {
        case Family::LagrangeContinuous:
        case Family::LagrangeDiscontinuous: {
            MatX val, gx, gy;
            if (sp.family() == Family::LagrangeContinuous) {
                lagrange_scalar_tables(ReferenceLagrange::get(sp.order()), pts, val, gx, gy);
            } else {
                dubiner_tables(DubinerBasis(sp.order()), pts, val, gx, gy);
            }
            const int ns = sp.scalar_local_size();
            for (int c = 0; c < sp.vdim(); ++c) {
                t.val[c] = MatX::Zero(nq, t.ndof);
                t.grad[c][0] = MatX::Zero(nq, t.ndof);
                t.grad[c][1] = MatX::Zero(nq, t.ndof);
                t.val[c].middleCols(c * ns, ns) = val;
                t.grad[c][0].middleCols(c * ns, ns) = gx;
                t.grad[c][1].middleCols(c * ns, ns) = gy;
            }
            break;
        }
        case Family::BDM: {
            MatX val, gx, gy;
            dubiner_tables(DubinerBasis(sp.order()), pts, val, gx, gy);
            const MatX& coeff = bdm_coefficients(sp.order());
            const int nd = static_cast<int>(val.cols());
            for (int c = 0; c < 2; ++c) {
                const auto block = coeff.middleRows(c * nd, nd);
                t.val[c] = val * block;
                t.grad[c][0] = gx * block;
                t.grad[c][1] = gy * block;
            }
            break;
        }
        case Family::McsStress: {
            MatX val, gx, gy;
            dubiner_tables(DubinerBasis(sp.order()), pts, val, gx, gy);
            const MatX& coeff = mcs_stress_coefficients(sp.order());
            const int nd = static_cast<int>(val.cols());
            for (int entry = 0; entry < 4; ++entry) {
                t.val[entry] = MatX::Zero(nq, t.ndof);
                t.grad[entry][0] = MatX::Zero(nq, t.ndof);
                t.grad[entry][1] = MatX::Zero(nq, t.ndof);
                for (int tc = 0; tc < 3; ++tc) {
                    const Real f = kStressTensors[tc][entry];
                    if (f == 0.0) continue;
                    const auto block = coeff.middleRows(tc * nd, nd);
                    t.val[entry] += f * (val * block);
                    t.grad[entry][0] += f * (gx * block);
                    t.grad[entry][1] += f * (gy * block);
                }
            }
            break;
        }
        default:
            throw FemError("fill_tables: unsupported family");
    }
}

} // namespace

const RefCellTables& FESpace::cell_tables(int degree) const {
    auto it = cell_tables_.find(degree);
    if (it != cell_tables_.end()) return it->second;
    RefCellTables t;
    fill_tables(*this, triangle_rule(degree).points, t);
    return cell_tables_.emplace(degree, std::move(t)).first->second;
}

const RefTraceTables& FESpace::trace_tables(int degree, int local_edge, bool flip) const {
    const auto key = std::make_tuple(degree, local_edge, flip);
    auto it = trace_tables_.find(key);
    if (it != trace_tables_.end()) return it->second;

    const Vec2 v[3] = {{0, 0}, {1, 0}, {0, 1}};
    const Vec2 ra = v[(local_edge + 1) % 3], rb = v[(local_edge + 2) % 3];
    const SegmentRule& rule = segment_rule(degree);
    std::vector<Vec2> pts(rule.size());
    for (int q = 0; q < rule.size(); ++q) {
        const Real s = flip ? 1.0 - rule.points[q] : rule.points[q];
        pts[q] = ra + s * (rb - ra);
    }
    RefTraceTables t;
    fill_tables(*this, pts, t);
    return trace_tables_.emplace(key, std::move(t)).first->second;
}

// ---------------------------------------------------------------------------
// physical materialization
// ---------------------------------------------------------------------------

namespace {

// shared by cell and edge variants; geometry provided per point
template <typename Tables, typename Phys>
void materialize(const FESpace& sp, const Tables& T, Phys& out,
                 const std::function<void(int, Mat2&, Mat2&, Real&, std::array<Mat2, 2>*)>& geom_at) {
    const int nq = T.nq, ndof = T.ndof;
    out.nq = nq;
    out.ndof = ndof;
    out.ncomp = T.ncomp;

    const Family fam = sp.family();
    if (fam == Family::LagrangeContinuous || fam == Family::LagrangeDiscontinuous) {
        for (int c = 0; c < T.ncomp; ++c) {
            out.val[c] = T.val[c];
            out.grad[c][0].resize(nq, ndof);
            out.grad[c][1].resize(nq, ndof);
        }
        Mat2 F, Finv;
        Real detJ;
        for (int q = 0; q < nq; ++q) {
            geom_at(q, F, Finv, detJ, nullptr);
            for (int c = 0; c < T.ncomp; ++c) {
                for (int l = 0; l < ndof; ++l) {
                    const Real gx = T.grad[c][0](q, l), gy = T.grad[c][1](q, l);
                    out.grad[c][0](q, l) = gx * Finv(0, 0) + gy * Finv(1, 0);
                    out.grad[c][1](q, l) = gx * Finv(0, 1) + gy * Finv(1, 1);
                }
            }
        }
        return;
    }

    if (fam == Family::BDM) {
        for (int c = 0; c < 2; ++c) {
            out.val[c].resize(nq, ndof);
            out.grad[c][0].resize(nq, ndof);
            out.grad[c][1].resize(nq, ndof);
        }
        Mat2 F, Finv;
        Real detJ;
        std::array<Mat2, 2> dF;
        for (int q = 0; q < nq; ++q) {
            geom_at(q, F, Finv, detJ, &dF);
            const Mat2 A = F / detJ;
            // dA/dref_m = dF_m / J - (dJ_m / J^2) F, dJ_m = J tr(Finv dF_m)
            std::array<Mat2, 2> dA;
            for (int m = 0; m < 2; ++m) {
                const Real dJ = detJ * (Finv * dF[m]).trace();
                dA[m] = dF[m] / detJ - (dJ / (detJ * detJ)) * F;
            }
            for (int l = 0; l < ndof; ++l) {
                const Vec2 vhat(T.val[0](q, l), T.val[1](q, l));
                const Vec2 v = A * vhat;
                out.val[0](q, l) = v.x();
                out.val[1](q, l) = v.y();
                // Ghat(c, m) = d vhat_c / d ref_m
                Mat2 Ghat;
                Ghat(0, 0) = T.grad[0][0](q, l);
                Ghat(0, 1) = T.grad[0][1](q, l);
                Ghat(1, 0) = T.grad[1][0](q, l);
                Ghat(1, 1) = T.grad[1][1](q, l);
                Mat2 ref_part = A * Ghat + dA[0] * vhat * Eigen::RowVector2d(1, 0) +
                                dA[1] * vhat * Eigen::RowVector2d(0, 1);
                const Mat2 G = ref_part * Finv; // d v_c / d x_d
                out.grad[0][0](q, l) = G(0, 0);
                out.grad[0][1](q, l) = G(0, 1);
                out.grad[1][0](q, l) = G(1, 0);
                out.grad[1][1](q, l) = G(1, 1);
            }
        }
        return;
    }

    if (fam == Family::McsStress) {
        for (int e = 0; e < 4; ++e) {
            out.val[e].resize(nq, ndof);
            out.grad[e][0].resize(nq, ndof);
            out.grad[e][1].resize(nq, ndof);
        }
        Mat2 F, Finv;
        Real detJ;
        for (int q = 0; q < nq; ++q) {
            geom_at(q, F, Finv, detJ, nullptr);
            for (int l = 0; l < ndof; ++l) {
                Mat2 sig, dsig0, dsig1;
                sig << T.val[0](q, l), T.val[1](q, l), T.val[2](q, l), T.val[3](q, l);
                dsig0 << T.grad[0][0](q, l), T.grad[1][0](q, l), T.grad[2][0](q, l),
                    T.grad[3][0](q, l);
                dsig1 << T.grad[0][1](q, l), T.grad[1][1](q, l), T.grad[2][1](q, l),
                    T.grad[3][1](q, l);
                const Mat2 s = F * sig * Finv;
                const Mat2 dsx = F * (dsig0 * Finv(0, 0) + dsig1 * Finv(1, 0)) * Finv;
                const Mat2 dsy = F * (dsig0 * Finv(0, 1) + dsig1 * Finv(1, 1)) * Finv;
                const Mat2* mats[3] = {&s, &dsx, &dsy};
                for (int which = 0; which < 3; ++which) {
                    const Mat2& mm = *mats[which];
                    Real vals[4] = {mm(0, 0), mm(0, 1), mm(1, 0), mm(1, 1)};
                    for (int e = 0; e < 4; ++e) {
                        if (which == 0)
                            out.val[e](q, l) = vals[e];
                        else
                            out.grad[e][which - 1](q, l) = vals[e];
                    }
                }
            }
        }
        return;
    }
    throw FemError("materialize: unsupported family");
}

} // namespace

void PhysicalCellBasis::load(const FESpace& space, const RefCellTables& tables,
                             const CellGeom& geom) {
    materialize(space, tables, *this,
                [&](int q, Mat2& F, Mat2& Finv, Real& detJ, std::array<Mat2, 2>* dF) {
                    F = geom.jac(q);
                    Finv = geom.jac_inv(q);
                    detJ = geom.det(q);
                    if (dF) {
                        if (geom.curved)
                            *dF = geom.dFq[q];
                        else
                            (*dF)[0] = (*dF)[1] = Mat2::Zero();
                    }
                });
    if (space.value_dim() == 2) {
        div.resize(nq, ndof);
        if (space.family() == Family::BDM) {
            // Piola divergence identity: div v = (1/J) ref-div vhat
            for (int q = 0; q < nq; ++q)
                for (int l = 0; l < ndof; ++l)
                    div(q, l) = (tables.grad[0][0](q, l) + tables.grad[1][1](q, l)) / geom.det(q);
        } else {
            div = grad[0][0] + grad[1][1];
        }
    }
}

void PhysicalEdgeBasis::load(const FESpace& space, const RefTraceTables& tables,
                             const CellGeom& cell_geom, const EdgeSide& side) {
    materialize(space, tables, *this,
                [&](int q, Mat2& F, Mat2& Finv, Real& detJ, std::array<Mat2, 2>* dF) {
                    if (side.curved) {
                        F = side.Fq[q];
                        Finv = side.Finvq[q];
                        detJ = side.detJq[q];
                        if (dF) *dF = side.dFq[q];
                    } else {
                        F = cell_geom.F;
                        Finv = cell_geom.Finv;
                        detJ = cell_geom.detJ;
                        if (dF) (*dF)[0] = (*dF)[1] = Mat2::Zero();
                    }
                });
}

// ---------------------------------------------------------------------------
// boundary dofs
// ---------------------------------------------------------------------------

std::vector<Index> FESpace::boundary_dofs(const std::set<geo::Marker>& markers) const {
    const mesh::Mesh& m = *mesh_;
    std::set<Index> dofs;
    const Index n_scalar = n_scalar_dofs();
    for (Index e = 0; e < m.num_edges(); ++e) {
        const mesh::Edge& ed = m.edges[e];
        if (ed.cell1 >= 0 || !markers.count(ed.marker)) continue;
        if (family_ == Family::LagrangeContinuous) {
            const int n_edge = order_ - 1;
            for (int comp = 0; comp < vdim_; ++comp) {
                dofs.insert(comp * n_scalar + ed.v0);
                dofs.insert(comp * n_scalar + ed.v1);
                for (int n = 0; n < n_edge; ++n)
                    dofs.insert(comp * n_scalar + m.num_vertices() + e * n_edge + n);
            }
        } else if (family_ == Family::BDM) {
            for (int j = 0; j <= order_; ++j) dofs.insert(e * (order_ + 1) + j);
        }
    }
    return {dofs.begin(), dofs.end()};
}

std::vector<std::pair<Index, Real>> FESpace::boundary_dof_values(
    const std::set<geo::Marker>& markers, const std::function<Vec2(const Vec2&)>& g,
    GeometryCache& geom) const {
    const mesh::Mesh& m = *mesh_;
    std::map<Index, Real> values;
    const Index n_scalar = n_scalar_dofs();

    if (family_ == Family::LagrangeContinuous) {
        const int k = order_;
        const int n_edge = k - 1;
        std::vector<Real> l1v;
        for (Index e = 0; e < m.num_edges(); ++e) {
            const mesh::Edge& ed = m.edges[e];
            if (ed.cell1 >= 0 || !markers.count(ed.marker)) continue;
            const Vec2 p0 = m.vertices[ed.v0], p1 = m.vertices[ed.v1];
            const Vec2 g0 = g(p0), g1 = g(p1);
            for (int comp = 0; comp < vdim_; ++comp) {
                values[comp * n_scalar + ed.v0] = g0[comp];
                values[comp * n_scalar + ed.v1] = g1[comp];
            }
            const Index curved_id = m.edge_curved[e];
            for (int n = 0; n < n_edge; ++n) {
                const Real s = static_cast<Real>(n + 1) / k;
                Vec2 x;
                if (curved_id < 0 || m.geometry_order < 2) {
                    x = p0 + s * (p1 - p0);
                } else {
                    // evaluate the order-q edge map at the FE node parameter
                    const auto& nodes = m.curved_edges[curved_id].nodes;
                    const int q = m.geometry_order;
                    std::vector<Vec2> pts;
                    pts.push_back(p0);
                    pts.insert(pts.end(), nodes.begin(), nodes.end());
                    pts.push_back(p1);
                    x = Vec2::Zero();
                    for (int i = 0; i <= q; ++i) {
                        Real li = 1.0;
                        for (int jj = 0; jj <= q; ++jj) {
                            if (jj == i) continue;
                            li *= (s - static_cast<Real>(jj) / q) /
                                  (static_cast<Real>(i) / q - static_cast<Real>(jj) / q);
                        }
                        x += li * pts[i];
                    }
                }
                const Vec2 gv = g(x);
                for (int comp = 0; comp < vdim_; ++comp)
                    values[comp * n_scalar + m.num_vertices() + e * n_edge + n] = gv[comp];
            }
        }
        return {values.begin(), values.end()};
    }

    if (family_ == Family::BDM) {
        const int k = order_;
        const int deg = 2 * k + 6;
        const auto& edges = geom.edges(deg);
        const SegmentRule& rule = segment_rule(deg);
        std::vector<Real> lv;
        for (Index e = 0; e < m.num_edges(); ++e) {
            const mesh::Edge& ed = m.edges[e];
            if (ed.cell1 >= 0 || !markers.count(ed.marker)) continue;
            const EdgeGeom& eg = edges[e];
            std::vector<Real> mom(k + 1, 0.0);
            for (int q = 0; q < rule.size(); ++q) {
                legendre01(k, rule.points[q], lv);
                const Real gn = g(eg.x[q]).dot(eg.normal[q]);
                for (int j = 0; j <= k; ++j) mom[j] += eg.w_ds[q] * gn * lv[j];
            }
            for (int j = 0; j <= k; ++j) values[e * (k + 1) + j] = mom[j];
        }
        return {values.begin(), values.end()};
    }

    if (family_ == Family::LagrangeDiscontinuous || family_ == Family::McsStress) return {};
    throw FemError("boundary_dof_values: unsupported family");
}

} // namespace cylbench::fem
