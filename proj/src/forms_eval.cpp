#include "cylbench/forms.hpp"
#include "cylbench/quadrature.hpp"

#include <cmath>

namespace cylbench::forms {

using fem::CellGeom;
using fem::EdgeGeom;
using fem::PhysicalCellBasis;
using fem::PhysicalEdgeBasis;

namespace {

int curved_inflation(const FESpace& sp) {
    const auto& m = sp.mesh();
    return (m.geometry_order > 1 && !m.curved_edges.empty()) ? 2 * (m.geometry_order - 1) : 0;
}

// local coefficients with dof weights applied
VecX gather(const Field& f, Index cell) {
    const FESpace& sp = *f.space;
    VecX c(sp.local_size());
    const Index* dofs = sp.cell_dofs(cell);
    const Real* w = sp.cell_weights(cell);
    for (int l = 0; l < sp.local_size(); ++l) c[l] = (*f.coeffs)[dofs[l]] * w[l];
    return c;
}

// field values/gradients at the cell rule points
struct CellValues {
    MatX val;     // nq x ncomp
    MatX grad[2]; // grad[d](q, comp)
    VecX div;     // vector fields

    void load(const Field& f, const PhysicalCellBasis& basis, Index cell) {
        const VecX c = gather(f, cell);
        const int nc = basis.ncomp;
        val.resize(basis.nq, nc);
        grad[0].resize(basis.nq, nc);
        grad[1].resize(basis.nq, nc);
        for (int comp = 0; comp < nc; ++comp) {
            val.col(comp) = basis.val[comp] * c;
            grad[0].col(comp) = basis.grad[comp][0] * c;
            grad[1].col(comp) = basis.grad[comp][1] * c;
        }
        if (nc == 2 && basis.div.size() > 0) div = basis.div * c;
    }
};

struct EdgeValues {
    MatX val; // nq x ncomp

    void load(const Field& f, const PhysicalEdgeBasis& basis, Index cell) {
        const VecX c = gather(f, cell);
        val.resize(basis.nq, basis.ncomp);
        for (int comp = 0; comp < basis.ncomp; ++comp) val.col(comp) = basis.val[comp] * c;
    }
};

template <typename F>
FormValue integrate_cells(const FESpace& probe, GeometryCache& geom, int degree, const F& f) {
    const auto& cells = geom.cells(degree);
    const fem::TriangleRule& rule = fem::triangle_rule(degree);
    FormValue out;
    for (Index c = 0; c < probe.mesh().num_cells(); ++c) {
        for (int q = 0; q < rule.size(); ++q) {
            const Real w = rule.weights[q] * cells[c].det(q);
            const Real v = f(c, q);
            out.value += w * v;
            out.scale += std::abs(w * v);
        }
    }
    return out;
}

} // namespace

FormValue form_a(const Field& v, const Field& w, Real nu, GeometryCache& geom) {
    if (&v.space->mesh() != &w.space->mesh()) throw FemError("form_a: fields on different meshes");
    const int deg = v.space->order() + w.space->order() + curved_inflation(*v.space);
    const auto& cells = geom.cells(deg);
    const auto& tv = v.space->cell_tables(deg);
    const auto& tw = w.space->cell_tables(deg);
    PhysicalCellBasis bv, bw;
    CellValues fv, fw;
    FormValue out;
    const fem::TriangleRule& rule = fem::triangle_rule(deg);
    for (Index c = 0; c < v.space->mesh().num_cells(); ++c) {
        bv.load(*v.space, tv, cells[c]);
        bw.load(*w.space, tw, cells[c]);
        fv.load(v, bv, c);
        fw.load(w, bw, c);
        for (int q = 0; q < rule.size(); ++q) {
            const Real wq = rule.weights[q] * cells[c].det(q);
            Real dd = 0.0;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    const Real dv = fv.grad[j](q, i) + fv.grad[i](q, j);
                    const Real dw = fw.grad[j](q, i) + fw.grad[i](q, j);
                    dd += dv * dw;
                }
            const Real term = 0.5 * nu * dd;
            out.value += wq * term;
            out.scale += std::abs(wq * term);
        }
    }
    return out;
}

FormValue form_b(const Field& v, const Field& q, GeometryCache& geom) {
    const int deg = v.space->order() + q.space->order() + curved_inflation(*v.space);
    const auto& cells = geom.cells(deg);
    const auto& tv = v.space->cell_tables(deg);
    const auto& tq = q.space->cell_tables(deg);
    PhysicalCellBasis bv, bq;
    CellValues fv, fq;
    FormValue out;
    const fem::TriangleRule& rule = fem::triangle_rule(deg);
    for (Index c = 0; c < v.space->mesh().num_cells(); ++c) {
        bv.load(*v.space, tv, cells[c]);
        bq.load(*q.space, tq, cells[c]);
        fv.load(v, bv, c);
        fq.load(q, bq, c);
        for (int qq = 0; qq < rule.size(); ++qq) {
            const Real wq = rule.weights[qq] * cells[c].det(qq);
            const Real term = -fq.val(qq, 0) * fv.div[qq];
            out.value += wq * term;
            out.scale += std::abs(wq * term);
        }
    }
    return out;
}

namespace {

FormValue conv_volume(const Field& u, const Field& v, const Field& w, GeometryCache& geom,
                      Real div_weight, bool grad_on_w) {
    const int deg =
        u.space->order() + v.space->order() + w.space->order() + curved_inflation(*u.space);
    const auto& cells = geom.cells(deg);
    const auto& tu = u.space->cell_tables(deg);
    const auto& tv = v.space->cell_tables(deg);
    const auto& tw = w.space->cell_tables(deg);
    PhysicalCellBasis bu, bv, bw;
    CellValues fu, fv, fw;
    FormValue out;
    const fem::TriangleRule& rule = fem::triangle_rule(deg);
    for (Index c = 0; c < u.space->mesh().num_cells(); ++c) {
        bu.load(*u.space, tu, cells[c]);
        bv.load(*v.space, tv, cells[c]);
        bw.load(*w.space, tw, cells[c]);
        fu.load(u, bu, c);
        fv.load(v, bv, c);
        fw.load(w, bw, c);
        for (int q = 0; q < rule.size(); ++q) {
            const Real wq = rule.weights[q] * cells[c].det(q);
            Real term = 0.0;
            if (!grad_on_w) {
                // (u . grad v) . w
                for (int i = 0; i < 2; ++i)
                    term += (fu.val(q, 0) * fv.grad[0](q, i) + fu.val(q, 1) * fv.grad[1](q, i)) *
                            fw.val(q, i);
            } else {
                // -(u . grad w) . v
                for (int i = 0; i < 2; ++i)
                    term -= (fu.val(q, 0) * fw.grad[0](q, i) + fu.val(q, 1) * fw.grad[1](q, i)) *
                            fv.val(q, i);
            }
            if (div_weight != 0.0)
                term += div_weight * fu.div[q] * (fv.val(q, 0) * fw.val(q, 0) + fv.val(q, 1) * fw.val(q, 1));
            out.value += wq * term;
            out.scale += std::abs(wq * term);
        }
    }
    return out;
}

// facet part of the DG convective forms
FormValue conv_facets(const Field& u, const Field& v, const Field& w, GeometryCache& geom,
                      bool upwind) {
    const int deg =
        u.space->order() + v.space->order() + w.space->order() + curved_inflation(*u.space);
    const auto& edges = geom.edges(deg);
    const auto& cells = geom.cells(deg);
    FormValue out;
    PhysicalEdgeBasis bu[2], bv[2], bw[2];
    EdgeValues fu[2], fv[2], fw[2];
    const mesh::Mesh& m = u.space->mesh();
    for (Index e = 0; e < m.num_edges(); ++e) {
        const EdgeGeom& eg = edges[e];
        const int nsides = eg.boundary() ? 1 : 2;
        for (int s = 0; s < nsides; ++s) {
            const auto& side = eg.sides[s];
            bu[s].load(*u.space, u.space->trace_tables(deg, side.local_edge, side.flip),
                       cells[side.cell], side);
            bv[s].load(*v.space, v.space->trace_tables(deg, side.local_edge, side.flip),
                       cells[side.cell], side);
            bw[s].load(*w.space, w.space->trace_tables(deg, side.local_edge, side.flip),
                       cells[side.cell], side);
            fu[s].load(u, bu[s], side.cell);
            fv[s].load(v, bv[s], side.cell);
            fw[s].load(w, bw[s], side.cell);
        }
        for (int q = 0; q < static_cast<int>(eg.x.size()); ++q) {
            for (int s = 0; s < nsides; ++s) {
                // outward normal of side s
                const Real sign = (s == 0 ? 1.0 : -1.0) * eg.side0_sign;
                const Vec2 n = sign * eg.normal[q];
                const Vec2 us(fu[s].val(q, 0), fu[s].val(q, 1));
                const Real un = us.dot(n);
                const Vec2 vs(fv[s].val(q, 0), fv[s].val(q, 1));
                const Vec2 ws(fw[s].val(q, 0), fw[s].val(q, 1));
                Vec2 vo = vs; // exterior trace (interior fallback на boundary)
                if (nsides == 2) {
                    const int o = 1 - s;
                    vo = Vec2(fv[o].val(q, 0), fv[o].val(q, 1));
                }
                Real term;
                if (upwind) {
                    const Vec2 vhat = (un >= 0.0) ? vs : vo;
                    term = un * vhat.dot(ws);
                } else {
                    const Vec2 vmean = 0.5 * (vs + vo);
                    term = un * (vmean - vs).dot(ws);
                }
                out.value += eg.w_ds[q] * term;
                out.scale += std::abs(eg.w_ds[q] * term);
            }
        }
    }
    return out;
}

} // namespace

FormValue form_c_conv(const Field& u, const Field& v, const Field& w, GeometryCache& geom) {
    return conv_volume(u, v, w, geom, 0.0, false);
}

FormValue form_c_div(const Field& u, const Field& v, const Field& w, GeometryCache& geom) {
    return conv_volume(u, v, w, geom, 0.5, false);
}

FormValue form_c_upw(const Field& u, const Field& v, const Field& w, GeometryCache& geom) {
    const FormValue vol = conv_volume(u, v, w, geom, 0.0, true);
    const FormValue fac = conv_facets(u, v, w, geom, true);
    return {vol.value + fac.value, vol.scale + fac.scale};
}

FormValue form_c_cf(const Field& u, const Field& v, const Field& w, GeometryCache& geom) {
    const FormValue vol = conv_volume(u, v, w, geom, 0.0, false);
    const FormValue fac = conv_facets(u, v, w, geom, false);
    return {vol.value + fac.value, vol.scale + fac.scale};
}

FormValue form_j_gd(const Field& v, const Field& w, Real gamma_gd, GeometryCache& geom) {
    const int deg = v.space->order() + w.space->order() + curved_inflation(*v.space);
    const auto& cells = geom.cells(deg);
    const auto& tv = v.space->cell_tables(deg);
    const auto& tw = w.space->cell_tables(deg);
    PhysicalCellBasis bv, bw;
    CellValues fv, fw;
    FormValue out;
    const fem::TriangleRule& rule = fem::triangle_rule(deg);
    for (Index c = 0; c < v.space->mesh().num_cells(); ++c) {
        bv.load(*v.space, tv, cells[c]);
        bw.load(*w.space, tw, cells[c]);
        fv.load(v, bv, c);
        fw.load(w, bw, c);
        for (int q = 0; q < rule.size(); ++q) {
            const Real wq = rule.weights[q] * cells[c].det(q);
            const Real term = gamma_gd * fv.div[q] * fw.div[q];
            out.value += wq * term;
            out.scale += std::abs(wq * term);
        }
    }
    return out;
}

FormValue form_a_prime(const Field& sigma, const Field& tau, Real nu, GeometryCache& geom) {
    const int deg = sigma.space->order() + tau.space->order();
    const auto& tsig = sigma.space->cell_tables(deg);
    const auto& ttau = tau.space->cell_tables(deg);
    const auto& cells = geom.cells(deg);
    PhysicalCellBasis bs, bt;
    CellValues fs, ft;
    FormValue out;
    const fem::TriangleRule& rule = fem::triangle_rule(deg);
    for (Index c = 0; c < sigma.space->mesh().num_cells(); ++c) {
        bs.load(*sigma.space, tsig, cells[c]);
        bt.load(*tau.space, ttau, cells[c]);
        fs.load(sigma, bs, c);
        ft.load(tau, bt, c);
        for (int q = 0; q < rule.size(); ++q) {
            const Real wq = rule.weights[q] * cells[c].det(q);
            Real term = 0.0;
            for (int comp = 0; comp < 4; ++comp) term += fs.val(q, comp) * ft.val(q, comp);
            term /= nu;
            out.value += wq * term;
            out.scale += std::abs(wq * term);
        }
    }
    return out;
}

FormValue form_b_prime(const Field& tau, const Field& u, GeometryCache& geom,
                       bool flip_orientation) {
    const int deg = tau.space->order() + u.space->order() + 1;
    const auto& cells = geom.cells(deg);
    const auto& ttau = tau.space->cell_tables(deg);
    const auto& tu = u.space->cell_tables(deg);
    PhysicalCellBasis bt, bu;
    CellValues ft, fu;
    FormValue out;
    const fem::TriangleRule& rule = fem::triangle_rule(deg);
    const mesh::Mesh& m = tau.space->mesh();
    for (Index c = 0; c < m.num_cells(); ++c) {
        bt.load(*tau.space, ttau, cells[c]);
        bu.load(*u.space, tu, cells[c]);
        ft.load(tau, bt, c);
        fu.load(u, bu, c);
        for (int q = 0; q < rule.size(); ++q) {
            const Real wq = rule.weights[q] * cells[c].det(q);
            // row-wise divergence of tau against u
            const Real div0 = ft.grad[0](q, 0) + ft.grad[1](q, 1); // d(xx)/dx + d(xy)/dy
            const Real div1 = ft.grad[0](q, 2) + ft.grad[1](q, 3);
            const Real term = div0 * fu.val(q, 0) + div1 * fu.val(q, 1);
            out.value += wq * term;
            out.scale += std::abs(wq * term);
        }
    }
    // facet jumps of tau_nn against u.n
    const int edeg = deg;
    const auto& edges = geom.edges(edeg);
    PhysicalEdgeBasis ebt[2], ebu;
    EdgeValues eft[2], efu;
    for (Index e = 0; e < m.num_edges(); ++e) {
        const EdgeGeom& eg = edges[e];
        const int nsides = eg.boundary() ? 1 : 2;
        for (int s = 0; s < nsides; ++s) {
            const auto& side = eg.sides[s];
            ebt[s].load(*tau.space, tau.space->trace_tables(edeg, side.local_edge, side.flip),
                        cells[side.cell], side);
            eft[s].load(tau, ebt[s], side.cell);
        }
        const auto& side0 = eg.sides[0];
        ebu.load(*u.space, u.space->trace_tables(edeg, side0.local_edge, side0.flip),
                 cells[side0.cell], side0);
        efu.load(u, ebu, side0.cell);
        for (int q = 0; q < static_cast<int>(eg.x.size()); ++q) {
            const Vec2 n = flip_orientation ? Vec2(-eg.normal[q]) : eg.normal[q];
            const auto nn_of = [&](const EdgeValues& f) {
                Mat2 sig;
                sig << f.val(q, 0), f.val(q, 1), f.val(q, 2), f.val(q, 3);
                return n.dot(sig * n);
            };
            Real jump = nn_of(eft[0]);
            if (nsides == 2) jump -= nn_of(eft[1]);
            const Vec2 uv(efu.val(q, 0), efu.val(q, 1));
            const Real term = jump * uv.dot(n);
            out.value += eg.w_ds[q] * term;
            out.scale += std::abs(eg.w_ds[q] * term);
        }
    }
    return out;
}

Real kinetic_energy(const Field& u, GeometryCache& geom) {
    const int deg = 2 * u.space->order() + curved_inflation(*u.space);
    const auto& cells = geom.cells(deg);
    const auto& tu = u.space->cell_tables(deg);
    PhysicalCellBasis bu;
    CellValues fu;
    Real out = 0.0;
    const fem::TriangleRule& rule = fem::triangle_rule(deg);
    for (Index c = 0; c < u.space->mesh().num_cells(); ++c) {
        bu.load(*u.space, tu, cells[c]);
        fu.load(u, bu, c);
        for (int q = 0; q < rule.size(); ++q)
            out += 0.5 * rule.weights[q] * cells[c].det(q) *
                   (fu.val(q, 0) * fu.val(q, 0) + fu.val(q, 1) * fu.val(q, 1));
    }
    return out;
}

Real divergence_l2(const Field& u, GeometryCache& geom) {
    const int deg = 2 * u.space->order() + curved_inflation(*u.space);
    const auto& cells = geom.cells(deg);
    const auto& tu = u.space->cell_tables(deg);
    PhysicalCellBasis bu;
    CellValues fu;
    Real out = 0.0;
    const fem::TriangleRule& rule = fem::triangle_rule(deg);
    for (Index c = 0; c < u.space->mesh().num_cells(); ++c) {
        bu.load(*u.space, tu, cells[c]);
        fu.load(u, bu, c);
        for (int q = 0; q < rule.size(); ++q)
            out += rule.weights[q] * cells[c].det(q) * fu.div[q] * fu.div[q];
    }
    return std::sqrt(out);
}

Real l2_error(const Field& u, const VecFn& exact, GeometryCache& geom, int extra_degree) {
    const int deg = 2 * u.space->order() + extra_degree + curved_inflation(*u.space);
    const auto& cells = geom.cells(deg);
    const auto& tu = u.space->cell_tables(deg);
    PhysicalCellBasis bu;
    CellValues fu;
    Real out = 0.0;
    const fem::TriangleRule& rule = fem::triangle_rule(deg);
    const mesh::Mesh& m = u.space->mesh();
    for (Index c = 0; c < m.num_cells(); ++c) {
        bu.load(*u.space, tu, cells[c]);
        fu.load(u, bu, c);
        for (int q = 0; q < rule.size(); ++q) {
            Vec2 x;
            if (cells[c].curved) {
                x = cells[c].x[q];
            } else {
                x = cells[c].base + cells[c].F * fem::triangle_rule(deg).points[q];
            }
            const Vec2 ex = exact(x);
            const Vec2 uh(fu.val(q, 0), u.space->value_dim() > 1 ? fu.val(q, 1) : 0.0);
            out += rule.weights[q] * cells[c].det(q) * (uh - ex).squaredNorm();
        }
    }
    return std::sqrt(out);
}

Real l2_norm(const Field& u, GeometryCache& geom) {
    return std::sqrt(std::max(0.0, 2.0 * kinetic_energy(u, geom)));
}

} // namespace cylbench::forms
