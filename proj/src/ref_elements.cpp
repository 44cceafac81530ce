#include "cylbench/ref_elements.hpp"
#include "cylbench/polynomials.hpp"
#include "cylbench/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <mutex>

namespace cylbench::fem {

const Real kStressTensors[3][4] = {
    {1.0 / M_SQRT2, 0.0, 0.0, -1.0 / M_SQRT2},
    {0.0, 1.0, 0.0, 0.0},
    {0.0, 0.0, 1.0, 0.0},
};

namespace {

struct RefEdge {
    Vec2 a, b;     // local direction a -> b
    Vec2 n_out;    // outward unit normal
    Real len;
};

std::array<RefEdge, 3> reference_edges() {
    const Vec2 v[3] = {{0, 0}, {1, 0}, {0, 1}};
    std::array<RefEdge, 3> e;
    for (int i = 0; i < 3; ++i) {
        e[i].a = v[(i + 1) % 3];
        e[i].b = v[(i + 2) % 3];
        const Vec2 t = e[i].b - e[i].a;
        e[i].len = t.norm();
        e[i].n_out = Vec2(t.y(), -t.x()) / e[i].len;
    }
    return e;
}

MatX kernel_of(const MatX& m) {
    Eigen::FullPivLU<MatX> lu(m);
    lu.setThreshold(1e-9);
    if (lu.dimensionOfKernel() == 0) return MatX::Zero(m.cols(), 0);
    return lu.kernel();
}

MatX invert_checked(const MatX& v, const char* what) {
    Eigen::FullPivLU<MatX> lu(v);
    if (!lu.isInvertible())
        throw FemError(std::string(what) + ": dof functionals are not unisolvent");
    return lu.inverse();
}

MatX build_bdm(int k) {
    if (k < 1) throw FemError("BDM order must be >= 1");
    DubinerBasis dub(k);
    const int nd = dub.size();
    const int nraw = 2 * nd;
    const int nedge = 3 * (k + 1);
    const auto edges = reference_edges();

    MatX emat = MatX::Zero(nedge, nraw);
    const SegmentRule& rule = segment_rule(2 * k + 2);
    std::vector<Real> dv, lv;
    for (int e = 0; e < 3; ++e) {
        for (int q = 0; q < rule.size(); ++q) {
            const Real s = rule.points[q];
            const Vec2 x = edges[e].a + s * (edges[e].b - edges[e].a);
            dub.eval(x, dv);
            legendre01(k, s, lv);
            const Real w = rule.weights[q] * edges[e].len; // reference arc measure
            for (int j = 0; j <= k; ++j)
                for (int c = 0; c < 2; ++c)
                    for (int i = 0; i < nd; ++i)
                        emat(e * (k + 1) + j, c * nd + i) += w * lv[j] * edges[e].n_out[c] * dv[i];
        }
    }

    const MatX interior = kernel_of(emat); // nraw x (nraw - nedge)
    MatX vand(nraw, nraw);
    vand.topRows(nedge) = emat;
    vand.bottomRows(nraw - nedge) = interior.transpose();
    return invert_checked(vand, "BDM").eval();
}

MatX build_stress(int k) {
    if (k < 1) throw FemError("stress element order must be >= 1");
    DubinerBasis dub(k);
    const int nd = dub.size();
    const int nraw = 3 * nd;
    const auto edges = reference_edges();
    const SegmentRule& rule = segment_rule(2 * k + 2);

    // nt trace of raw function (tc, i) at edge e, point s
    const auto nt_trace = [&](int e, const std::vector<Real>& dv, int tc, int i) {
        const Vec2 n = edges[e].n_out;
        const Vec2 t = (edges[e].b - edges[e].a) / edges[e].len;
        const Real* T = kStressTensors[tc];
        const Real nTt = n.x() * (T[0] * t.x() + T[1] * t.y()) + n.y() * (T[2] * t.x() + T[3] * t.y());
        return nTt * dv[i];
    };

    // degree-reduction constraints: leading Legendre coefficient of the nt
    // trace vanishes on each edge
    MatX cons = MatX::Zero(3, nraw);
    // edge moments against Legendre 0..k-1
    MatX emat = MatX::Zero(3 * k, nraw);
    std::vector<Real> dv, lv;
    for (int e = 0; e < 3; ++e) {
        for (int q = 0; q < rule.size(); ++q) {
            const Real s = rule.points[q];
            const Vec2 x = edges[e].a + s * (edges[e].b - edges[e].a);
            dub.eval(x, dv);
            legendre01(k, s, lv);
            for (int tc = 0; tc < 3; ++tc) {
                for (int i = 0; i < nd; ++i) {
                    const Real tr = nt_trace(e, dv, tc, i);
                    cons(e, tc * nd + i) += rule.weights[q] * lv[k] * tr;
                    for (int j = 0; j < k; ++j)
                        emat(e * k + j, tc * nd + i) +=
                            rule.weights[q] * edges[e].len * lv[j] * tr;
                }
            }
        }
    }

    const MatX subspace = kernel_of(cons); // nraw x (nraw - 3)
    const int nsub = static_cast<int>(subspace.cols());
    const MatX esub = emat * subspace;     // (3k) x nsub
    const MatX interior = kernel_of(esub); // nsub x (nsub - 3k)
    MatX vand(nsub, nsub);
    vand.topRows(3 * k) = esub;
    vand.bottomRows(nsub - 3 * k) = interior.transpose();
    const MatX binv = invert_checked(vand, "McsStress");
    return (subspace * binv).eval(); // nraw x ndof
}

} // namespace

const MatX& bdm_coefficients(int order) {
    static std::map<int, MatX> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, build_bdm(order)).first;
    return it->second;
}

const MatX& mcs_stress_coefficients(int order) {
    static std::map<int, MatX> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, build_stress(order)).first;
    return it->second;
}

} // namespace cylbench::fem
