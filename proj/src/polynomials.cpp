#include "cylbench/polynomials.hpp"
#include "cylbench/quadrature.hpp"

#include <cmath>

namespace cylbench::fem {

void legendre01(int n, Real s, std::vector<Real>& values) {
    static thread_local std::vector<Real> scratch;
    legendre01(n, s, values, scratch);
}

void legendre01(int n, Real s, std::vector<Real>& values, std::vector<Real>& derivs) {
    values.resize(n + 1);
    derivs.resize(n + 1);
    const Real z = 2.0 * s - 1.0;
    Real p0 = 1.0, p1 = z, d0 = 0.0, d1 = 1.0;
    for (int j = 0; j <= n; ++j) {
        Real pj, dj;
        if (j == 0) {
            pj = p0; dj = d0;
        } else if (j == 1) {
            pj = p1; dj = d1;
        } else {
            pj = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p0) / j;
            dj = ((2.0 * j - 1.0) * (p1 + z * d1) - (j - 1.0) * d0) / j;
            p0 = p1; d0 = d1;
            p1 = pj; d1 = dj;
        }
        const Real norm = std::sqrt(2.0 * j + 1.0);
        values[j] = norm * pj;
        derivs[j] = norm * dj * 2.0; // d/ds = 2 d/dz
    }
}

namespace {

// Jacobi P_j^{(alpha,0)}(z) with first and second derivatives, j = 0..n.
void jacobi_alpha0(int n, Real alpha, Real z, std::vector<Real>& p, std::vector<Real>& dp,
                   std::vector<Real>* ddp) {
    p.resize(n + 1);
    dp.resize(n + 1);
    if (ddp) ddp->resize(n + 1);
    p[0] = 1.0;
    dp[0] = 0.0;
    if (ddp) (*ddp)[0] = 0.0;
    if (n == 0) return;
    p[1] = ((alpha + 2.0) * z + alpha) / 2.0;
    dp[1] = (alpha + 2.0) / 2.0;
    if (ddp) (*ddp)[1] = 0.0;
    for (int j = 2; j <= n; ++j) {
        const Real a = 2.0 * j * (j + alpha) * (2.0 * j + alpha - 2.0);
        const Real b1 = (2.0 * j + alpha - 1.0) * (2.0 * j + alpha) * (2.0 * j + alpha - 2.0);
        const Real b0 = (2.0 * j + alpha - 1.0) * alpha * alpha;
        const Real c = 2.0 * (j + alpha - 1.0) * (j - 1.0) * (2.0 * j + alpha);
        p[j] = ((b1 * z + b0) * p[j - 1] - c * p[j - 2]) / a;
        dp[j] = ((b1 * z + b0) * dp[j - 1] + b1 * p[j - 1] - c * dp[j - 2]) / a;
        if (ddp)
            (*ddp)[j] = ((b1 * z + b0) * (*ddp)[j - 1] + 2.0 * b1 * dp[j - 1] - c * (*ddp)[j - 2]) / a;
    }
}

struct DubinerWork {
    std::vector<Real> f, fx, fy, fxx, fxy, fyy;
    std::vector<Real> g, dg, ddg;
};

// Unnormalized Dubiner values/derivatives at p, in total-degree order.
void dubiner_raw(int degree, const Vec2& p, std::vector<Real>& values, std::vector<Vec2>* grads,
                 std::vector<Eigen::Vector3d>* hess, DubinerWork& w) {
    const Real x = p.x(), y = p.y();
    const int n = degree;
    const Real eta = 2.0 * x + y - 1.0; // = a (1-y) in polynomial form
    const Real omy = 1.0 - y;
    const Real s = omy * omy;
    const bool need2 = hess != nullptr;

    auto resize_all = [&](int m) {
        w.f.resize(m); w.fx.resize(m); w.fy.resize(m);
        w.fxx.resize(m); w.fxy.resize(m); w.fyy.resize(m);
    };
    resize_all(n + 1);
    w.f[0] = 1.0; w.fx[0] = w.fy[0] = w.fxx[0] = w.fxy[0] = w.fyy[0] = 0.0;
    if (n >= 1) {
        w.f[1] = eta; w.fx[1] = 2.0; w.fy[1] = 1.0;
        w.fxx[1] = w.fxy[1] = w.fyy[1] = 0.0;
    }
    for (int i = 1; i < n; ++i) {
        const Real c1 = (2.0 * i + 1.0) / (i + 1.0);
        const Real c2 = static_cast<Real>(i) / (i + 1.0);
        w.f[i + 1] = c1 * eta * w.f[i] - c2 * s * w.f[i - 1];
        w.fx[i + 1] = c1 * (2.0 * w.f[i] + eta * w.fx[i]) - c2 * s * w.fx[i - 1];
        w.fy[i + 1] = c1 * (w.f[i] + eta * w.fy[i]) -
                      c2 * (-2.0 * omy * w.f[i - 1] + s * w.fy[i - 1]);
        if (need2) {
            w.fxx[i + 1] = c1 * (4.0 * w.fx[i] + eta * w.fxx[i]) - c2 * s * w.fxx[i - 1];
            w.fxy[i + 1] = c1 * (2.0 * w.fy[i] + w.fx[i] + eta * w.fxy[i]) -
                           c2 * (-2.0 * omy * w.fx[i - 1] + s * w.fxy[i - 1]);
            w.fyy[i + 1] = c1 * (2.0 * w.fy[i] + eta * w.fyy[i]) -
                           c2 * (2.0 * w.f[i - 1] - 4.0 * omy * w.fy[i - 1] + s * w.fyy[i - 1]);
        }
    }

    const Real b = 2.0 * y - 1.0;
    const int nfun = (n + 1) * (n + 2) / 2;
    values.resize(nfun);
    if (grads) grads->resize(nfun);
    if (hess) hess->resize(nfun);

    int m = 0;
    for (int d = 0; d <= n; ++d) {
        for (int i = 0; i <= d; ++i) {
            const int j = d - i;
            jacobi_alpha0(j, 2.0 * i + 1.0, b, w.g, w.dg, need2 ? &w.ddg : nullptr);
            const Real gj = w.g[j], dgj = w.dg[j];
            values[m] = w.f[i] * gj;
            if (grads) {
                (*grads)[m].x() = w.fx[i] * gj;
                (*grads)[m].y() = w.fy[i] * gj + w.f[i] * dgj * 2.0;
            }
            if (hess) {
                const Real ddgj = w.ddg[j];
                (*hess)[m][0] = w.fxx[i] * gj;
                (*hess)[m][1] = w.fxy[i] * gj + w.fx[i] * dgj * 2.0;
                (*hess)[m][2] = w.fyy[i] * gj + 4.0 * w.fy[i] * dgj + 4.0 * w.f[i] * ddgj;
            }
            ++m;
        }
    }
}

} // namespace

DubinerBasis::DubinerBasis(int degree) : degree_(degree) {
    if (degree < 0) throw FemError("DubinerBasis: negative degree");
    const TriangleRule& rule = triangle_rule(2 * degree + 1);
    scale_.assign(size(), 0.0);
    std::vector<Real> vals;
    DubinerWork w;
    for (int q = 0; q < rule.size(); ++q) {
        dubiner_raw(degree_, rule.points[q], vals, nullptr, nullptr, w);
        for (int m = 0; m < size(); ++m) scale_[m] += rule.weights[q] * vals[m] * vals[m];
    }
    for (auto& v : scale_) v = 1.0 / std::sqrt(v);
}

void DubinerBasis::eval(const Vec2& p, std::vector<Real>& values, std::vector<Vec2>* grads,
                        std::vector<Eigen::Vector3d>* hess) const {
    thread_local DubinerWork w;
    dubiner_raw(degree_, p, values, grads, hess, w);
    for (int m = 0; m < size(); ++m) {
        values[m] *= scale_[m];
        if (grads) (*grads)[m] *= scale_[m];
        if (hess) (*hess)[m] *= scale_[m];
    }
}

} // namespace cylbench::fem
