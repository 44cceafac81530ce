#include "cylbench/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace cylbench::fem {

SegmentRule gauss_legendre(int n) {
    if (n < 1) throw FemError("gauss_legendre: need at least one point");
    SegmentRule rule;
    rule.points.resize(n);
    rule.weights.resize(n);
    rule.exactness_degree = 2 * n - 1;

    // Newton iteration on P_n over [-1,1]; roots come in symmetric pairs.
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pn = 0.0, pp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            pn = p1; // P_n(x), with P_{n-1}(x) in p0
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = pn / pp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        // map [-1,1] -> [0,1]
        rule.points[i] = 0.5 * (1.0 - x);
        rule.points[n - 1 - i] = 0.5 * (1.0 + x);
        rule.weights[i] = 0.5 * w;
        rule.weights[n - 1 - i] = 0.5 * w;
    }
    return rule;
}

const SegmentRule& segment_rule(int degree) {
    static std::map<int, SegmentRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    int n = degree / 2 + 1; // 2n-1 >= degree
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, gauss_legendre(n)).first;
    return it->second;
}

static TriangleRule build_triangle_rule(int degree) {
    // Duffy map x = s(1-t), y = t has Jacobian (1-t): the t-direction picks up
    // one extra polynomial degree.
    const int ns = degree / 2 + 1;
    const int nt = (degree + 1) / 2 + 1;
    SegmentRule gs = gauss_legendre(ns);
    SegmentRule gt = gauss_legendre(nt);

    TriangleRule rule;
    rule.exactness_degree = degree;
    rule.points.reserve(ns * nt);
    rule.weights.reserve(ns * nt);
    for (int i = 0; i < ns; ++i) {
        for (int j = 0; j < nt; ++j) {
            const Real s = gs.points[i], t = gt.points[j];
            rule.points.emplace_back(s * (1.0 - t), t);
            rule.weights.push_back(gs.weights[i] * gt.weights[j] * (1.0 - t));
        }
    }
    return rule;
}

const TriangleRule& triangle_rule(int degree) {
    static std::map<int, TriangleRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(degree);
    if (it == cache.end()) it = cache.emplace(degree, build_triangle_rule(degree)).first;
    return it->second;
}

} // namespace cylbench::fem
