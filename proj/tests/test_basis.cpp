#include <doctest.h>

#include "cylbench/lagrange.hpp"
#include "cylbench/polynomials.hpp"
#include "cylbench/quadrature.hpp"

#include <cmath>
#include <random>

using namespace cylbench;
using namespace cylbench::fem;

namespace {

Vec2 random_ref_point(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double x = u(rng), y = u(rng);
    if (x + y > 1.0) { x = 1.0 - x; y = 1.0 - y; }
    return {x, y};
}

} // namespace

TEST_CASE("dubiner basis is orthonormal") {
    for (int k : {1, 2, 3, 4, 5}) {
        DubinerBasis basis(k);
        const TriangleRule& rule = triangle_rule(2 * k);
        MatX gram = MatX::Zero(basis.size(), basis.size());
        std::vector<double> vals;
        for (int q = 0; q < rule.size(); ++q) {
            basis.eval(rule.points[q], vals);
            for (int i = 0; i < basis.size(); ++i)
                for (int j = 0; j < basis.size(); ++j)
                    gram(i, j) += rule.weights[q] * vals[i] * vals[j];
        }
        CHECK((gram - MatX::Identity(basis.size(), basis.size())).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("dubiner gradients match finite differences") {
    DubinerBasis basis(4);
    std::mt19937 rng(7);
    std::vector<double> v0, vp, vm;
    std::vector<Vec2> g;
    const double h = 1e-6;
    for (int trial = 0; trial < 20; ++trial) {
        Vec2 p = 0.9 * random_ref_point(rng) + Vec2(0.03, 0.03);
        basis.eval(p, v0, &g);
        for (int dim = 0; dim < 2; ++dim) {
            Vec2 dp = Vec2::Zero();
            dp[dim] = h;
            basis.eval(p + dp, vp);
            basis.eval(p - dp, vm);
            for (int m = 0; m < basis.size(); ++m) {
                const double fd = (vp[m] - vm[m]) / (2.0 * h);
                CHECK(std::abs(fd - g[m][dim]) <= 1e-6 * (1.0 + std::abs(fd)));
            }
        }
    }
}

TEST_CASE("lagrange order 1 is the vertex indicator basis") {
    const ReferenceLagrange& p1 = ReferenceLagrange::get(1);
    std::vector<double> vals;
    for (int i = 0; i < 3; ++i) {
        p1.eval(p1.nodes()[i], vals);
        for (int j = 0; j < 3; ++j) CHECK(vals[j] == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
    }
}

TEST_CASE("lagrange partition of unity at random points") {
    std::mt19937 rng(123);
    for (int k : {1, 2, 3, 4, 5, 6}) {
        const ReferenceLagrange& ref = ReferenceLagrange::get(k);
        std::vector<double> vals;
        std::vector<Vec2> grads;
        for (int trial = 0; trial < 100; ++trial) {
            const Vec2 p = random_ref_point(rng);
            ref.eval(p, vals, &grads);
            double sum = 0.0;
            Vec2 gsum = Vec2::Zero();
            for (int m = 0; m < ref.size(); ++m) {
                sum += vals[m];
                gsum += grads[m];
            }
            CHECK(std::abs(sum - 1.0) <= 1e-12);
            CHECK(gsum.norm() <= 1e-10);
        }
    }
}

TEST_CASE("lagrange nodal property") {
    for (int k : {2, 4}) {
        const ReferenceLagrange& ref = ReferenceLagrange::get(k);
        std::vector<double> vals;
        for (int n = 0; n < ref.size(); ++n) {
            ref.eval(ref.nodes()[n], vals);
            for (int m = 0; m < ref.size(); ++m)
                CHECK(std::abs(vals[m] - (m == n ? 1.0 : 0.0)) <= 1e-11);
        }
    }
}

TEST_CASE("legendre01 family is orthonormal on [0,1]") {
    const SegmentRule& rule = segment_rule(14);
    MatX gram = MatX::Zero(7, 7);
    std::vector<double> v;
    for (int q = 0; q < rule.size(); ++q) {
        legendre01(6, rule.points[q], v);
        for (int i = 0; i <= 6; ++i)
            for (int j = 0; j <= 6; ++j) gram(i, j) += rule.weights[q] * v[i] * v[j];
    }
    CHECK((gram - MatX::Identity(7, 7)).cwiseAbs().maxCoeff() <= 1e-13);
}
