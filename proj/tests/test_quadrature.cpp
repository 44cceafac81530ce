#include <doctest.h>

#include "cylbench/quadrature.hpp"

#include <cmath>

using namespace cylbench;
using namespace cylbench::fem;

namespace {

// Exact monomial integral over the reference triangle: a! b! / (a+b+2)!
double tri_monomial(int a, int b) {
    double v = 1.0;
    for (int i = 1; i <= a; ++i) v *= i;
    for (int i = 1; i <= b; ++i) v *= i;
    for (int i = 1; i <= a + b + 2; ++i) v /= i;
    return v;
}

} // namespace

TEST_CASE("segment rules integrate monomials exactly") {
    for (int deg = 0; deg <= 25; ++deg) {
        const SegmentRule& rule = segment_rule(deg);
        REQUIRE(rule.exactness_degree >= deg);
        for (int p = 0; p <= deg; ++p) {
            double sum = 0.0;
            for (int q = 0; q < rule.size(); ++q) sum += rule.weights[q] * std::pow(rule.points[q], p);
            const double exact = 1.0 / (p + 1);
            CHECK(std::abs(sum - exact) <= 1e-13 * std::abs(exact));
        }
    }
}

TEST_CASE("triangle rules integrate monomials exactly") {
    for (int deg = 0; deg <= 22; ++deg) {
        const TriangleRule& rule = triangle_rule(deg);
        double area = 0.0;
        for (int q = 0; q < rule.size(); ++q) area += rule.weights[q];
        CHECK(std::abs(area - 0.5) <= 1e-14);
        for (int a = 0; a + 0 <= deg; ++a) {
            for (int b = 0; a + b <= deg; ++b) {
                double sum = 0.0;
                for (int q = 0; q < rule.size(); ++q)
                    sum += rule.weights[q] * std::pow(rule.points[q].x(), a) * std::pow(rule.points[q].y(), b);
                const double exact = tri_monomial(a, b);
                CHECK(std::abs(sum - exact) <= 1e-13 * std::abs(exact));
            }
        }
    }
}

TEST_CASE("gauss points lie inside the open interval") {
    for (int n = 1; n <= 12; ++n) {
        SegmentRule r = gauss_legendre(n);
        for (double p : r.points) {
            CHECK(p > 0.0);
            CHECK(p < 1.0);
        }
    }
}
