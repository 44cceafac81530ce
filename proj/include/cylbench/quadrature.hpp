#pragma once

#include "cylbench/types.hpp"

#include <vector>

namespace cylbench::fem {

/// Gauss-Legendre rule on the reference segment [0,1].
struct SegmentRule {
    std::vector<Real> points;
    std::vector<Real> weights;
    int exactness_degree = 0;

    int size() const { return static_cast<int>(points.size()); }
};

/// Quadrature rule on the reference triangle {x,y >= 0, x+y <= 1}.
///
/// Built by collapsing a tensor Gauss-Legendre rule through the Duffy map
/// x = s(1-t), y = t, which is exact for all polynomials up to
/// exactness_degree. Weights sum to the reference area 1/2.
struct TriangleRule {
    std::vector<Vec2> points;
    std::vector<Real> weights;
    int exactness_degree = 0;

    int size() const { return static_cast<int>(points.size()); }
};

/// n-point Gauss-Legendre nodes/weights on [0,1]; exact through degree 2n-1.
SegmentRule gauss_legendre(int n);

/// Smallest segment rule exact for polynomials of `degree`.
const SegmentRule& segment_rule(int degree);

/// Smallest collapsed rule exact for bivariate polynomials of `degree`.
const TriangleRule& triangle_rule(int degree);

} // namespace cylbench::fem
