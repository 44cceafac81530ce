#pragma once

#include "cylbench/types.hpp"

namespace cylbench::mesh {

/// Sign of the signed area of triangle (a,b,c): > 0 for counter-clockwise.
/// Filtered double evaluation with a quad-precision fallback near ties.
int orient2d(const Vec2& a, const Vec2& b, const Vec2& c);

/// Sign of the incircle determinant: > 0 when d lies strictly inside the
/// circumcircle of the counter-clockwise triangle (a,b,c).
int incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d);

} // namespace cylbench::mesh
