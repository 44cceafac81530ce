#pragma once

#include "cylbench/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cylbench::geo {

/// Boundary tags of the benchmark channel.
enum class Marker : int {
    None = 0,
    Inflow = 1,   // x = x_min
    Outflow = 2,  // x = x_max
    Walls = 3,    // |y| = y_half
    Cylinder = 4, // the circular obstacle
};

std::string marker_name(Marker m);

/// Channel-with-cylinder domain. Defaults give the benchmark geometry
/// {-30 < x < 300, |y| < 30, x^2 + y^2 > 1}.
struct DomainSpec {
    Real x_min = -30.0;
    Real x_max = 300.0;
    Real y_half = 30.0;
    Real cylinder_radius = 1.0;
    Vec2 cylinder_center = Vec2::Zero();
};

/// Boundary-curve description: the rectangle sides plus (optionally) the
/// circular hole, each carrying its marker.
struct Geometry {
    Real x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
    std::optional<DomainSpec> hole; // engaged when the domain has the cylinder

    bool has_hole() const { return hole.has_value(); }
    Real width() const { return x_max - x_min; }
    Real height() const { return y_max - y_min; }

    bool contains(const Vec2& p, Real tol = 0.0) const;

    /// Signed distance to the cylinder circle (negative inside the hole);
    /// +inf when there is no hole.
    Real hole_distance(const Vec2& p) const;
};

/// Validates the spec and produces the 4-segment + circle boundary description.
Geometry build_domain(const DomainSpec& spec);

/// Plain rectangle (used by manufactured-solution and patch tests).
Geometry build_rectangle(Real x_min, Real x_max, Real y_min, Real y_max);

/// Target cell size field: h(p) = min(h_max, h_min + slope * dist(p, circle)),
/// where h_min = h_max / grading_ratio and the slope is chosen so that the
/// size recovers h_max at distance `transition_distance` from the cylinder.
/// Without a hole (or with grading_ratio = 1) the field is constant h_max.
class SizeField {
public:
    SizeField(const Geometry& geom, Real h_max, Real grading_ratio,
              Real transition_distance = 30.0);

    Real operator()(const Vec2& p) const;
    Real h_max() const { return h_max_; }
    Real h_min() const { return h_min_; }

private:
    const Geometry* geom_;
    Real h_max_;
    Real h_min_;
    Real slope_;
};

} // namespace cylbench::geo
