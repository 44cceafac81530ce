#include "cylbench/geometry.hpp"

#include <cmath>
#include <limits>

namespace cylbench::geo {

std::string marker_name(Marker m) {
    switch (m) {
        case Marker::Inflow: return "inflow";
        case Marker::Outflow: return "outflow";
        case Marker::Walls: return "walls";
        case Marker::Cylinder: return "cylinder";
        default: return "none";
    }
}

bool Geometry::contains(const Vec2& p, Real tol) const {
    if (p.x() < x_min - tol || p.x() > x_max + tol) return false;
    if (p.y() < y_min - tol || p.y() > y_max + tol) return false;
    if (has_hole() && hole_distance(p) < -tol) return false;
    return true;
}

Real Geometry::hole_distance(const Vec2& p) const {
    if (!has_hole()) return std::numeric_limits<Real>::infinity();
    return (p - hole->cylinder_center).norm() - hole->cylinder_radius;
}

Geometry build_domain(const DomainSpec& spec) {
    if (!(spec.cylinder_radius > 0.0))
        throw GeometryError("build_domain: cylinder_radius must be positive");
    if (!(spec.x_min < spec.x_max) || !(spec.y_half > 0.0))
        throw GeometryError("build_domain: empty rectangle (need x_min < x_max, y_half > 0)");

    const Real r = spec.cylinder_radius;
    const Vec2 c = spec.cylinder_center;
    const bool inside = (c.x() - r > spec.x_min) && (c.x() + r < spec.x_max) &&
                        (c.y() - r > -spec.y_half) && (c.y() + r < spec.y_half);
    if (!inside)
        throw GeometryError("build_domain: cylinder is not strictly inside the rectangle");

    Geometry g;
    g.x_min = spec.x_min;
    g.x_max = spec.x_max;
    g.y_min = -spec.y_half;
    g.y_max = spec.y_half;
    g.hole = spec;
    return g;
}

Geometry build_rectangle(Real x_min, Real x_max, Real y_min, Real y_max) {
    if (!(x_min < x_max) || !(y_min < y_max)) throw GeometryError("build_rectangle: empty rectangle");
    Geometry g;
    g.x_min = x_min;
    g.x_max = x_max;
    g.y_min = y_min;
    g.y_max = y_max;
    return g;
}

SizeField::SizeField(const Geometry& geom, Real h_max, Real grading_ratio, Real transition_distance)
    : geom_(&geom), h_max_(h_max) {
    if (!(h_max > 0.0)) throw GeometryError("SizeField: h_max must be positive");
    if (!(grading_ratio >= 1.0)) throw GeometryError("SizeField: grading_ratio must be >= 1");
    h_min_ = h_max / grading_ratio;
    slope_ = (geom.has_hole() && grading_ratio > 1.0) ? (h_max_ - h_min_) / transition_distance : 0.0;
}

Real SizeField::operator()(const Vec2& p) const {
    if (!geom_->has_hole() || slope_ == 0.0) return h_max_;
    const Real d = std::max(Real(0), geom_->hole_distance(p));
    return std::min(h_max_, h_min_ + slope_ * d);
}

} // namespace cylbench::geo
