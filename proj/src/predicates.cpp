#include "cylbench/predicates.hpp"

#include <cmath>

namespace cylbench::mesh {

namespace {

using quad = __float128;

int sign_of(quad v) {
    if (v > 0) return 1;
    if (v < 0) return -1;
    return 0;
}

} // namespace

int orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
    const double detl = (b.x() - a.x()) * (c.y() - a.y());
    const double detr = (b.y() - a.y()) * (c.x() - a.x());
    const double det = detl - detr;
    const double detsum = std::abs(detl) + std::abs(detr);
    // 3.33e-16 ~ Shewchuk's ccwerrboundA for double
    if (std::abs(det) > 3.3306690738754716e-16 * detsum) return det > 0 ? 1 : -1;

    const quad ax = a.x(), ay = a.y(), bx = b.x(), by = b.y(), cx = c.x(), cy = c.y();
    return sign_of((bx - ax) * (cy - ay) - (by - ay) * (cx - ax));
}

int incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const double adx = a.x() - d.x(), ady = a.y() - d.y();
    const double bdx = b.x() - d.x(), bdy = b.y() - d.y();
    const double cdx = c.x() - d.x(), cdy = c.y() - d.y();

    const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
    const double alift = adx * adx + ady * ady;
    const double cdxady = cdx * ady, adxcdy = adx * cdy;
    const double blift = bdx * bdx + bdy * bdy;
    const double adxbdy = adx * bdy, bdxady = bdx * ady;
    const double clift = cdx * cdx + cdy * cdy;

    const double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) +
                       clift * (adxbdy - bdxady);
    const double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * alift +
                             (std::abs(cdxady) + std::abs(adxcdy)) * blift +
                             (std::abs(adxbdy) + std::abs(bdxady)) * clift;
    // iccerrboundA for double
    if (std::abs(det) > 1.1102230246251577e-15 * permanent) return det > 0 ? 1 : -1;

    const quad ax = a.x(), ay = a.y(), bx = b.x(), by = b.y();
    const quad cx = c.x(), cy = c.y(), dx = d.x(), dy = d.y();
    const quad qadx = ax - dx, qady = ay - dy;
    const quad qbdx = bx - dx, qbdy = by - dy;
    const quad qcdx = cx - dx, qcdy = cy - dy;
    const quad qdet = (qadx * qadx + qady * qady) * (qbdx * qcdy - qcdx * qbdy) +
                      (qbdx * qbdx + qbdy * qbdy) * (qcdx * qady - qadx * qcdy) +
                      (qcdx * qcdx + qcdy * qcdy) * (qadx * qbdy - qbdx * qady);
    return sign_of(qdet);
}

} // namespace cylbench::mesh
