#include "cylbench/lagrange.hpp"

#include <Eigen/Dense>
#include <map>
#include <mutex>

namespace cylbench::fem {

ReferenceLagrange::ReferenceLagrange(int degree) : degree_(degree), modal_(degree) {
    if (degree < 1) throw FemError("ReferenceLagrange: degree must be >= 1");
    const Real k = degree;
    const Vec2 v[3] = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
    nodes_.push_back(v[0]);
    nodes_.push_back(v[1]);
    nodes_.push_back(v[2]);
    for (int e = 0; e < 3; ++e) {
        const Vec2 a = v[(e + 1) % 3], b = v[(e + 2) % 3];
        for (int n = 1; n < degree; ++n) nodes_.push_back(a + (b - a) * (n / k));
    }
    for (int i = 1; i < degree; ++i)
        for (int j = 1; j < degree - i; ++j) nodes_.emplace_back(i / k, j / k);

    const int nb = modal_.size();
    if (static_cast<int>(nodes_.size()) != nb)
        throw FemError("ReferenceLagrange: node count mismatch");

    MatX vand(nb, nb);
    std::vector<Real> vals;
    for (int l = 0; l < nb; ++l) {
        modal_.eval(nodes_[l], vals);
        for (int m = 0; m < nb; ++m) vand(l, m) = vals[m];
    }
    coeff_ = vand.transpose().fullPivLu().inverse();
}

void ReferenceLagrange::eval(const Vec2& p, std::vector<Real>& values, std::vector<Vec2>* grads,
                             std::vector<Eigen::Vector3d>* hess) const {
    thread_local std::vector<Real> mv;
    thread_local std::vector<Vec2> mg;
    thread_local std::vector<Eigen::Vector3d> mh;
    modal_.eval(p, mv, grads ? &mg : nullptr, hess ? &mh : nullptr);
    const int nb = size();
    values.resize(nb);
    if (grads) grads->resize(nb);
    if (hess) hess->resize(nb);
    for (int n = 0; n < nb; ++n) {
        Real s = 0.0;
        Vec2 g = Vec2::Zero();
        Eigen::Vector3d h = Eigen::Vector3d::Zero();
        for (int m = 0; m < nb; ++m) {
            s += coeff_(n, m) * mv[m];
            if (grads) g += coeff_(n, m) * mg[m];
            if (hess) h += coeff_(n, m) * mh[m];
        }
        values[n] = s;
        if (grads) (*grads)[n] = g;
        if (hess) (*hess)[n] = h;
    }
}

const ReferenceLagrange& ReferenceLagrange::get(int degree) {
    static std::map<int, ReferenceLagrange> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(degree);
    if (it == cache.end()) it = cache.emplace(degree, ReferenceLagrange(degree)).first;
    return it->second;
}

} // namespace cylbench::fem
