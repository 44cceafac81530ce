#pragma once

#include "cylbench/types.hpp"

#include <vector>

namespace cylbench::fem {

/// Shifted Legendre polynomials on [0,1], orthonormal:
/// L_j(s) = sqrt(2j+1) * P_j(2s-1). Returns values L_0..L_n at s.
void legendre01(int n, Real s, std::vector<Real>& values);

/// Values and first derivatives of the shifted Legendre family at s.
void legendre01(int n, Real s, std::vector<Real>& values, std::vector<Real>& derivs);

/// Orthonormal Dubiner basis of P_k on the reference triangle
/// {x,y >= 0, x+y <= 1}, in total-degree order ((i,j) with i+j = 0,1,...,k).
///
/// Evaluation goes through the polynomial form of the collapsed-coordinate
/// recurrences, so there is no singularity at the apex y = 1.
class DubinerBasis {
public:
    explicit DubinerBasis(int degree);

    int degree() const { return degree_; }
    int size() const { return (degree_ + 1) * (degree_ + 2) / 2; }

    /// values[m] = phi_m(p); if grads is non-null, (*grads)[m] = grad phi_m(p);
    /// if hess is non-null, (*hess)[m] = (d_xx, d_xy, d_yy) phi_m(p).
    void eval(const Vec2& p, std::vector<Real>& values, std::vector<Vec2>* grads = nullptr,
              std::vector<Eigen::Vector3d>* hess = nullptr) const;

private:
    int degree_;
    std::vector<Real> scale_; // orthonormalization factors
};

} // namespace cylbench::fem
