#pragma once

#include "cylbench/polynomials.hpp"
#include "cylbench/types.hpp"

#include <vector>

namespace cylbench::fem {

/// Node layout and nodal basis for continuous P_k on the reference triangle.
///
/// Node ordering: the 3 vertices (0,0),(1,0),(0,1); then k-1 nodes per edge
/// (edge i connects vertex (i+1)%3 to (i+2)%3, nodes ordered along it); then
/// the interior lattice nodes. This ordering is shared by dof maps and by the
/// curved-cell geometry maps.
class ReferenceLagrange {
public:
    explicit ReferenceLagrange(int degree);

    int degree() const { return degree_; }
    int size() const { return static_cast<int>(nodes_.size()); }
    const std::vector<Vec2>& nodes() const { return nodes_; }

    int num_edge_nodes() const { return degree_ - 1; }
    int num_interior_nodes() const { return size() - 3 - 3 * (degree_ - 1); }

    /// Index of the n-th node of edge e (n = 0 .. degree-2), in edge order.
    int edge_node(int e, int n) const { return 3 + e * (degree_ - 1) + n; }
    int interior_node(int n) const { return 3 + 3 * (degree_ - 1) + n; }

    /// Nodal shape values (and derivatives) at a reference point.
    void eval(const Vec2& p, std::vector<Real>& values, std::vector<Vec2>* grads = nullptr,
              std::vector<Eigen::Vector3d>* hess = nullptr) const;

    /// Shared instance per degree.
    static const ReferenceLagrange& get(int degree);

private:
    int degree_;
    DubinerBasis modal_;
    std::vector<Vec2> nodes_;
    MatX coeff_; // nodal basis = coeff_ * dubiner values
};

} // namespace cylbench::fem
