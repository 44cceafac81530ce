#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace cylbench {

using Real = double;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

using Index = std::int64_t;

/// Thrown for invalid geometry/mesh input (degenerate domains, bad files, ...).
class GeometryError : public std::runtime_error {
public:
    explicit GeometryError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Thrown for finite-element setup errors (unsupported family/order, mismatched spaces).
class FemError : public std::runtime_error {
public:
    explicit FemError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Thrown for linear-algebra failures (singular matrices, dimension mismatch).
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace cylbench
