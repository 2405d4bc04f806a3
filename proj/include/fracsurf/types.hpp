#pragma once

#include <cstdint>
#include <functional>

#include <Eigen/Core>

namespace fracsurf {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Coordinates on the reference element. Segments only use the first entry.
using RefPoint = Eigen::Vector2d;

// Tangent map of a cell parametrization: 3 x r, r = 1 (curves) or 2 (surfaces).
using Jacobian = Eigen::Matrix<double, 3, Eigen::Dynamic, 0, 3, 2>;

using SurfaceFunction = std::function<double(const Vec3&)>;
using SurfaceGradient = std::function<Vec3(const Vec3&)>;

}  // namespace fracsurf
