#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "fracsurf/surface_mesh.hpp"
#include "fracsurf/types.hpp"

namespace fracsurf {

/// Raised when a point lies outside the set where a lift is defined.
class LiftDomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class LiftKind { SignedDistance, GenericSixPatch };

/// Signed distance function d of a surface together with its first and
/// second derivatives, valid in a tubular neighborhood of the surface.
struct DistanceField {
  std::function<double(const Vec3&)> distance;
  std::function<Vec3(const Vec3&)> gradient;
  std::function<Mat3(const Vec3&)> hessian;
  std::function<bool(const Vec3&)> in_domain;  // optional; defaults to "everywhere"
};

/// Map from the discrete surface onto the exact one.
///
/// SignedDistance is the orthogonal projection x - d(x) grad d(x); the
/// built-in target is the unit sphere (the unit circle when dim == 2).
/// GenericSixPatch is the piecewise lift onto the unit sphere that keeps
/// the off-axis coordinates of x and solves the remaining one from |z| = 1,
/// the axis being chosen by the patch x_i >= |x_j| (or x_i <= -|x_j|).
/// Ties go to the smallest axis index, and + before -.
class Lift {
 public:
  static Lift signed_distance(int dim = 3);
  static Lift signed_distance(DistanceField field, int dim = 3);
  static Lift generic_six_patch(int dim = 3);

  LiftKind kind() const { return kind_; }
  int dim() const { return dim_; }
  bool is_unit_sphere() const { return field_ == nullptr; }

  Vec3 point(const Vec3& x) const;

  /// Derivative of the lift at x as a linear map of the ambient space.
  Mat3 differential(const Vec3& x) const;

  /// Patch (axis, sign) selected for x by the generic lift; axis is 0-based.
  std::pair<int, int> patch(const Vec3& x) const;

  /// Point of the patch (axis, sign) formula regardless of patch membership.
  Vec3 patch_point(const Vec3& x, int axis, int sign) const;

 private:
  Lift(LiftKind kind, int dim, std::shared_ptr<const DistanceField> field)
      : kind_(kind), dim_(dim), field_(std::move(field)) {}

  LiftKind kind_;
  int dim_;
  std::shared_ptr<const DistanceField> field_;
};

Vec3 lift_point(const Lift& lift, const Vec3& x);

/// Jacobian of P o F_tau at xi, by the chain rule.
Jacobian composite_jacobian(const Lift& lift, const ElementMap& emap, const RefPoint& xi);

/// Ratio of the area elements of the exact and discrete surfaces at F_tau(xi).
double sigma_at(const Lift& lift, const ElementMap& emap, const RefPoint& xi);

/// sigma sampled at the Gauss points of every cell.
struct SigmaField {
  int quad_order = 0;
  std::size_t points_per_cell = 0;
  std::vector<double> values;  // cell-major
  double min = 0.0;
  double max = 0.0;
  double sup_deviation = 0.0;  // max |sigma - 1|

  double at(std::size_t cell, std::size_t q) const { return values[cell * points_per_cell + q]; }
};

SigmaField sigma_field(const Lift& lift, const SurfaceMesh& mesh, int quad_order);
double sigma_sup_deviation(const Lift& lift, const SurfaceMesh& mesh, int quad_order);

/// f o P: a function on the exact surface composed with the lift.
SurfaceFunction pullback(const Lift& lift, SurfaceFunction f);

/// Unit sphere distance field (the extension point used with custom surfaces).
DistanceField unit_sphere_distance();

}  // namespace fracsurf
