#include "fracsurf/lift.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace fracsurf {

namespace {

void require_nonzero(const Vec3& x) {
  if (x.squaredNorm() == 0.0) throw LiftDomainError("lift: the origin has no image on the sphere");
}

}  // namespace

Lift Lift::signed_distance(int dim) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("Lift: dimension must be 2 or 3");
  return Lift(LiftKind::SignedDistance, dim, nullptr);
}

Lift Lift::signed_distance(DistanceField field, int dim) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("Lift: dimension must be 2 or 3");
  if (!field.distance || !field.gradient || !field.hessian) {
    throw std::invalid_argument("Lift: distance field needs d, grad d and hess d");
  }
  return Lift(LiftKind::SignedDistance, dim, std::make_shared<const DistanceField>(std::move(field)));
}

Lift Lift::generic_six_patch(int dim) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("Lift: dimension must be 2 or 3");
  return Lift(LiftKind::GenericSixPatch, dim, nullptr);
}

std::pair<int, int> Lift::patch(const Vec3& x) const {
  for (int i = 0; i < dim_; ++i) {
    bool plus = true;
    bool minus = true;
    for (int j = 0; j < dim_; ++j) {
      if (j == i) continue;
      plus = plus && x[i] >= std::abs(x[j]);
      minus = minus && x[i] <= -std::abs(x[j]);
    }
    if (plus) return {i, 1};
    if (minus) return {i, -1};
  }
  // Unreachable for finite x: the largest |x_i| always qualifies.
  throw LiftDomainError("lift: point belongs to no patch");
}

Vec3 Lift::patch_point(const Vec3& x, int axis, int sign) const {
  double rest = 0.0;
  for (int k = 0; k < dim_; ++k) {
    if (k != axis) rest += x[k] * x[k];
  }
  if (rest > 1.0) {
    throw LiftDomainError("lift: point is outside the domain of patch " + std::to_string(axis));
  }
  Vec3 z = x;
  z[axis] = sign * std::sqrt(1.0 - rest);
  return z;
}

Vec3 Lift::point(const Vec3& x) const {
  if (!x.allFinite()) throw LiftDomainError("lift: non-finite point");
  if (field_) {
    if (field_->in_domain && !field_->in_domain(x)) {
      throw LiftDomainError("lift: point outside the tubular neighborhood");
    }
    return x - field_->distance(x) * field_->gradient(x);
  }
  require_nonzero(x);
  if (kind_ == LiftKind::SignedDistance) return x / x.norm();
  const auto [axis, sign] = patch(x);
  return patch_point(x, axis, sign);
}

Mat3 Lift::differential(const Vec3& x) const {
  if (!x.allFinite()) throw LiftDomainError("lift: non-finite point");
  if (field_) {
    if (field_->in_domain && !field_->in_domain(x)) {
      throw LiftDomainError("lift: point outside the tubular neighborhood");
    }
    const Vec3 g = field_->gradient(x);
    return Mat3::Identity() - g * g.transpose() - field_->distance(x) * field_->hessian(x);
  }
  require_nonzero(x);
  if (kind_ == LiftKind::SignedDistance) {
    const double r = x.norm();
    const Vec3 n = x / r;
    return (Mat3::Identity() - n * n.transpose()) / r;
  }
  const auto [axis, sign] = patch(x);
  const Vec3 z = patch_point(x, axis, sign);
  if (z[axis] == 0.0) throw LiftDomainError("lift: patch map is not differentiable here");
  Mat3 d = Mat3::Identity();
  d(axis, axis) = 0.0;
  for (int k = 0; k < dim_; ++k) {
    if (k != axis) d(axis, k) = -x[k] / z[axis];
  }
  return d;
}

Vec3 lift_point(const Lift& lift, const Vec3& x) { return lift.point(x); }

Jacobian composite_jacobian(const Lift& lift, const ElementMap& emap, const RefPoint& xi) {
  const Jacobian df = emap.jacobian(xi);
  Jacobian out = lift.differential(emap.point(xi)) * df;
  return out;
}

double sigma_at(const Lift& lift, const ElementMap& emap, const RefPoint& xi) {
  const Jacobian df = emap.jacobian(xi);
  const double discrete = measure_density(df);
  const double exact = measure_density(Jacobian(lift.differential(emap.point(xi)) * df));
  if (!(discrete > 0.0) || !(exact > 0.0)) {
    throw LiftDomainError("sigma: degenerate area element");
  }
  return exact / discrete;
}

SigmaField sigma_field(const Lift& lift, const SurfaceMesh& mesh, int quad_order) {
  if (quad_order < 1) throw std::invalid_argument("sigma_field: quad_order must be >= 1");
  const QuadratureRule rule = quadrature_rule(mesh.cell_kind(), quad_order);
  SigmaField field;
  field.quad_order = quad_order;
  field.points_per_cell = rule.size();
  field.values.reserve(mesh.n_cells() * rule.size());
  field.min = std::numeric_limits<double>::infinity();
  field.max = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
    const ElementMap emap = element_map(mesh, c);
    for (const RefPoint& xi : rule.points) {
      const double s = sigma_at(lift, emap, xi);
      field.values.push_back(s);
      field.min = std::min(field.min, s);
      field.max = std::max(field.max, s);
      field.sup_deviation = std::max(field.sup_deviation, std::abs(s - 1.0));
    }
  }
  return field;
}

double sigma_sup_deviation(const Lift& lift, const SurfaceMesh& mesh, int quad_order) {
  return sigma_field(lift, mesh, quad_order).sup_deviation;
}

SurfaceFunction pullback(const Lift& lift, SurfaceFunction f) {
  return [lift, f = std::move(f)](const Vec3& x) { return f(lift.point(x)); };
}

DistanceField unit_sphere_distance() {
  DistanceField field;
  field.distance = [](const Vec3& x) { return x.norm() - 1.0; };
  field.gradient = [](const Vec3& x) { return Vec3(x / x.norm()); };
  field.hessian = [](const Vec3& x) {
    const double r = x.norm();
    const Vec3 n = x / r;
    return Mat3((Mat3::Identity() - n * n.transpose()) / r);
  };
  field.in_domain = [](const Vec3& x) { return x.squaredNorm() > 0.0; };
  return field;
}

}  // namespace fracsurf
