#include "fracsurf/error_norms.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "fracsurf/parallel.hpp"

namespace fracsurf {

namespace {

struct CellErrors {
  double l2 = 0.0;
  double semi = 0.0;
};

// Affine piece of the reference cell: xi = origin + map * eta.
struct SubCell {
  RefPoint origin = RefPoint::Zero();
  Eigen::Matrix2d map = Eigen::Matrix2d::Identity();
};

constexpr int kGradedLayers = 10;
constexpr double kGradingRatio = 0.15;
constexpr int kSplitDepth = 4;
constexpr double kKinkTol = 1e-12;

// Geometric layers of the piece toward the side eta_dir = side.
void graded_layers(const SubCell& sub, int dir, int side, std::vector<SubCell>& out) {
  std::vector<double> cuts{0.0};
  for (int i = kGradedLayers; i >= 1; --i) cuts.push_back(std::pow(kGradingRatio, i));
  cuts.push_back(1.0);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = side == 0 ? cuts[i] : 1.0 - cuts[i + 1];
    const double len = cuts[i + 1] - cuts[i];
    SubCell piece = sub;
    piece.origin += sub.map.col(dir) * a;
    piece.map.col(dir) *= len;
    out.push_back(piece);
  }
}

void split_cell(CellKind kind, const SubCell& sub, int depth,
                const std::function<double(const RefPoint&)>& level, std::vector<SubCell>& out) {
  const std::vector<RefPoint> corners = reference_vertices(kind);
  std::vector<double> g;
  bool touch = false;
  bool neg = false;
  bool pos = false;
  for (const RefPoint& c : corners) {
    const double v = level(sub.origin + sub.map * c);
    g.push_back(v);
    if (std::abs(v) <= kKinkTol) {
      touch = true;
    } else {
      (v < 0.0 ? neg : pos) = true;
    }
  }
  if ((!touch && !(neg && pos)) || depth == 0) {
    out.push_back(sub);
    return;
  }
  const auto zero = [&](int i) { return std::abs(g[static_cast<std::size_t>(i)]) <= kKinkTol; };
  if (kind == CellKind::Segment) {
    if (!(neg && pos) && zero(0) != zero(1)) {
      graded_layers(sub, 0, zero(0) ? 0 : 1, out);
      return;
    }
    for (int k = 0; k < 2; ++k) {
      SubCell half = sub;
      half.origin += sub.map.col(0) * (0.5 * k);
      half.map.col(0) *= 0.5;
      split_cell(kind, half, depth - 1, level, out);
    }
    return;
  }
  if (kind == CellKind::Quad && !(neg && pos)) {
    // Edge on the kink set: grade across it only.
    if (zero(0) && zero(1) && !zero(2) && !zero(3)) return graded_layers(sub, 1, 0, out);
    if (zero(2) && zero(3) && !zero(0) && !zero(1)) return graded_layers(sub, 1, 1, out);
    if (zero(1) && zero(2) && !zero(0) && !zero(3)) return graded_layers(sub, 0, 1, out);
    if (zero(3) && zero(0) && !zero(1) && !zero(2)) return graded_layers(sub, 0, 0, out);
  }
  std::vector<SubCell> children;
  const Eigen::Matrix2d half = 0.5 * sub.map;
  const auto child = [&](double a, double b, const Eigen::Matrix2d& m) {
    SubCell c;
    c.origin = sub.origin + sub.map * RefPoint(a, b);
    c.map = m;
    children.push_back(c);
  };
  child(0.0, 0.0, half);
  child(0.5, 0.0, half);
  child(0.0, 0.5, half);
  if (kind == CellKind::Quad) {
    child(0.5, 0.5, half);
  } else {
    child(0.5, 0.5, -half);
  }
  for (const SubCell& c : children) split_cell(kind, c, depth - 1, level, out);
}

template <bool WithGradient>
ErrorNorms integrate_errors(const SurfaceMesh& mesh, const Lift& lift, const Eigen::VectorXd& U,
                            const ExactField& exact, int quad_order) {
  if (quad_order < 1) throw std::invalid_argument("error norms: quad_order must be >= 1");
  if (static_cast<std::size_t>(U.size()) != mesh.n_vertices()) {
    throw std::invalid_argument("error norms: coefficient vector does not match the mesh");
  }
  const QuadratureRule rule = quadrature_rule(mesh.cell_kind(), quad_order);
  const int r = reference_dim(mesh.cell_kind());
  std::vector<CellErrors> per_cell(mesh.n_cells());
  parallel_chunks(mesh.n_cells(), [&](int, std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) {
      const ElementMap emap = element_map(mesh, c);
      std::vector<SubCell> pieces;
      if (exact.kink) {
        split_cell(mesh.cell_kind(), SubCell{}, kSplitDepth,
                   [&](const RefPoint& xi) { return exact.kink(lift.point(emap.point(xi))); }, pieces);
      } else {
        pieces.emplace_back();
      }
      CellErrors acc;
      for (const SubCell& piece : pieces) {
        const double scale = r == 1 ? std::abs(piece.map(0, 0)) : std::abs(piece.map.determinant());
        for (std::size_t q = 0; q < rule.size(); ++q) {
          const RefPoint xi = piece.origin + piece.map * rule.points[q];
          const Jacobian df = emap.jacobian(xi);
          const double w = scale * rule.weights[q] * measure_density(df);
          const Vec3 x = emap.point(xi);
          const Vec3 y = lift.point(x);
          const FeValue uh = evaluate(mesh, U, c, xi);
          if constexpr (WithGradient) {
            double value = 0.0;
            Vec3 grad_exact;
            exact.value_and_gradient(y, value, grad_exact);
            // d/dxi (u o P o F) = (D(P o F))^T grad u, then lift to Gamma.
            const Jacobian dphi = lift.differential(x) * df;
            Eigen::Vector2d ref = Eigen::Vector2d::Zero();
            ref.head(r) = dphi.transpose() * grad_exact;
            const Vec3 grad_pulled = surface_gradient(df, ref);
            const double e = value - uh.value;
            acc.l2 += w * e * e;
            acc.semi += w * (grad_pulled - uh.gradient).squaredNorm();
          } else {
            const double e = exact.value(y) - uh.value;
            acc.l2 += w * e * e;
          }
        }
      }
      per_cell[c] = acc;
    }
  });
  double l2 = 0.0;
  double semi = 0.0;
  for (const CellErrors& e : per_cell) {
    l2 += e.l2;
    semi += e.semi;
  }
  ErrorNorms out;
  out.l2 = std::sqrt(l2);
  out.h1_seminorm = std::sqrt(semi);
  out.h1 = std::sqrt(l2 + semi);
  return out;
}

}  // namespace

double l2_error(const SurfaceMesh& mesh, const Lift& lift, const Eigen::VectorXd& U,
                const SurfaceFunction& exact, int quad_order) {
  ExactField field;
  field.value = exact;
  return integrate_errors<false>(mesh, lift, U, field, quad_order).l2;
}

double h1_error(const SurfaceMesh& mesh, const Lift& lift, const Eigen::VectorXd& U,
                const SurfaceFunction& exact, const SurfaceGradient& exact_gradient, int quad_order) {
  ExactField field;
  field.value = exact;
  field.value_and_gradient = [&](const Vec3& y, double& v, Vec3& g) {
    v = exact(y);
    g = exact_gradient(y);
  };
  return integrate_errors<true>(mesh, lift, U, field, quad_order).h1;
}

ErrorNorms error_norms(const SurfaceMesh& mesh, const Lift& lift, const Eigen::VectorXd& U,
                       const ExactField& exact, int quad_order) {
  if (!exact.value_and_gradient) {
    if (!exact.value) throw std::invalid_argument("error_norms: exact field is empty");
    return integrate_errors<false>(mesh, lift, U, exact, quad_order);
  }
  return integrate_errors<true>(mesh, lift, U, exact, quad_order);
}

RateFit fit_rates(std::span<const double> dofs, std::span<const double> errors) {
  if (dofs.size() != errors.size() || dofs.size() < 2) {
    throw std::invalid_argument("fit_rates: need at least two rows of equal length");
  }
  RateFit fit;
  for (std::size_t i = 0; i + 1 < dofs.size(); ++i) {
    if (!(dofs[i] > 0.0) || !(errors[i] > 0.0) || !(errors[i + 1] > 0.0)) {
      throw std::invalid_argument("fit_rates: entries must be positive");
    }
    if (!(dofs[i + 1] > dofs[i])) throw std::invalid_argument("fit_rates: DoFs must increase");
    fit.slopes.push_back(-std::log(errors[i + 1] / errors[i]) / std::log(dofs[i + 1] / dofs[i]));
  }
  fit.last = fit.slopes.back();
  return fit;
}

double log_linear_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("log_linear_slope: need at least two points");
  }
  const auto n = static_cast<double>(x.size());
  double sx = 0.0;
  double sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(y[i] > 0.0)) throw std::invalid_argument("log_linear_slope: values must be positive");
    sx += x[i];
    sy += std::log(y[i]);
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (std::log(y[i]) - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace fracsurf
