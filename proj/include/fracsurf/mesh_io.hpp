#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fracsurf/fem.hpp"
#include "fracsurf/lift.hpp"

namespace fracsurf {

struct PointField {
  std::string name;
  const Eigen::VectorXd* values = nullptr;
};

/// Legacy VTK ASCII UNSTRUCTURED_GRID. Cell types: VTK_LINE (3),
/// VTK_TRIANGLE (5), VTK_QUAD (9). Each field becomes a POINT_DATA SCALARS
/// array of the given name.
void write_vtk(const SurfaceMesh& mesh, const std::string& path,
               const std::vector<PointField>& point_data = {});

struct CellLocation {
  std::size_t cell = 0;
  RefPoint xi = RefPoint::Zero();
};

/// Finds a cell and reference point with P(F_tau(xi)) = y for y on the
/// exact surface.
std::optional<CellLocation> locate_on_surface(const SurfaceMesh& mesh, const Lift& lift, const Vec3& y);

struct TraceSample {
  double theta = 0.0;
  double value = 0.0;  // discrete solution
  double exact = 0.0;  // reference solution (NaN when not supplied)
};

/// Samples the discrete solution along the meridian phi = 0 (x2 = 0, x1 >= 0)
/// at `samples` uniformly spaced polar angles in [0, pi].
std::vector<TraceSample> geodesic_trace(const SurfaceMesh& mesh, const Lift& lift,
                                        const Eigen::VectorXd& U, const SurfaceFunction& exact = {},
                                        int samples = 512);

/// CSV columns: theta,u_h,u_exact.
void write_trace_csv(const std::vector<TraceSample>& trace, const std::string& path);

}  // namespace fracsurf
