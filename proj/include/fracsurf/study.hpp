#pragma once

#include <limits>
#include <string>
#include <vector>

#include "fracsurf/error_norms.hpp"
#include "fracsurf/lift.hpp"
#include "fracsurf/sinc.hpp"
#include "fracsurf/sparse_solver.hpp"
#include "fracsurf/sphere_reference.hpp"

namespace fracsurf {

enum class MeshKind { Cube, Ico };

struct DataSpec {
  enum class Kind { Step, Mode };
  Kind kind = Kind::Step;
  int mode = 1;  // degree of the zonal harmonic for Kind::Mode

  bool operator==(const DataSpec&) const = default;
};

/// Settings of a batch study on the unit sphere.
struct StudyConfig {
  std::vector<double> s_values{0.3, 0.5, 0.7};
  double k = 0.15;
  MeshKind mesh = MeshKind::Cube;
  int first_level = 2;
  int last_level = 5;
  LiftKind lift = LiftKind::SignedDistance;
  DataSpec data;
  int assembly_order = kAssemblyOrder;
  int diagnostic_order = kDiagnosticOrder;
  SolverOptions::Kind solver = SolverOptions::Kind::Direct;
  double solver_tol = 1e-10;
  std::string out_dir;  // empty: nothing is written
  int truncation = kDefaultTruncation;

  // Sinc self-convergence study on a fixed mesh.
  std::vector<double> k_values{0.6, 0.45, 0.3};
  double k_ref = 0.05;
  int sinc_level = 3;

  bool operator==(const StudyConfig&) const = default;

  SolverOptions solver_options() const;
};

/// Throws std::invalid_argument describing the first violated constraint.
void validate(const StudyConfig& config);

std::string config_to_json(const StudyConfig& config);
StudyConfig config_from_json(const std::string& text);

// Command line spellings: "cube" | "ico", "sdf" | "generic", "step" |
// "mode:<j>", "direct" | "cg:<tol>", "A..B".
MeshKind parse_mesh_kind(const std::string& text);
LiftKind parse_lift_kind(const std::string& text);
DataSpec parse_data(const std::string& text);
void parse_solver(const std::string& text, StudyConfig& config);
std::pair<int, int> parse_levels(const std::string& text);
std::string to_string(MeshKind kind);
std::string to_string(LiftKind kind);
std::string to_string(const DataSpec& data);

InitialMesh initial_mesh(MeshKind kind);
Lift make_lift(LiftKind kind);

/// Meshes of the study are refined with the orthogonal (radial) lift so
/// both lifts see the same discrete surface at a given level.
SurfaceMesh study_mesh(MeshKind kind, int level);

SurfaceFunction data_function(const DataSpec& data);
ZonalSeries reference_series(const DataSpec& data, double s, int truncation);
ExactField exact_field(const ZonalSeries& series);

struct ConvergenceRow {
  int level = 0;
  std::size_t dofs = 0;
  double h = 0.0;
  double l2_error = 0.0;
  double h1_error = 0.0;
  double l2_slope = std::numeric_limits<double>::quiet_NaN();
  double h1_slope = std::numeric_limits<double>::quiet_NaN();
  double mean_ratio = 0.0;  // |1^T M U_k| / (||b|| ||1||)
  bool ok = true;
  std::string failure;
};

struct ConvergenceTable {
  double s = 0.0;
  std::vector<ConvergenceRow> rows;

  /// Completed rows only.
  std::vector<ConvergenceRow> completed() const;
  /// Slope of the last segment between completed rows (NaN if < 2 rows).
  double last_l2_slope() const;
  double last_h1_slope() const;
};

struct ConvergenceStudy {
  StudyConfig config;
  std::vector<ConvergenceTable> tables;
  double elapsed_seconds = 0.0;

  bool complete() const;
};

ConvergenceStudy run_convergence(const StudyConfig& config);

/// level,dofs,h,l2_error,h1_error,l2_slope,h1_slope
std::string convergence_csv(const ConvergenceTable& table);
std::string convergence_json(const ConvergenceStudy& study);

struct SincStudyRow {
  double k = 0.0;
  int M = 0;
  int N = 0;
  double error = 0.0;  // M-norm distance to the reference-spacing solution
};

struct SincStudy {
  int level = 0;
  double s = 0.0;
  double k_ref = 0.0;
  std::size_t dofs = 0;
  std::vector<SincStudyRow> rows;
  double slope = 0.0;  // least-squares slope of log(error) against 1/k
  bool strictly_decreasing = false;
};

/// Uses the first s value of the config.
SincStudy run_sinc_study(const StudyConfig& config);
std::string sinc_study_csv(const SincStudy& study);

struct SigmaStudyRow {
  int level = 0;
  std::size_t dofs = 0;
  double h = 0.0;
  double dev_signed = 0.0;
  double dev_generic = 0.0;
};

struct SigmaStudy {
  std::vector<SigmaStudyRow> rows;
  double slope_signed = 0.0;  // least squares, log deviation vs log DoFs
  double slope_generic = 0.0;
};

SigmaStudy run_sigma_study(const StudyConfig& config);

/// level,dofs,h,sigma_dev_signed,sigma_dev_generic
std::string sigma_study_csv(const SigmaStudy& study);

struct SolveReport {
  int level = 0;
  double s = 0.0;
  std::size_t dofs = 0;
  ErrorNorms errors;
  std::vector<std::string> files;
};

/// One solve (first s, last level). With an output directory, writes
/// solution.vtk (point data u, u_exact, f), trace.csv, mass.mtx and
/// stiffness.mtx.
SolveReport run_solve(const StudyConfig& config);

/// Build identifier recorded in the JSON outputs.
std::string build_git_hash();

void write_text_file(const std::string& path, const std::string& text);

}  // namespace fracsurf
