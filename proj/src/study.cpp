#include "fracsurf/study.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "fracsurf/mesh_io.hpp"

#ifndef FRACSURF_GIT_HASH
#define FRACSURF_GIT_HASH "unknown"
#endif

namespace fracsurf {

namespace {

using json = nlohmann::json;

std::string num(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string s_label(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", s);
  return buf;
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
  if (!dir.empty()) std::filesystem::create_directories(dir);
}

// Mesh, space and matrices of one refinement level.
struct LevelSystem {
  explicit LevelSystem(SurfaceMesh m, int assembly_order)
      : mesh(std::move(m)),
        space(mesh),
        mass(assemble_mass(space, assembly_order)),
        stiffness(assemble_stiffness(space, assembly_order)) {}
  LevelSystem(const LevelSystem&) = delete;
  LevelSystem& operator=(const LevelSystem&) = delete;

  SurfaceMesh mesh;
  FeSpace space;
  SparseSpd mass;
  SparseSpd stiffness;
};

void fill_slopes(ConvergenceTable& table) {
  const ConvergenceRow* prev = nullptr;
  for (ConvergenceRow& row : table.rows) {
    if (!row.ok) {
      prev = nullptr;
      continue;
    }
    if (prev != nullptr) {
      const double dofs[2] = {static_cast<double>(prev->dofs), static_cast<double>(row.dofs)};
      const double l2[2] = {prev->l2_error, row.l2_error};
      const double h1[2] = {prev->h1_error, row.h1_error};
      row.l2_slope = fit_rates(dofs, l2).last;
      row.h1_slope = fit_rates(dofs, h1).last;
    }
    prev = &row;
  }
}

}  // namespace

SolverOptions StudyConfig::solver_options() const {
  SolverOptions options;
  options.kind = solver;
  options.tol = solver_tol;
  return options;
}

void validate(const StudyConfig& c) {
  if (c.s_values.empty()) throw std::invalid_argument("config: at least one s value is required");
  for (double s : c.s_values) {
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("config: s values must lie in (0, 1)");
  }
  if (!(c.k > 0.0)) throw std::invalid_argument("config: k must be positive");
  if (c.first_level < 0 || c.last_level < c.first_level) {
    throw std::invalid_argument("config: levels must be a nonempty increasing range");
  }
  if (c.data.kind == DataSpec::Kind::Mode && c.data.mode < 1) {
    throw std::invalid_argument("config: mode data needs a degree >= 1");
  }
  if (c.assembly_order < 1 || c.diagnostic_order < 1) {
    throw std::invalid_argument("config: quadrature orders must be >= 1");
  }
  if (!(c.solver_tol > 0.0)) throw std::invalid_argument("config: solver tolerance must be positive");
  if (c.truncation < 1) throw std::invalid_argument("config: truncation must be >= 1");
  for (double k : c.k_values) {
    if (!(k > 0.0)) throw std::invalid_argument("config: study spacings must be positive");
  }
  if (!(c.k_ref > 0.0)) throw std::invalid_argument("config: reference spacing must be positive");
  if (c.sinc_level < 0) throw std::invalid_argument("config: sinc study level must be >= 0");
}

std::string config_to_json(const StudyConfig& c) {
  json j;
  j["s"] = c.s_values;
  j["k"] = c.k;
  j["mesh"] = to_string(c.mesh);
  j["levels"] = {c.first_level, c.last_level};
  j["lift"] = to_string(c.lift);
  j["data"] = to_string(c.data);
  j["quad"] = {{"assembly", c.assembly_order}, {"diagnostics", c.diagnostic_order}};
  j["solver"] = c.solver == SolverOptions::Kind::Direct ? "direct" : "cg";
  j["solver_tol"] = c.solver_tol;
  j["out"] = c.out_dir;
  j["trunc"] = c.truncation;
  j["sinc_study"] = {{"k_values", c.k_values}, {"k_ref", c.k_ref}, {"level", c.sinc_level}};
  return j.dump(2);
}

StudyConfig config_from_json(const std::string& text) {
  const json j = json::parse(text);
  StudyConfig c;
  if (j.contains("s")) c.s_values = j.at("s").get<std::vector<double>>();
  if (j.contains("k")) c.k = j.at("k").get<double>();
  if (j.contains("mesh")) c.mesh = parse_mesh_kind(j.at("mesh").get<std::string>());
  if (j.contains("levels")) {
    c.first_level = j.at("levels").at(0).get<int>();
    c.last_level = j.at("levels").at(1).get<int>();
  }
  if (j.contains("lift")) c.lift = parse_lift_kind(j.at("lift").get<std::string>());
  if (j.contains("data")) c.data = parse_data(j.at("data").get<std::string>());
  if (j.contains("quad")) {
    c.assembly_order = j.at("quad").value("assembly", c.assembly_order);
    c.diagnostic_order = j.at("quad").value("diagnostics", c.diagnostic_order);
  }
  if (j.contains("solver")) parse_solver(j.at("solver").get<std::string>(), c);
  if (j.contains("solver_tol")) c.solver_tol = j.at("solver_tol").get<double>();
  if (j.contains("out")) c.out_dir = j.at("out").get<std::string>();
  if (j.contains("trunc")) c.truncation = j.at("trunc").get<int>();
  if (j.contains("sinc_study")) {
    const json& st = j.at("sinc_study");
    if (st.contains("k_values")) c.k_values = st.at("k_values").get<std::vector<double>>();
    c.k_ref = st.value("k_ref", c.k_ref);
    c.sinc_level = st.value("level", c.sinc_level);
  }
  validate(c);
  return c;
}

MeshKind parse_mesh_kind(const std::string& text) {
  if (text == "cube") return MeshKind::Cube;
  if (text == "ico") return MeshKind::Ico;
  throw std::invalid_argument("unknown mesh '" + text + "' (expected cube or ico)");
}

LiftKind parse_lift_kind(const std::string& text) {
  if (text == "sdf") return LiftKind::SignedDistance;
  if (text == "generic") return LiftKind::GenericSixPatch;
  throw std::invalid_argument("unknown lift '" + text + "' (expected sdf or generic)");
}

DataSpec parse_data(const std::string& text) {
  if (text == "step") return {};
  if (text.rfind("mode:", 0) == 0) {
    DataSpec d;
    d.kind = DataSpec::Kind::Mode;
    std::size_t used = 0;
    const std::string digits = text.substr(5);
    try {
      d.mode = std::stoi(digits, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != digits.size() || d.mode < 1) {
      throw std::invalid_argument("bad data spec '" + text + "' (expected mode:<j>, j >= 1)");
    }
    return d;
  }
  throw std::invalid_argument("unknown data '" + text + "' (expected step or mode:<j>)");
}

void parse_solver(const std::string& text, StudyConfig& config) {
  if (text == "direct") {
    config.solver = SolverOptions::Kind::Direct;
    return;
  }
  if (text == "cg") {
    config.solver = SolverOptions::Kind::Cg;
    return;
  }
  if (text.rfind("cg:", 0) == 0) {
    std::size_t used = 0;
    const std::string tol = text.substr(3);
    double value = 0.0;
    try {
      value = std::stod(tol, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != tol.size() || !(value > 0.0)) {
      throw std::invalid_argument("bad solver spec '" + text + "' (expected cg:<tol>)");
    }
    config.solver = SolverOptions::Kind::Cg;
    config.solver_tol = value;
    return;
  }
  throw std::invalid_argument("unknown solver '" + text + "' (expected direct or cg:<tol>)");
}

std::pair<int, int> parse_levels(const std::string& text) {
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      std::size_t used = 0;
      const int level = std::stoi(text, &used);
      if (used == text.size()) return {level, level};
    } else {
      std::size_t u1 = 0;
      std::size_t u2 = 0;
      const std::string a = text.substr(0, dots);
      const std::string b = text.substr(dots + 2);
      const int first = std::stoi(a, &u1);
      const int last = std::stoi(b, &u2);
      if (u1 == a.size() && u2 == b.size()) return {first, last};
    }
  } catch (const std::exception&) {
  }
  throw std::invalid_argument("bad level range '" + text + "' (expected A..B)");
}

std::string to_string(MeshKind kind) { return kind == MeshKind::Cube ? "cube" : "ico"; }
std::string to_string(LiftKind kind) { return kind == LiftKind::SignedDistance ? "sdf" : "generic"; }
std::string to_string(const DataSpec& data) {
  return data.kind == DataSpec::Kind::Step ? "step" : "mode:" + std::to_string(data.mode);
}

InitialMesh initial_mesh(MeshKind kind) {
  return kind == MeshKind::Cube ? InitialMesh::CubeQuads : InitialMesh::IcosahedronTriangles;
}

Lift make_lift(LiftKind kind) {
  return kind == LiftKind::SignedDistance ? Lift::signed_distance(3) : Lift::generic_six_patch(3);
}

SurfaceMesh study_mesh(MeshKind kind, int level) {
  return sphere_mesh(initial_mesh(kind), level, Lift::signed_distance(3));
}

SurfaceFunction data_function(const DataSpec& data) {
  if (data.kind == DataSpec::Kind::Step) return [](const Vec3& x) { return step_eval(x); };
  const int j = data.mode;
  return [j](const Vec3& x) {
    std::vector<double> p(static_cast<std::size_t>(j) + 1);
    legendre_pack(j, std::clamp(x.z() / x.norm(), -1.0, 1.0), p);
    return zonal_normalization(j) * p[static_cast<std::size_t>(j)];
  };
}

ZonalSeries reference_series(const DataSpec& data, double s, int truncation) {
  if (data.kind == DataSpec::Kind::Step) return ZonalSeries::step(s, truncation);
  return ZonalSeries::single_mode(data.mode, s);
}

ExactField exact_field(const ZonalSeries& series) {
  ExactField field;
  field.value = [&series](const Vec3& y) { return series.value_at(y); };
  field.value_and_gradient = [&series](const Vec3& y, double& v, Vec3& g) {
    series.value_and_gradient_at(y, v, g);
  };
  if (series.equatorial_jump()) field.kink = [](const Vec3& y) { return y.z(); };
  return field;
}

std::vector<ConvergenceRow> ConvergenceTable::completed() const {
  std::vector<ConvergenceRow> out;
  for (const ConvergenceRow& r : rows) {
    if (r.ok) out.push_back(r);
  }
  return out;
}

double ConvergenceTable::last_l2_slope() const {
  const auto done = completed();
  return done.size() < 2 ? std::numeric_limits<double>::quiet_NaN() : done.back().l2_slope;
}

double ConvergenceTable::last_h1_slope() const {
  const auto done = completed();
  return done.size() < 2 ? std::numeric_limits<double>::quiet_NaN() : done.back().h1_slope;
}

bool ConvergenceStudy::complete() const {
  for (const ConvergenceTable& t : tables) {
    for (const ConvergenceRow& r : t.rows) {
      if (!r.ok) return false;
    }
  }
  return true;
}

ConvergenceStudy run_convergence(const StudyConfig& config) {
  validate(config);
  const auto start = std::chrono::steady_clock::now();
  ConvergenceStudy study;
  study.config = config;
  for (double s : config.s_values) study.tables.push_back(ConvergenceTable{s, {}});

  std::vector<ZonalSeries> series;
  for (double s : config.s_values) series.push_back(reference_series(config.data, s, config.truncation));

  const Lift lift = make_lift(config.lift);
  const SurfaceFunction f = data_function(config.data);
  for (int level = config.first_level; level <= config.last_level; ++level) {
    std::unique_ptr<LevelSystem> system;
    Eigen::VectorXd load;
    std::string setup_failure;
    try {
      system = std::make_unique<LevelSystem>(study_mesh(config.mesh, level), config.assembly_order);
      load = assemble_load_sigma(system->space, lift, f, config.assembly_order);
    } catch (const std::exception& e) {
      setup_failure = e.what();
    }
    for (std::size_t i = 0; i < config.s_values.size(); ++i) {
      ConvergenceRow row;
      row.level = level;
      if (!setup_failure.empty()) {
        row.ok = false;
        row.failure = "setup: " + setup_failure;
        study.tables[i].rows.push_back(row);
        continue;
      }
      row.dofs = system->space.n_dofs();
      row.h = mesh_quality(system->mesh).h;
      try {
        const SincRule rule(config.s_values[i], config.k);
        const FractionalSolve solve =
            apply_fractional_inverse(rule, system->mass, system->stiffness, load, config.solver_options());
        const ErrorNorms err = error_norms(system->mesh, lift, solve.coefficients, exact_field(series[i]),
                                           config.diagnostic_order);
        row.l2_error = err.l2;
        row.h1_error = err.h1;
        row.mean_ratio = std::abs(solve.solution_mean) /
                         (load.norm() * std::sqrt(static_cast<double>(load.size())));
      } catch (const std::exception& e) {
        row.ok = false;
        row.failure = e.what();
      }
      study.tables[i].rows.push_back(row);
    }
  }
  for (ConvergenceTable& t : study.tables) fill_slopes(t);
  study.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (!config.out_dir.empty()) {
    ensure_dir(config.out_dir);
    for (const ConvergenceTable& t : study.tables) {
      write_text_file(join(config.out_dir, "convergence_s" + s_label(t.s) + ".csv"), convergence_csv(t));
    }
    write_text_file(join(config.out_dir, "convergence.json"), convergence_json(study));
    write_text_file(join(config.out_dir, "config.json"), config_to_json(config));
  }
  return study;
}

std::string convergence_csv(const ConvergenceTable& table) {
  std::ostringstream out;
  out << "level,dofs,h,l2_error,h1_error,l2_slope,h1_slope\n";
  for (const ConvergenceRow& r : table.rows) {
    if (!r.ok) continue;
    out << r.level << ',' << r.dofs << ',' << num(r.h) << ',' << num(r.l2_error) << ','
        << num(r.h1_error) << ',' << num(r.l2_slope) << ',' << num(r.h1_slope) << '\n';
  }
  return out.str();
}

std::string convergence_json(const ConvergenceStudy& study) {
  json j;
  j["git_hash"] = build_git_hash();
  j["elapsed_seconds"] = study.elapsed_seconds;
  j["config"] = json::parse(config_to_json(study.config));
  j["tables"] = json::array();
  for (const ConvergenceTable& t : study.tables) {
    json jt;
    jt["s"] = t.s;
    jt["rows"] = json::array();
    for (const ConvergenceRow& r : t.rows) {
      json jr = {{"level", r.level}, {"ok", r.ok}};
      if (r.ok) {
        jr["dofs"] = r.dofs;
        jr["h"] = r.h;
        jr["l2_error"] = r.l2_error;
        jr["h1_error"] = r.h1_error;
        jr["mean_ratio"] = r.mean_ratio;
        if (!std::isnan(r.l2_slope)) jr["l2_slope"] = r.l2_slope;
        if (!std::isnan(r.h1_slope)) jr["h1_slope"] = r.h1_slope;
      } else {
        jr["failure"] = r.failure;
      }
      jt["rows"].push_back(jr);
    }
    j["tables"].push_back(jt);
  }
  return j.dump(2);
}

SincStudy run_sinc_study(const StudyConfig& config) {
  validate(config);
  for (double k : config.k_values) {
    if (!(config.k_ref <= k)) throw std::invalid_argument("sinc study: k_ref must not exceed any k");
  }
  SincStudy study;
  study.level = config.sinc_level;
  study.s = config.s_values.front();
  study.k_ref = config.k_ref;

  const Lift lift = make_lift(config.lift);
  const LevelSystem system(study_mesh(config.mesh, config.sinc_level), config.assembly_order);
  study.dofs = system.space.n_dofs();
  const Eigen::VectorXd load =
      assemble_load_sigma(system.space, lift, data_function(config.data), config.assembly_order);
  const SolverOptions solver = config.solver_options();
  const auto solve_with = [&](double k) {
    return apply_fractional_inverse(SincRule(study.s, k), system.mass, system.stiffness, load, solver)
        .coefficients;
  };
  const Eigen::VectorXd reference = solve_with(config.k_ref);
  std::vector<double> inv_k;
  std::vector<double> errors;
  for (double k : config.k_values) {
    const Truncation t = choose_truncation(study.s, k);
    const Eigen::VectorXd diff = solve_with(k) - reference;
    SincStudyRow row{k, t.M, t.N, std::sqrt(std::max(0.0, system.mass.quadratic_form(diff)))};
    study.rows.push_back(row);
    inv_k.push_back(1.0 / k);
    errors.push_back(row.error);
  }
  study.strictly_decreasing = true;
  for (std::size_t i = 1; i < study.rows.size(); ++i) {
    const bool refined = study.rows[i].k < study.rows[i - 1].k;
    const bool smaller = study.rows[i].error < study.rows[i - 1].error;
    if (refined != smaller) study.strictly_decreasing = false;
  }
  bool positive = true;
  for (double e : errors) positive = positive && e > 0.0;
  study.slope = errors.size() >= 2 && positive ? log_linear_slope(inv_k, errors)
                                               : std::numeric_limits<double>::quiet_NaN();
  if (!config.out_dir.empty()) {
    ensure_dir(config.out_dir);
    write_text_file(join(config.out_dir, "sinc_study.csv"), sinc_study_csv(study));
  }
  return study;
}

std::string sinc_study_csv(const SincStudy& study) {
  std::ostringstream out;
  out << "k,M,N,error\n";
  for (const SincStudyRow& r : study.rows) {
    out << num(r.k) << ',' << r.M << ',' << r.N << ',' << num(r.error) << '\n';
  }
  return out.str();
}

SigmaStudy run_sigma_study(const StudyConfig& config) {
  validate(config);
  SigmaStudy study;
  const Lift signed_lift = Lift::signed_distance(3);
  const Lift generic_lift = Lift::generic_six_patch(3);
  std::vector<double> log_dofs;
  std::vector<double> dev_signed;
  std::vector<double> dev_generic;
  for (int level = config.first_level; level <= config.last_level; ++level) {
    const SurfaceMesh mesh = study_mesh(config.mesh, level);
    SigmaStudyRow row;
    row.level = level;
    row.dofs = mesh.n_vertices();
    row.h = mesh_quality(mesh).h;
    row.dev_signed = sigma_sup_deviation(signed_lift, mesh, config.diagnostic_order);
    row.dev_generic = sigma_sup_deviation(generic_lift, mesh, config.diagnostic_order);
    study.rows.push_back(row);
    log_dofs.push_back(std::log(static_cast<double>(row.dofs)));
    dev_signed.push_back(row.dev_signed);
    dev_generic.push_back(row.dev_generic);
  }
  if (study.rows.size() >= 2) {
    study.slope_signed = log_linear_slope(log_dofs, dev_signed);
    study.slope_generic = log_linear_slope(log_dofs, dev_generic);
  }
  if (!config.out_dir.empty()) {
    ensure_dir(config.out_dir);
    write_text_file(join(config.out_dir, "sigma_study.csv"), sigma_study_csv(study));
  }
  return study;
}

std::string sigma_study_csv(const SigmaStudy& study) {
  std::ostringstream out;
  out << "level,dofs,h,sigma_dev_signed,sigma_dev_generic\n";
  for (const SigmaStudyRow& r : study.rows) {
    out << r.level << ',' << r.dofs << ',' << num(r.h) << ',' << num(r.dev_signed) << ','
        << num(r.dev_generic) << '\n';
  }
  return out.str();
}

SolveReport run_solve(const StudyConfig& config) {
  validate(config);
  SolveReport report;
  report.level = config.last_level;
  report.s = config.s_values.front();
  const Lift lift = make_lift(config.lift);
  const LevelSystem system(study_mesh(config.mesh, report.level), config.assembly_order);
  report.dofs = system.space.n_dofs();
  const SurfaceFunction f = data_function(config.data);
  const Eigen::VectorXd load = assemble_load_sigma(system.space, lift, f, config.assembly_order);
  const SincRule rule(report.s, config.k);
  const Eigen::VectorXd u =
      apply_fractional_inverse(rule, system.mass, system.stiffness, load, config.solver_options())
          .coefficients;
  const ZonalSeries series = reference_series(config.data, report.s, config.truncation);
  report.errors = error_norms(system.mesh, lift, u, exact_field(series), config.diagnostic_order);

  if (!config.out_dir.empty()) {
    ensure_dir(config.out_dir);
    const SurfaceFunction exact = [&](const Vec3& y) { return series.value_at(y); };
    const Eigen::VectorXd u_exact = interpolate(system.space, pullback(lift, exact));
    const Eigen::VectorXd f_nodal = interpolate(system.space, pullback(lift, f));
    const std::string vtk = join(config.out_dir, "solution.vtk");
    write_vtk(system.mesh, vtk, {{"u", &u}, {"u_exact", &u_exact}, {"f", &f_nodal}});
    const std::string trace = join(config.out_dir, "trace.csv");
    write_trace_csv(geodesic_trace(system.mesh, lift, u, exact), trace);
    const std::string mass = join(config.out_dir, "mass.mtx");
    const std::string stiffness = join(config.out_dir, "stiffness.mtx");
    write_matrix_market(system.mass, mass);
    write_matrix_market(system.stiffness, stiffness);
    report.files = {vtk, trace, mass, stiffness};
  }
  return report;
}

std::string build_git_hash() { return FRACSURF_GIT_HASH; }

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace fracsurf
