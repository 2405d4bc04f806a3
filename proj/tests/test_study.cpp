#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fracsurf/mesh_io.hpp"
#include "fracsurf/study.hpp"

using namespace fracsurf;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("fracsurf_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

StudyConfig small_config() {
  StudyConfig c;
  c.s_values = {0.5};
  c.k = 0.3;
  c.first_level = 1;
  c.last_level = 3;
  c.truncation = 2000;
  return c;
}

double max_abs_slope(const std::vector<TraceSample>& t) {
  double m = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) {
    m = std::max(m, std::abs(t[i].value - t[i - 1].value) / (t[i].theta - t[i - 1].theta));
  }
  return m;
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("config round trip") {
    const StudyConfig d;
    CHECK(config_from_json(config_to_json(d)) == d);
    StudyConfig c;
    c.s_values = {0.25, 0.8};
    c.k = 0.123456789012345;
    c.mesh = MeshKind::Ico;
    c.first_level = 1;
    c.last_level = 4;
    c.lift = LiftKind::GenericSixPatch;
    c.data = parse_data("mode:3");
    c.assembly_order = 5;
    c.solver = SolverOptions::Kind::Cg;
    c.solver_tol = 3e-11;
    c.out_dir = "some/dir";
    c.truncation = 777;
    c.k_values = {0.5, 0.4};
    c.k_ref = 0.07;
    c.sinc_level = 2;
    CHECK(config_from_json(config_to_json(c)) == c);
    CHECK(config_to_json(config_from_json(config_to_json(c))) == config_to_json(c));
  }

  TEST_CASE("command line spellings") {
    CHECK(parse_mesh_kind("cube") == MeshKind::Cube);
    CHECK(parse_mesh_kind("ico") == MeshKind::Ico);
    CHECK(parse_lift_kind("sdf") == LiftKind::SignedDistance);
    CHECK(parse_lift_kind("generic") == LiftKind::GenericSixPatch);
    CHECK(parse_data("step").kind == DataSpec::Kind::Step);
    CHECK(parse_data("mode:5").mode == 5);
    CHECK(parse_levels("2..5") == std::make_pair(2, 5));
    CHECK(parse_levels("3") == std::make_pair(3, 3));
    StudyConfig c;
    parse_solver("cg:1e-8", c);
    CHECK(c.solver == SolverOptions::Kind::Cg);
    CHECK(c.solver_tol == 1e-8);
    parse_solver("direct", c);
    CHECK(c.solver == SolverOptions::Kind::Direct);
    CHECK_THROWS_AS(parse_mesh_kind("torus"), std::invalid_argument);
    CHECK_THROWS_AS(parse_lift_kind("radial"), std::invalid_argument);
    CHECK_THROWS_AS(parse_data("mode:"), std::invalid_argument);
    CHECK_THROWS_AS(parse_data("mode:0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_data("mode:2x"), std::invalid_argument);
    CHECK_THROWS_AS(parse_levels("5..x"), std::invalid_argument);
    CHECK_THROWS_AS(parse_solver("cg:-1", c), std::invalid_argument);
    CHECK_THROWS_AS(parse_solver("lu", c), std::invalid_argument);
  }

  TEST_CASE("validation") {
    StudyConfig c;
    c.s_values = {1.0};
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    c = StudyConfig{};
    c.first_level = 4;
    c.last_level = 2;
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    c = StudyConfig{};
    c.k = 0.0;
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    CHECK_THROWS_AS(config_from_json("{\"mesh\": \"cylinder\"}"), std::invalid_argument);
  }

  TEST_CASE("convergence tables are deterministic and well formed") {
    const StudyConfig c = small_config();
    const ConvergenceStudy a = run_convergence(c);
    setenv("FRACSURF_THREADS", "3", 1);
    const ConvergenceStudy b = run_convergence(c);
    unsetenv("FRACSURF_THREADS");
    REQUIRE(a.tables.size() == 1);
    const std::string csv = convergence_csv(a.tables[0]);
    CHECK(csv == convergence_csv(b.tables[0]));
    CHECK(csv.rfind("level,dofs,h,l2_error,h1_error,l2_slope,h1_slope\n", 0) == 0);
    CHECK(a.complete());
    const auto rows = a.tables[0].completed();
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].dofs == 26);
    CHECK(std::isnan(rows[0].l2_slope));
    for (std::size_t i = 1; i < rows.size(); ++i) {
      CHECK(rows[i].l2_error < rows[i - 1].l2_error);
      CHECK(rows[i].h1_error <= rows[i - 1].h1_error);
      CHECK(rows[i].h1_error >= rows[i].l2_error);
    }
    CHECK(a.tables[0].last_l2_slope() == rows.back().l2_slope);
    const std::string json = convergence_json(a);
    CHECK(json.find("\"git_hash\"") != std::string::npos);
    CHECK(json.find("\"elapsed_seconds\"") != std::string::npos);
  }

  TEST_CASE("failed cells are recorded and left out of the csv") {
    StudyConfig c = small_config();
    c.last_level = 1;
    c.solver = SolverOptions::Kind::Cg;
    c.solver_tol = 1e-300;
    const ConvergenceStudy st = run_convergence(c);
    CHECK_FALSE(st.complete());
    REQUIRE(st.tables[0].rows.size() == 1);
    CHECK_FALSE(st.tables[0].rows[0].ok);
    CHECK(st.tables[0].rows[0].failure.find("sinc node") != std::string::npos);
    CHECK(convergence_csv(st.tables[0]) == "level,dofs,h,l2_error,h1_error,l2_slope,h1_slope\n");
  }

  TEST_CASE("smooth single-mode data converges at second order") {
    StudyConfig c = small_config();
    c.data = parse_data("mode:1");
    c.k = 0.15;
    c.first_level = 2;
    c.last_level = 4;
    const ConvergenceStudy st = run_convergence(c);
    CHECK(std::abs(st.tables[0].last_l2_slope() - 1.0) <= 0.1);
    CHECK(std::abs(st.tables[0].last_h1_slope() - 0.5) <= 0.1);
  }

  TEST_CASE("outputs are written when a directory is given") {
    const auto dir = scratch("convergence");
    StudyConfig c = small_config();
    c.last_level = 2;
    c.out_dir = dir.string();
    const ConvergenceStudy st = run_convergence(c);
    CHECK(slurp(dir / "convergence_s0.5.csv") == convergence_csv(st.tables[0]));
    CHECK(config_from_json(slurp(dir / "config.json")) == c);
    CHECK(std::filesystem::exists(dir / "convergence.json"));
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("sinc study") {
    StudyConfig c;
    c.s_values = {0.5};
    c.sinc_level = 1;
    c.k_values = {0.6, 0.45, 0.3, 0.05};
    c.k_ref = 0.05;
    const SincStudy st = run_sinc_study(c);
    REQUIRE(st.rows.size() == 4);
    CHECK(st.rows.back().error == 0.0);
    for (std::size_t i = 1; i + 1 < st.rows.size(); ++i) CHECK(st.rows[i].error < st.rows[i - 1].error);
    c.k_values = {0.6, 0.45, 0.3};
    const SincStudy st2 = run_sinc_study(c);
    CHECK(st2.strictly_decreasing);
    CHECK(st2.slope < 0.0);
    c.k_ref = 0.7;
    CHECK_THROWS_AS(run_sinc_study(c), std::invalid_argument);
  }

  TEST_CASE("sigma study") {
    StudyConfig c;
    c.first_level = 1;
    c.last_level = 3;
    const SigmaStudy st = run_sigma_study(c);
    REQUIRE(st.rows.size() == 3);
    CHECK(st.rows[0].dev_signed > 0.0);
    CHECK(st.rows[0].dev_generic > 0.0);
    CHECK(st.slope_signed < 0.0);
    CHECK(st.slope_generic < 0.0);
    CHECK(sigma_study_csv(st).rfind("level,dofs,h,sigma_dev_signed,sigma_dev_generic\n", 0) == 0);
  }

  TEST_CASE("solve exports") {
    const auto dir = scratch("solve");
    StudyConfig c = small_config();
    c.last_level = 2;
    c.out_dir = dir.string();
    const SolveReport r = run_solve(c);
    REQUIRE(r.files.size() == 4);
    for (const auto& f : r.files) CHECK(std::filesystem::exists(f));
    const std::string vtk = slurp(dir / "solution.vtk");
    CHECK(vtk.find("UNSTRUCTURED_GRID") != std::string::npos);
    CHECK(vtk.find("SCALARS u double") != std::string::npos);
    CHECK(vtk.find("SCALARS u_exact double") != std::string::npos);
    std::ifstream trace(dir / "trace.csv");
    std::string line;
    int lines = 0;
    std::getline(trace, line);
    CHECK(line == "theta,u_h,u_exact");
    while (std::getline(trace, line)) ++lines;
    CHECK(lines == 512);
    CHECK(read_matrix_market((dir / "mass.mtx").string()).rows() == static_cast<int>(r.dofs));
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("constant fields export all-equal point data") {
    const auto dir = scratch("vtk");
    std::filesystem::create_directories(dir);
    const SurfaceMesh mesh = study_mesh(MeshKind::Cube, 1);
    const Eigen::VectorXd c = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(mesh.n_vertices()), 0.75);
    write_vtk(mesh, (dir / "c.vtk").string(), {{"u", &c}});
    std::ifstream in(dir / "c.vtk");
    std::string tok;
    while (in >> tok && tok != "LOOKUP_TABLE") {
    }
    in >> tok;  // table name
    int count = 0;
    double v = 0.0;
    while (in >> v) {
      CHECK(v == 0.75);
      ++count;
    }
    CHECK(count == static_cast<int>(mesh.n_vertices()));
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("geodesic traces") {
    const Lift lift = make_lift(LiftKind::SignedDistance);
    const SurfaceMesh mesh = study_mesh(MeshKind::Cube, 3);
    const FeSpace space(mesh);
    const ZonalSeries z = ZonalSeries::step(0.5, 2000);
    const SurfaceFunction exact = [&z](const Vec3& y) { return z.value_at(y); };
    const Eigen::VectorXd u = interpolate(space, pullback(lift, exact));
    const auto t = geodesic_trace(mesh, lift, u, exact);
    REQUIRE(t.size() == 512);
    for (std::size_t i = 0; i < t.size(); ++i) {
      CHECK(std::abs(t[i].exact + t[t.size() - 1 - i].exact) <= 1e-12);
      CHECK(std::abs(t[i].value + t[t.size() - 1 - i].value) <= 1e-12);
    }

    // Larger s smooths more.
    const SparseSpd M = assemble_mass(space);
    const SparseSpd A = assemble_stiffness(space);
    const Eigen::VectorXd b = assemble_load_sigma(space, lift, data_function(DataSpec{}));
    const auto u3 = apply_fractional_inverse(SincRule(0.3, 0.3), M, A, b).coefficients;
    const auto u7 = apply_fractional_inverse(SincRule(0.7, 0.3), M, A, b).coefficients;
    CHECK(max_abs_slope(geodesic_trace(mesh, lift, u7)) < max_abs_slope(geodesic_trace(mesh, lift, u3)));
  }
}
