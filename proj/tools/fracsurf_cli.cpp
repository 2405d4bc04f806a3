// fracsurf command line: convergence, sinc and sigma studies, single solves.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "fracsurf/study.hpp"

using namespace fracsurf;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kPartial = 2;

struct Flags {
  std::string config_path;
  std::vector<double> s;
  double k = 0.0;
  std::string levels;
  std::string mesh;
  std::string lift;
  std::string data;
  int quad = 0;
  std::string solver;
  std::string out;
  int trunc = 0;
  std::vector<double> k_values;
  double k_ref = 0.0;
  int level = -1;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config_path, "JSON config; flags override it");
  cmd->add_option("--s", f.s, "fractional order(s), comma separated")->delimiter(',');
  cmd->add_option("--k", f.k, "sinc spacing");
  cmd->add_option("--levels", f.levels, "refinement levels A..B");
  cmd->add_option("--mesh", f.mesh, "cube | ico");
  cmd->add_option("--lift", f.lift, "sdf | generic");
  cmd->add_option("--data", f.data, "step | mode:<j>");
  cmd->add_option("--quad", f.quad, "assembly quadrature points per direction");
  cmd->add_option("--solver", f.solver, "direct | cg:<tol>");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--trunc", f.trunc, "truncation of the reference series");
}

StudyConfig build_config(const Flags& f) {
  StudyConfig c;
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) throw std::invalid_argument("cannot read config " + f.config_path);
    std::stringstream text;
    text << in.rdbuf();
    c = config_from_json(text.str());
  }
  if (!f.s.empty()) c.s_values = f.s;
  if (f.k != 0.0) c.k = f.k;
  if (!f.levels.empty()) std::tie(c.first_level, c.last_level) = parse_levels(f.levels);
  if (!f.mesh.empty()) c.mesh = parse_mesh_kind(f.mesh);
  if (!f.lift.empty()) c.lift = parse_lift_kind(f.lift);
  if (!f.data.empty()) c.data = parse_data(f.data);
  if (f.quad != 0) c.assembly_order = f.quad;
  if (!f.solver.empty()) parse_solver(f.solver, c);
  if (!f.out.empty()) c.out_dir = f.out;
  if (f.trunc != 0) c.truncation = f.trunc;
  if (!f.k_values.empty()) c.k_values = f.k_values;
  if (f.k_ref != 0.0) c.k_ref = f.k_ref;
  if (f.level >= 0) c.sinc_level = f.level;
  validate(c);
  return c;
}

int converge(const StudyConfig& c) {
  const ConvergenceStudy study = run_convergence(c);
  for (const ConvergenceTable& t : study.tables) {
    std::printf("s = %g\n%s", t.s, convergence_csv(t).c_str());
    for (const ConvergenceRow& r : t.rows) {
      if (!r.ok) std::fprintf(stderr, "s = %g level %d failed: %s\n", t.s, r.level, r.failure.c_str());
    }
  }
  std::printf("elapsed %.2f s\n", study.elapsed_seconds);
  return study.complete() ? kOk : kPartial;
}

int sinc_study(const StudyConfig& c) {
  const SincStudy study = run_sinc_study(c);
  std::printf("s = %g, level %d, %zu dofs, k_ref = %g\n%s", study.s, study.level, study.dofs, study.k_ref,
              sinc_study_csv(study).c_str());
  std::printf("slope vs 1/k: %.4f\n", study.slope);
  if (!study.strictly_decreasing) {
    std::fprintf(stderr, "errors are not strictly decreasing in k\n");
    return kPartial;
  }
  return kOk;
}

int sigma_study(const StudyConfig& c) {
  const SigmaStudy study = run_sigma_study(c);
  std::printf("%s", sigma_study_csv(study).c_str());
  std::printf("slope sdf %.4f, generic %.4f\n", study.slope_signed, study.slope_generic);
  return kOk;
}

int solve(const StudyConfig& c) {
  const SolveReport r = run_solve(c);
  std::printf("s = %g, level %d, %zu dofs: l2 %.6e, h1 %.6e\n", r.s, r.level, r.dofs, r.errors.l2,
              r.errors.h1);
  for (const std::string& f : r.files) std::printf("wrote %s\n", f.c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fractional Laplace-Beltrami solver on the unit sphere"};
  app.require_subcommand(1);
  Flags flags;
  CLI::App* conv = app.add_subcommand("converge", "error table over refinement levels");
  CLI::App* sinc = app.add_subcommand("sinc-study", "sinc self-convergence on a fixed mesh");
  CLI::App* sigma = app.add_subcommand("sigma-study", "area ratio deviation for both lifts");
  CLI::App* one = app.add_subcommand("solve", "single solve with VTK/CSV export");
  for (CLI::App* cmd : {conv, sinc, sigma, one}) add_common(cmd, flags);
  sinc->add_option("--k-values", flags.k_values, "spacings to compare")->delimiter(',');
  sinc->add_option("--k-ref", flags.k_ref, "reference spacing");
  sinc->add_option("--level", flags.level, "mesh level");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  StudyConfig config;
  try {
    config = build_config(flags);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  }
  try {
    if (conv->parsed()) return converge(config);
    if (sinc->parsed()) return sinc_study(config);
    if (sigma->parsed()) return sigma_study(config);
    return solve(config);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "failed: %s\n", e.what());
    return kPartial;
  }
}
