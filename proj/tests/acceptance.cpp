// Acceptance checks 1-9. One PASS/FAIL line each; exit status is the number
// of failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "fracsurf/study.hpp"

using namespace fracsurf;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
  std::printf("%s criterion %d: %s | %s\n", ok ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double target_l2(double s) { return std::min(1.0, 0.25 + s); }
double target_h1(double s) { return std::min(0.5, s - 0.25); }

const ConvergenceTable* table_for(const ConvergenceStudy& st, double s) {
  for (const ConvergenceTable& t : st.tables) {
    if (t.s == s) return &t;
  }
  return nullptr;
}

double max_mean_ratio(const ConvergenceStudy& st) {
  double m = 0.0;
  for (const ConvergenceTable& t : st.tables) {
    for (const ConvergenceRow& r : t.rows) {
      if (r.ok) m = std::max(m, r.mean_ratio);
    }
  }
  return m;
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  StudyConfig base;  // step data, k = 0.15, cube levels 2..5, s in {0.3, 0.5, 0.7}
  base.s_values = {0.3, 0.5, 0.7};
  base.k = 0.15;
  base.mesh = MeshKind::Cube;
  base.first_level = 2;
  base.last_level = 5;
  base.lift = LiftKind::SignedDistance;

  // 1, 2: orthogonal lift.
  const ConvergenceStudy sdf = run_convergence(base);
  {
    bool ok = sdf.complete();
    std::string detail;
    for (double s : base.s_values) {
      const ConvergenceTable* t = table_for(sdf, s);
      const double slope = t ? t->last_l2_slope() : std::nan("");
      const double tol = s == 0.3 ? 0.12 : 0.10;
      ok = ok && std::abs(slope - target_l2(s)) <= tol;
      detail += fmt("s=%.1f ", s) + fmt("slope %.4f ", slope) + fmt("(target %.2f", target_l2(s)) +
                fmt(" +-%.2f); ", tol);
    }
    report(1, ok, "L2 last-segment slope vs DoFs, step data, orthogonal lift", detail);
  }
  {
    bool ok = sdf.complete();
    std::string detail;
    for (double s : base.s_values) {
      const ConvergenceTable* t = table_for(sdf, s);
      if (s < 0.5) {
        bool monotone = t != nullptr;
        const auto rows = t ? t->completed() : std::vector<ConvergenceRow>{};
        for (std::size_t i = 1; i < rows.size(); ++i) monotone = monotone && rows[i].h1_error <= rows[i - 1].h1_error;
        ok = ok && monotone;
        detail += fmt("s=%.1f H1 errors ", s) + (monotone ? "non-increasing; " : "increase; ");
      } else {
        const double slope = t ? t->last_h1_slope() : std::nan("");
        ok = ok && std::abs(slope - target_h1(s)) <= 0.10;
        detail += fmt("s=%.1f ", s) + fmt("slope %.4f ", slope) + fmt("(target %.2f +-0.10); ", target_h1(s));
      }
    }
    report(2, ok, "H1 last-segment slope vs DoFs", detail);
  }

  // 3: six-patch lift.
  StudyConfig generic_cfg = base;
  generic_cfg.lift = LiftKind::GenericSixPatch;
  const ConvergenceStudy gen = run_convergence(generic_cfg);
  {
    bool ok = gen.complete();
    std::string detail;
    for (double s : base.s_values) {
      const double a = table_for(sdf, s)->last_l2_slope();
      const double b = table_for(gen, s)->last_l2_slope();
      ok = ok && std::abs(a - b) <= 0.12;
      detail += fmt("s=%.1f ", s) + fmt("generic %.4f ", b) + fmt("vs %.4f; ", a);
    }
    report(3, ok, "six-patch lift L2 slopes match orthogonal lift within 0.12", detail);
  }

  // 4: sigma decay.
  {
    StudyConfig c = base;
    const SigmaStudy st = run_sigma_study(c);
    const bool ok = std::abs(st.slope_signed + 1.0) <= 0.15 && std::abs(st.slope_generic + 0.5) <= 0.15;
    report(4, ok, "max|sigma-1| slope vs DoFs, levels 2..5",
           fmt("orthogonal %.4f (target -1 +-0.15), ", st.slope_signed) +
               fmt("six-patch %.4f (target -0.5 +-0.15)", st.slope_generic));
  }

  // 5: scalar sinc symbol.
  {
    double worst = 0.0;
    for (double s : {0.3, 0.5, 0.7}) {
      const SincRule rule(s, 0.1);
      for (int m = -1; m <= 6; ++m) {
        const long double lam = std::pow(10.0L, m);
        const long double exact = std::pow(lam, -static_cast<long double>(s));
        const double q = scalar_apply(rule, static_cast<double>(lam));
        worst = std::max(worst, static_cast<double>(std::abs((q - exact) / exact)));
      }
    }
    report(5, worst <= 1e-5, "scalar sinc relative error, k = 0.1, lambda = 10^-1..10^6",
           fmt("max relative error %.3e (limit 1e-5)", worst));
  }

  // 6: spectral exactness on a small mesh.
  {
    const SurfaceMesh mesh = study_mesh(MeshKind::Cube, 2);
    const FeSpace space(mesh);
    const SparseSpd M = assemble_mass(space);
    const SparseSpd A = assemble_stiffness(space);
    const Eigen::MatrixXd Md = M.to_dense();
    const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A.to_dense(), Md);
    double worst = 0.0;
    for (double s : base.s_values) {
      const SincRule rule(s, base.k);
      for (Eigen::Index j = 1; j < es.eigenvalues().size(); ++j) {
        const Eigen::VectorXd psi = es.eigenvectors().col(j);
        const Eigen::VectorXd u = apply_fractional_inverse(rule, M, A, Md * psi).coefficients;
        const Eigen::VectorXd expect = scalar_apply(rule, es.eigenvalues()[j]) * psi;
        worst = std::max(worst, (u - expect).norm() / expect.norm());
      }
    }
    report(6, mesh.n_vertices() <= 200 && worst <= 1e-9, "fractional inverse on generalized eigenpairs",
           fmt("%.0f DoFs, ", static_cast<double>(mesh.n_vertices())) +
               fmt("max relative deviation %.3e (limit 1e-9)", worst));
  }

  // 7: zero mean over every run of 1-3.
  {
    const double m = std::max(max_mean_ratio(sdf), max_mean_ratio(gen));
    report(7, m <= 1e-7 && sdf.complete() && gen.complete(), "|1^T M U_k| / (||b|| ||1||) over runs 1-3",
           fmt("max %.3e (limit 1e-7)", m));
  }

  // 8: Rayleigh quotient of x3 and total area.
  {
    const Lift lift = make_lift(LiftKind::SignedDistance);
    bool ok = true;
    std::string rq_ratios;
    std::string area_ratios;
    double prev_rq = 0.0;
    double prev_area = 0.0;
    for (int level = 1; level <= 5; ++level) {
      const SurfaceMesh mesh = study_mesh(MeshKind::Cube, level);
      const FeSpace space(mesh);
      const Eigen::VectorXd x3 = interpolate(space, [](const Vec3& x) { return x.z(); });
      const double rq_err =
          std::abs(assemble_stiffness(space).quadratic_form(x3) / assemble_mass(space).quadratic_form(x3) - 2.0);
      const double area_err = std::abs(total_measure(mesh, 6) - 4.0 * std::numbers::pi);
      if (level > 1) {
        const double r1 = prev_rq / rq_err;
        const double r2 = prev_area / area_err;
        ok = ok && r1 >= 3.5 && r1 <= 4.5 && r2 >= 3.5 && r2 <= 4.5;
        rq_ratios += fmt(" %.3f", r1);
        area_ratios += fmt(" %.3f", r2);
      }
      prev_rq = rq_err;
      prev_area = area_err;
    }
    (void)lift;
    report(8, ok, "Rayleigh quotient of x3 -> 2 and area -> 4pi at O(h^2)",
           "RQ error ratios" + rq_ratios + "; area deficit ratios" + area_ratios + " (band 3.5..4.5)");
  }

  // 9: sinc self-convergence.
  {
    StudyConfig c = base;
    c.s_values = {0.5};
    c.k_values = {0.6, 0.45, 0.3};
    c.k_ref = 0.05;
    c.sinc_level = 3;
    const SincStudy st = run_sinc_study(c);
    const double target = std::numbers::pi * std::numbers::pi / 4.0;
    const double mag = -st.slope;
    const bool ok = st.strictly_decreasing && st.slope < 0.0 && mag >= 0.5 * target && mag <= 1.5 * target;
    std::string errs;
    for (const SincStudyRow& r : st.rows) errs += fmt(" %.3e", r.error);
    report(9, ok, "sinc self-convergence on level 3, s = 0.5",
           "errors" + errs + fmt("; slope vs 1/k %.4f", st.slope) + fmt(" (magnitude in [%.3f,", 0.5 * target) +
               fmt(" %.3f])", 1.5 * target));
  }

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d of 9 criteria failed, %.1f s\n", failures, secs);
  return failures == 0 ? 0 : 1;
}
