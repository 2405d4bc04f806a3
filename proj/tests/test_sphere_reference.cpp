#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "fracsurf/fem.hpp"
#include "fracsurf/sphere_reference.hpp"

using namespace fracsurf;

namespace {

constexpr double kPi = std::numbers::pi;

// P_j(t) in extended precision by the same three-term recurrence.
std::vector<long double> legendre_ld(int jmax, long double t) {
  std::vector<long double> p(static_cast<std::size_t>(jmax) + 1);
  p[0] = 1.0L;
  if (jmax >= 1) p[1] = t;
  for (int j = 1; j < jmax; ++j) p[j + 1] = ((2.0L * j + 1.0L) * t * p[j] - j * p[j - 1]) / (j + 1.0L);
  return p;
}

Vec3 on_sphere(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

}  // namespace

TEST_SUITE("sphere_reference") {
  TEST_CASE("step data") {
    CHECK(step_eval(Vec3(0, 0, 1)) == 1.0);
    CHECK(step_eval(Vec3(0, 0, -1)) == -1.0);
    CHECK(step_eval(Vec3(1, 0, 0)) == 1.0);
    CHECK_THROWS_AS(step_eval(Vec3(0, 0, 0.9)), std::invalid_argument);
  }

  TEST_CASE("legendre values") {
    std::vector<double> p(11);
    legendre_pack(10, 1.0, p);
    for (double v : p) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
    legendre_pack(10, 0.0, p);
    CHECK(p[2] == -0.5);
  }

  TEST_CASE("legendre polynomials are bounded by one") {
    const int jmax = 10000;
    std::vector<double> p(jmax + 1);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const double t = -1.0 + 2.0 * i / 999.0;
      legendre_pack(jmax, t, p);
      for (double v : p) worst = std::max(worst, std::abs(v));
    }
    CHECK(worst <= 1.0 + 1e-12);
  }

  TEST_CASE("legendre recurrence agrees with extended precision") {
    const int jmax = 10000;
    std::vector<double> p(jmax + 1);
    std::vector<double> dp(jmax + 1);
    for (double t : {-0.99, -0.5, 0.013, 0.37, 0.8, 0.99}) {
      legendre_pack(jmax, t, p, dp);
      const auto ref = legendre_ld(jmax, t);
      const double theta = std::acos(t);
      for (int j : {100, 1000, 5000, 10000}) {
        // Stieltjes envelope of |P_j|; relative error measured against it.
        const double env = std::sqrt(2.0 / (kPi * j * std::sin(theta)));
        CHECK(std::abs(p[j] - static_cast<double>(ref[j])) <= 1e-10 * env);
        const long double dref = j * (t * ref[j] - ref[j - 1]) / (static_cast<long double>(t) * t - 1.0L);
        CHECK(std::abs(dp[j] - static_cast<double>(dref)) <= 1e-10 * j * env / std::sin(theta));
      }
    }
  }

  TEST_CASE("step coefficients") {
    const auto f = step_coefficients(10000);
    CHECK(f[1] == doctest::Approx(std::sqrt(3.0 * kPi)).epsilon(1e-15));
    for (int j = 0; j <= 10000; j += 2) CHECK(f[j] == 0.0);

    // Numeric quadrature oracle: f_j = 2 pi zeta_j-normalization * 2 int_0^1 P_j.
    std::vector<double> x;
    std::vector<double> w;
    gauss_legendre(40, x, w);
    for (int j : {1, 3, 5, 21, 45, 77}) {
      long double integral = 0.0L;
      for (std::size_t i = 0; i < x.size(); ++i) integral += w[i] * legendre_ld(j, x[i])[j];
      const double oracle = 2.0 * kPi * std::sqrt((2.0 * j + 1.0) / (4.0 * kPi)) * 2.0 * static_cast<double>(integral);
      CHECK(f[j] == doctest::Approx(oracle).epsilon(1e-12));
    }
  }

  TEST_CASE("parseval identity with a small tail") {
    const auto f = step_coefficients(10000);
    long double sum = 0.0L;
    for (double v : f) sum += static_cast<long double>(v) * v;
    const double ratio = static_cast<double>(sum) / (4.0 * kPi);
    CHECK(ratio < 1.0);
    CHECK(1.0 - ratio <= 1e-3);
  }

  TEST_CASE("exact solution parity") {
    for (double s : {0.3, 0.5, 0.7}) {
      const ZonalSeries u = ZonalSeries::step(s);
      CHECK(std::abs(u.value(kPi / 2)) <= 1e-12);
      for (double theta : {0.0, 0.1, 0.7, 1.3}) {
        CHECK(std::abs(u.value(kPi - theta) + u.value(theta)) <= 1e-12);
      }
      CHECK(exact_solution(0.7, s) == u.value(0.7));
    }
  }

  TEST_CASE("smoothing is monotone in s") {
    double prev = std::numeric_limits<double>::infinity();
    for (double s : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      const ZonalSeries u = ZonalSeries::step(s);
      double norm = 0.0;
      for (double c : u.solution_coefficients()) norm += c * c;
      CHECK(norm <= prev);
      prev = norm;
    }
  }

  TEST_CASE("series truncation has converged") {
    for (double s : {0.3, 0.5, 0.7}) {
      const ZonalSeries a = ZonalSeries::step(s, 10000);
      const ZonalSeries b = ZonalSeries::step(s, 20000);
      for (double theta : {kPi / 4, kPi / 3}) CHECK(std::abs(a.value(theta) - b.value(theta)) <= 1e-6);
    }
  }

  TEST_CASE("gradients") {
    for (double s : {0.3, 0.7}) {
      const ZonalSeries u = ZonalSeries::step(s);
      const ZonalSeries u_short = ZonalSeries::step(s, 200);
      CHECK(u.gradient_at(Vec3(0, 0, 1)).norm() == 0.0);
      CHECK(u.gradient_at(Vec3(0, 0, -1)).norm() == 0.0);
      CHECK(exact_gradient(0.0, 0.3, s).norm() == 0.0);
      for (double theta : {0.3, 1.1, 2.0}) {
        for (double phi : {0.0, 1.0, 4.0}) {
          const Vec3 x = on_sphere(theta, phi);
          const Vec3 g = u.gradient_at(x);
          CHECK(std::abs(g.dot(x)) <= 1e-12);
          // Finite differences resolve a short series only.
          const double h = 1e-5;
          const double fd = (u_short.value(theta + h) - u_short.value(theta - h)) / (2 * h);
          CHECK(u_short.d_dtheta(theta) == doctest::Approx(fd).epsilon(1e-7));
          const Vec3 e_theta(std::cos(theta) * std::cos(phi), std::cos(theta) * std::sin(phi), -std::sin(theta));
          CHECK((g - u.d_dtheta(theta) * e_theta).norm() <= 1e-12 * (1.0 + g.norm()));
          CHECK((exact_gradient(theta, phi, s) - g).norm() <= 1e-12 * (1.0 + g.norm()));
        }
      }
    }
  }

  TEST_CASE("single mode series") {
    const double s = 0.95;
    const ZonalSeries u = ZonalSeries::single_mode(1, s);
    const double c = std::pow(2.0, -s) * std::sqrt(3.0 / (4.0 * kPi));
    for (double theta : {0.2, 1.0, 2.5}) {
      CHECK(u.d_dtheta(theta) == doctest::Approx(-c * std::sin(theta)).epsilon(1e-14));
      CHECK(u.value(theta) == doctest::Approx(c * std::cos(theta)).epsilon(1e-14));
      CHECK(u.data_value(theta) == doctest::Approx(std::sqrt(3.0 / (4.0 * kPi)) * std::cos(theta)).epsilon(1e-14));
    }
  }

  TEST_CASE("near s = 1 the series matches a dense finite element solve") {
    // -Laplace w = step, w with zero mean, from a dense generalized
    // eigendecomposition on a fine mesh; compared at the north pole.
    const double s = 1.0 - 1e-9;
    const double series_value = ZonalSeries::step(s).value(0.0);
    const Lift lift = Lift::signed_distance(3);
    double prev_err = std::numeric_limits<double>::infinity();
    for (int level = 2; level <= 3; ++level) {
      const SurfaceMesh mesh = sphere_mesh(InitialMesh::CubeQuads, level, lift);
      const FeSpace space(mesh);
      const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(assemble_stiffness(space).to_dense(),
                                                                          assemble_mass(space).to_dense());
      const Eigen::VectorXd b =
          assemble_load_sigma(space, lift, [](const Vec3& y) { return step_eval(y); }, 6);
      Eigen::VectorXd w = Eigen::VectorXd::Zero(b.size());
      for (Eigen::Index j = 1; j < b.size(); ++j) {
        w += es.eigenvectors().col(j) * (es.eigenvectors().col(j).dot(b) / es.eigenvalues()[j]);
      }
      Eigen::Index pole = 0;
      for (Eigen::Index i = 0; i < b.size(); ++i) {
        if ((mesh.vertex(i) - Vec3::UnitZ()).norm() < 1e-12) pole = i;
      }
      REQUIRE((mesh.vertex(pole) - Vec3::UnitZ()).norm() < 1e-12);
      const double err = std::abs(w[pole] - series_value);
      CHECK(err < prev_err);
      prev_err = err;
    }
    CHECK(prev_err <= 0.02 * std::abs(series_value));
  }
}
