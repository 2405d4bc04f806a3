#pragma once

#include <span>
#include <vector>

#include "fracsurf/types.hpp"

namespace fracsurf {

inline constexpr int kDefaultTruncation = 10000;

/// +1 on the closed upper hemisphere (x3 >= 0), -1 below.
double step_eval(const Vec3& x);

/// P_0..P_jmax at t, and optionally their derivatives, by the three-term
/// recurrence. Spans must hold jmax + 1 entries.
void legendre_pack(int jmax, double t, std::span<double> p, std::span<double> dp = {});

/// Zonal coefficients (f, zeta_j) of the step data for j = 0..J, with
/// zeta_j(theta) = sqrt((2j + 1) / (4 pi)) P_j(cos theta). Even modes are
/// exactly zero.
std::vector<double> step_coefficients(int J);

/// Normalization sqrt((2j + 1) / (4 pi)) of the zonal harmonic of degree j.
double zonal_normalization(int j);

/// Truncated zonal expansion of the data f and of u = (-Laplace)^{-s} f on
/// the unit sphere, with eigenvalues j (j + 1).
class ZonalSeries {
 public:
  /// data[j] = (f, zeta_j) for j = 0..J. data[0] must be zero.
  ZonalSeries(std::vector<double> data, double s);

  static ZonalSeries step(double s, int J = kDefaultTruncation);
  static ZonalSeries single_mode(int j, double s);

  int truncation() const { return static_cast<int>(data_.size()) - 1; }
  double s() const { return s_; }
  /// True for the step data: u is not smooth across the equator.
  bool equatorial_jump() const { return equatorial_jump_; }
  static double eigenvalue(int j) { return static_cast<double>(j) * (j + 1.0); }
  double data_coefficient(int j) const { return data_[j]; }
  double solution_coefficient(int j) const { return solution_[j]; }
  const std::vector<double>& solution_coefficients() const { return solution_; }

  /// u as a function of t = cos(theta), and du/dt.
  double value_at_t(double t) const;
  void value_and_derivative_at_t(double t, double& value, double& derivative) const;

  double value(double theta) const;
  double d_dtheta(double theta) const;

  /// Value and tangential gradient at a point on the unit sphere.
  double value_at(const Vec3& x) const;
  Vec3 gradient_at(const Vec3& x) const;
  void value_and_gradient_at(const Vec3& x, double& value, Vec3& gradient) const;

  /// Same series with the data coefficients (f instead of u).
  double data_value(double theta) const;

 private:
  double sum(double t, const std::vector<double>& coeffs, double* derivative) const;

  std::vector<double> data_;
  std::vector<double> solution_;
  std::vector<int> active_;  // j with nonzero coefficient
  // Normalized coefficients and three-term recurrence factors.
  std::vector<double> data_scaled_;
  std::vector<double> solution_scaled_;
  std::vector<double> rec_a_;
  std::vector<double> rec_b_;
  double s_;
  bool equatorial_jump_ = false;
};

/// Truncated series of u = (-Laplace)^{-s} step at polar angle theta.
double exact_solution(double theta, double s, int J = kDefaultTruncation);

/// Tangential gradient (du/dtheta) e_theta of the step solution at (theta, phi).
Vec3 exact_gradient(double theta, double phi, double s, int J = kDefaultTruncation);

}  // namespace fracsurf
