#include "fracsurf/sphere_reference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fracsurf {

double step_eval(const Vec3& x) {
  if (std::abs(x.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("step_eval: point is not on the unit sphere");
  }
  return x.z() >= 0.0 ? 1.0 : -1.0;
}

void legendre_pack(int jmax, double t, std::span<double> p, std::span<double> dp) {
  if (jmax < 0) throw std::invalid_argument("legendre_pack: negative degree");
  if (!(std::abs(t) <= 1.0)) throw std::invalid_argument("legendre_pack: |t| must be <= 1");
  const auto need = static_cast<std::size_t>(jmax) + 1;
  if (p.size() < need || (!dp.empty() && dp.size() < need)) {
    throw std::invalid_argument("legendre_pack: output span too small");
  }
  p[0] = 1.0;
  if (jmax >= 1) p[1] = t;
  for (int j = 1; j < jmax; ++j) {
    p[j + 1] = ((2.0 * j + 1.0) * t * p[j] - j * p[j - 1]) / (j + 1.0);
  }
  if (dp.empty()) return;
  // P'_{j+1} = P'_{j-1} + (2j + 1) P_j has no 1 - t^2 division, so the
  // endpoints need no special treatment.
  dp[0] = 0.0;
  if (jmax >= 1) dp[1] = 1.0;
  for (int j = 1; j < jmax; ++j) dp[j + 1] = dp[j - 1] + (2.0 * j + 1.0) * p[j];
}

double zonal_normalization(int j) { return std::sqrt((2.0 * j + 1.0) / (4.0 * std::numbers::pi)); }

std::vector<double> step_coefficients(int J) {
  if (J < 1) throw std::invalid_argument("step_coefficients: J must be >= 1");
  // P_n(0): P_0 = 1, P_{n+1}(0) = -n / (n + 1) P_{n-1}(0), zero for odd n.
  std::vector<double> p0(static_cast<std::size_t>(J) + 2, 0.0);
  p0[0] = 1.0;
  for (int n = 1; n + 1 <= J + 1; n += 2) p0[n + 1] = -static_cast<double>(n) / (n + 1.0) * p0[n - 1];

  std::vector<double> f(static_cast<std::size_t>(J) + 1, 0.0);
  for (int j = 1; j <= J; j += 2) {
    // int_{-1}^{1} sign(t) P_j = 2 int_0^1 P_j = 2 (P_{j-1}(0) - P_{j+1}(0)) / (2j + 1).
    const double integral = 2.0 * (p0[j - 1] - p0[j + 1]) / (2.0 * j + 1.0);
    f[j] = 2.0 * std::numbers::pi * zonal_normalization(j) * integral;
  }
  return f;
}

ZonalSeries::ZonalSeries(std::vector<double> data, double s) : data_(std::move(data)), s_(s) {
  if (data_.size() < 2) throw std::invalid_argument("ZonalSeries: need at least one mode");
  if (data_[0] != 0.0) throw std::invalid_argument("ZonalSeries: data must have zero mean");
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("ZonalSeries: s must lie in (0, 1)");
  solution_.assign(data_.size(), 0.0);
  for (std::size_t j = 1; j < data_.size(); ++j) {
    if (data_[j] == 0.0) continue;
    solution_[j] = std::pow(eigenvalue(static_cast<int>(j)), -s) * data_[j];
    active_.push_back(static_cast<int>(j));
  }
  data_scaled_.assign(data_.size(), 0.0);
  solution_scaled_.assign(data_.size(), 0.0);
  for (int j : active_) {
    data_scaled_[j] = data_[j] * zonal_normalization(j);
    solution_scaled_[j] = solution_[j] * zonal_normalization(j);
  }
  rec_a_.assign(data_.size(), 0.0);
  rec_b_.assign(data_.size(), 0.0);
  for (std::size_t j = 1; j < data_.size(); ++j) {
    rec_a_[j] = (2.0 * j + 1.0) / (j + 1.0);
    rec_b_[j] = static_cast<double>(j) / (j + 1.0);
  }
}

ZonalSeries ZonalSeries::step(double s, int J) {
  ZonalSeries z(step_coefficients(J), s);
  z.equatorial_jump_ = true;
  return z;
}

ZonalSeries ZonalSeries::single_mode(int j, double s) {
  if (j < 1) throw std::invalid_argument("ZonalSeries::single_mode: degree must be >= 1");
  std::vector<double> data(static_cast<std::size_t>(j) + 1, 0.0);
  data[static_cast<std::size_t>(j)] = 1.0;
  return ZonalSeries(std::move(data), s);
}

double ZonalSeries::sum(double t, const std::vector<double>& coeffs, double* derivative) const {
  t = std::clamp(t, -1.0, 1.0);
  if (active_.empty()) {
    if (derivative) *derivative = 0.0;
    return 0.0;
  }
  const int jmax = active_.back();
  // Recurrence and compensated accumulation in one pass, degree ascending.
  double p_prev = 1.0;
  double p = t;
  double dp_prev = 0.0;
  double dp = 1.0;
  double value = coeffs[0];
  double value_c = 0.0;
  double deriv = 0.0;
  double deriv_c = 0.0;
  for (int j = 1;; ++j) {
    const double a = coeffs[j];
    if (a != 0.0) {
      const double y = a * p - value_c;
      const double s = value + y;
      value_c = (s - value) - y;
      value = s;
      if (derivative) {
        const double yd = a * dp - deriv_c;
        const double sd = deriv + yd;
        deriv_c = (sd - deriv) - yd;
        deriv = sd;
      }
    }
    if (j == jmax) break;
    const double p_next = rec_a_[j] * t * p - rec_b_[j] * p_prev;
    if (derivative) {
      const double dp_next = dp_prev + (2.0 * j + 1.0) * p;
      dp_prev = dp;
      dp = dp_next;
    }
    p_prev = p;
    p = p_next;
  }
  if (derivative) *derivative = deriv;
  return value;
}

double ZonalSeries::value_at_t(double t) const { return sum(t, solution_scaled_, nullptr); }

void ZonalSeries::value_and_derivative_at_t(double t, double& value, double& derivative) const {
  value = sum(t, solution_scaled_, &derivative);
}

double ZonalSeries::value(double theta) const { return value_at_t(std::cos(theta)); }

double ZonalSeries::d_dtheta(double theta) const {
  double v = 0.0;
  double d = 0.0;
  value_and_derivative_at_t(std::cos(theta), v, d);
  return -std::sin(theta) * d;
}

double ZonalSeries::data_value(double theta) const { return sum(std::cos(theta), data_scaled_, nullptr); }

double ZonalSeries::value_at(const Vec3& x) const { return value_at_t(x.z() / x.norm()); }

void ZonalSeries::value_and_gradient_at(const Vec3& x, double& value, Vec3& gradient) const {
  const Vec3 n = x / x.norm();
  double d = 0.0;
  value_and_derivative_at_t(n.z(), value, d);
  // The tangential gradient of t = x3 is e3 - t n; it vanishes at the poles.
  const Vec3 tangent = Vec3::UnitZ() - n.z() * n;
  gradient = std::abs(n.z()) == 1.0 ? Vec3::Zero() : Vec3(d * tangent);
}

Vec3 ZonalSeries::gradient_at(const Vec3& x) const {
  double v = 0.0;
  Vec3 g;
  value_and_gradient_at(x, v, g);
  return g;
}

double exact_solution(double theta, double s, int J) { return ZonalSeries::step(s, J).value(theta); }

Vec3 exact_gradient(double theta, double phi, double s, int J) {
  const Vec3 x(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta));
  return ZonalSeries::step(s, J).gradient_at(x);
}

}  // namespace fracsurf
