#include "fracsurf/sinc.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "fracsurf/parallel.hpp"

namespace fracsurf {

namespace {

void check_power(double s) {
  if (!(s > 0.0 && s < 1.0)) {
    throw std::invalid_argument("sinc: fractional power must lie in (0, 1), got " + std::to_string(s));
  }
}

void check_spacing(double k) {
  if (!(k > 0.0) || !std::isfinite(k)) {
    throw std::invalid_argument("sinc: spacing must be positive, got " + std::to_string(k));
  }
}

int ceil_count(double x) {
  // Guard against ceil(1 + 1e-16) style round-up on exact integers.
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-12 * std::max(1.0, r)) return static_cast<int>(r);
  return static_cast<int>(std::ceil(x));
}

}  // namespace

Truncation choose_truncation(double s, double k) {
  check_power(s);
  check_spacing(k);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  Truncation t;
  t.N = ceil_count(pi2 / (4.0 * s * k * k));
  t.M = ceil_count(pi2 / (4.0 * (1.0 - s) * k * k));
  return t;
}

SincRule::SincRule(double s, double k) : SincRule(s, k, choose_truncation(s, k).M, choose_truncation(s, k).N) {}

SincRule::SincRule(double s, double k, int M, int N) : s_(s), k_(k), M_(M), N_(N) {
  check_power(s);
  check_spacing(k);
  if (M < 0 || N < 0) throw std::invalid_argument("sinc: truncation counts must be nonnegative");
}

double SincRule::scale() const { return k_ * std::sin(std::numbers::pi * s_) / std::numbers::pi; }

double SincRule::term(int l, double lambda) const {
  const double y = node(l);
  if (y <= 0.0) return scale() * std::exp((1.0 - s_) * y) / (std::exp(y) + lambda);
  return scale() * std::exp(-s_ * y) / (1.0 + lambda * std::exp(-y));
}

double scalar_apply(const SincRule& rule, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("scalar_apply: lambda must be positive");
  // Smallest terms first.
  double sum = 0.0;
  double comp = 0.0;
  for (int l = -rule.M(); l <= rule.N(); ++l) {
    const double y = rule.term(l, lambda) - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

double error_bound_rho(double k, double r, double t, double s, int M, int N) {
  (void)t;  // the indicator depends on the data regularity only through r
  check_spacing(k);
  check_power(s);
  if (!(r < s)) throw std::invalid_argument("error_bound_rho: need r < s");
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double rplus = std::max(0.0, r);
  const double a = pi2 / (2.0 * k);
  return std::exp(-a) / std::sinh(a) + std::exp(-(s - rplus) * N * k) + std::exp(-(1.0 - s) * M * k);
}

FractionalSolve apply_fractional_inverse(const SincRule& rule, const SparseSpd& mass,
                                         const SparseSpd& stiffness, const Eigen::VectorXd& load,
                                         const SolverOptions& solver) {
  const Eigen::Index n = mass.rows();
  if (stiffness.rows() != n || load.size() != n) {
    throw std::invalid_argument("apply_fractional_inverse: dimension mismatch");
  }
  if (!load.allFinite()) throw std::invalid_argument("apply_fractional_inverse: load is not finite");

  FractionalSolve out;
  out.coefficients = Eigen::VectorXd::Zero(n);
  out.load_mean = load.sum();
  if (load.isZero(0.0)) return out;

  const Eigen::VectorXd mass_ones = mass.matrix() * Eigen::VectorXd::Ones(n);
  const double measure = mass_ones.sum();
  const Eigen::VectorXd b = load - (out.load_mean / measure) * mass_ones;

  const int nodes = rule.size();
  std::vector<Eigen::VectorXd> slots(static_cast<std::size_t>(nodes));
  parallel_chunks(static_cast<std::size_t>(nodes), [&](int, std::size_t begin, std::size_t end) {
    MeanZeroResolvent resolvent(mass, stiffness, solver);
    for (std::size_t i = begin; i < end; ++i) {
      const int l = static_cast<int>(i) - rule.M();
      try {
        slots[i] = rule.weight(l) * resolvent.solve(rule.shift(l), b);
      } catch (const std::exception& e) {
        throw FractionalSolveError(l, e.what());
      }
    }
  });

  Eigen::VectorXd comp = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd& sum = out.coefficients;
  for (const Eigen::VectorXd& term : slots) {
    const Eigen::VectorXd y = term - comp;
    const Eigen::VectorXd t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  out.solution_mean = mass_ones.dot(sum);
  out.solves = nodes;
  return out;
}

FeFunction apply_fractional_inverse(const SincRule& rule, const FeSpace& space, const SparseSpd& mass,
                                    const SparseSpd& stiffness, const Eigen::VectorXd& load,
                                    const SolverOptions& solver) {
  return FeFunction{&space, apply_fractional_inverse(rule, mass, stiffness, load, solver).coefficients};
}

}  // namespace fracsurf
