#pragma once

#include <stdexcept>
#include <string>

#include "fracsurf/fem.hpp"
#include "fracsurf/sparse_solver.hpp"

namespace fracsurf {

struct Truncation {
  int M = 0;  // nodes on the left (y < 0)
  int N = 0;  // nodes on the right (y > 0)
};

/// Truncation counts that balance the three sinc quadrature errors:
/// N = ceil(pi^2 / (4 s k^2)), M = ceil(pi^2 / (4 (1 - s) k^2)).
Truncation choose_truncation(double s, double k);

/// Sinc quadrature for lambda^{-s} in the variable y = log(mu):
///   lambda^{-s} ~ sum_{l=-M}^{N} w_l / (mu_l + lambda),
/// y_l = k l, mu_l = e^{y_l}, w_l = (k sin(pi s) / pi) e^{(1-s) y_l}.
class SincRule {
 public:
  /// M and N from choose_truncation.
  SincRule(double s, double k);
  SincRule(double s, double k, int M, int N);

  double s() const { return s_; }
  double k() const { return k_; }
  int M() const { return M_; }
  int N() const { return N_; }
  int size() const { return M_ + N_ + 1; }

  double node(int l) const { return k_ * l; }
  double shift(int l) const { return std::exp(node(l)); }
  double weight(int l) const { return scale() * std::exp((1.0 - s_) * node(l)); }

  /// k sin(pi s) / pi.
  double scale() const;

  /// w_l / (mu_l + lambda), evaluated without overflow for large y_l.
  double term(int l, double lambda) const;

 private:
  double s_;
  double k_;
  int M_;
  int N_;
};

/// q_k(lambda) = sum_l w_l / (mu_l + lambda), the scalar symbol of the rule.
double scalar_apply(const SincRule& rule, double lambda);

/// Sinc error indicator
///   e^{-pi^2/(2k)} / sinh(pi^2/(2k)) + e^{-(s - r+) N k} + e^{-(1-s) M k}.
double error_bound_rho(double k, double r, double t, double s, int M, int N);

class FractionalSolveError : public SolveError {
 public:
  FractionalSolveError(int node, const std::string& what)
      : SolveError("sinc node " + std::to_string(node) + ": " + what), node_(node) {}
  int node() const { return node_; }

 private:
  int node_;
};

struct FractionalSolve {
  Eigen::VectorXd coefficients;  // U_k
  double load_mean = 0.0;        // 1^T b before projection
  double solution_mean = 0.0;    // 1^T M U_k
  int solves = 0;
};

/// U_k = sum_l w_l U^l with (mu_l M + A) U^l = b, for a load b of
/// mean-zero data. The constant component of b (quadrature noise) is
/// removed first, so every U^l and U_k have zero mean. Nodes are solved in
/// parallel into per-node slots and reduced serially from l = -M to N with
/// compensated summation.
FractionalSolve apply_fractional_inverse(const SincRule& rule, const SparseSpd& mass,
                                         const SparseSpd& stiffness, const Eigen::VectorXd& load,
                                         const SolverOptions& solver = {});

FeFunction apply_fractional_inverse(const SincRule& rule, const FeSpace& space, const SparseSpd& mass,
                                    const SparseSpd& stiffness, const Eigen::VectorXd& load,
                                    const SolverOptions& solver = {});

}  // namespace fracsurf
