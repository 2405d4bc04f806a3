#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/SparseCholesky>

#include "fracsurf/fem.hpp"

namespace fracsurf {

class SolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// CG ran out of iterations; carries the best iterate found.
class ConvergenceError : public SolveError {
 public:
  ConvergenceError(const std::string& what, Eigen::VectorXd best, double residual, int iterations)
      : SolveError(what), best_(std::move(best)), residual_(residual), iterations_(iterations) {}
  const Eigen::VectorXd& best_iterate() const { return best_; }
  double relative_residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  Eigen::VectorXd best_;
  double residual_;
  int iterations_;
};

struct SolverOptions {
  enum class Kind { Direct, Cg };
  Kind kind = Kind::Direct;
  double tol = 1e-10;  // relative residual for CG
  int max_iterations = 20000;
};

/// (shift M + A) U = b with M SPD and A symmetric positive semi-definite.
struct ShiftedSystem {
  const SparseSpd* mass = nullptr;
  const SparseSpd* stiffness = nullptr;
  double shift = 1.0;
};

/// Sparse Cholesky factor of shift M + A. The fill-reducing ordering and
/// symbolic analysis are computed once (on the pattern of M + A) and reused
/// by every refactorization.
class CholeskyFactor {
 public:
  CholeskyFactor(const SparseSpd& mass, const SparseSpd& stiffness);
  CholeskyFactor(const CholeskyFactor&) = delete;
  CholeskyFactor& operator=(const CholeskyFactor&) = delete;

  /// Numeric factorization of shift M + A. With `pinned`, row and column
  /// `pinned` are replaced by the identity (same sparsity pattern).
  void factorize(double shift, std::optional<int> pinned = std::nullopt);

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

  double shift() const { return shift_; }
  std::optional<int> pinned() const { return pinned_; }
  int size() const { return static_cast<int>(mass_.rows()); }

 private:
  Eigen::SparseMatrix<double> mass_;
  Eigen::SparseMatrix<double> stiffness_;
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> llt_;
  double shift_ = 0.0;
  std::optional<int> pinned_;
  bool factored_ = false;
};

std::unique_ptr<CholeskyFactor> factorize(const ShiftedSystem& system);
Eigen::VectorXd solve(const CholeskyFactor& factor, const Eigen::VectorXd& b);

struct CgResult {
  Eigen::VectorXd solution;
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Jacobi-preconditioned conjugate gradients on (shift M + A) U = b.
CgResult solve_cg(const SparseSpd& mass, const SparseSpd& stiffness, double shift,
                  const Eigen::VectorXd& b, double tol = 1e-10, int max_iterations = 20000);

/// Solves (shift M + A) U = b for mean-zero data (1^T b = 0), returning the
/// solution with 1^T M U = 0.
///
/// Below kGroundingShift the direct path pins one DoF and restores the
/// constant mode with a scalar correction, so tiny shifts never factor the
/// nearly singular shift M + A.
class MeanZeroResolvent {
 public:
  static constexpr double kGroundingShift = 1.0;

  MeanZeroResolvent(const SparseSpd& mass, const SparseSpd& stiffness, SolverOptions options = {});

  Eigen::VectorXd solve(double shift, const Eigen::VectorXd& b);

  /// 1^T M, and its sum (the measure of the discrete surface).
  const Eigen::VectorXd& mass_row_sums() const { return mass_ones_; }
  double measure() const { return measure_; }

  int last_cg_iterations() const { return last_cg_iterations_; }

 private:
  const SparseSpd* mass_;
  const SparseSpd* stiffness_;
  SolverOptions options_;
  std::unique_ptr<CholeskyFactor> factor_;
  Eigen::VectorXd mass_ones_;
  double measure_ = 0.0;
  int last_cg_iterations_ = 0;
};

}  // namespace fracsurf
