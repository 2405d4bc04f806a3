#include "fracsurf/sparse_solver.hpp"

#include <cmath>
#include <memory>

namespace fracsurf {

namespace {

constexpr double kMaxEntry = 1e300;

void check_shift(double shift) {
  if (!(shift > 0.0) || !std::isfinite(shift)) {
    throw std::invalid_argument("shifted solve: shift must be positive and finite, got " +
                                std::to_string(shift));
  }
}

void check_rhs(const Eigen::VectorXd& b, Eigen::Index n) {
  if (b.size() != n) throw std::invalid_argument("shifted solve: right-hand side has wrong size");
  if (!b.allFinite()) throw std::invalid_argument("shifted solve: right-hand side is not finite");
}

}  // namespace

CholeskyFactor::CholeskyFactor(const SparseSpd& mass, const SparseSpd& stiffness)
    : mass_(mass.matrix()), stiffness_(stiffness.matrix()) {
  if (mass.rows() != stiffness.rows()) {
    throw std::invalid_argument("CholeskyFactor: mass and stiffness sizes differ");
  }
  const Eigen::SparseMatrix<double> pattern = mass_ + stiffness_;
  llt_.analyzePattern(pattern);
}

void CholeskyFactor::factorize(double shift, std::optional<int> pinned) {
  check_shift(shift);
  Eigen::SparseMatrix<double> k = shift * mass_ + stiffness_;
  double max_entry = 0.0;
  for (Eigen::Index j = 0; j < k.outerSize(); ++j) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(k, j); it; ++it) {
      if (pinned && (it.row() == *pinned || it.col() == *pinned)) {
        it.valueRef() = it.row() == it.col() ? 1.0 : 0.0;
      }
      max_entry = std::max(max_entry, std::abs(it.value()));
    }
  }
  if (!(max_entry < kMaxEntry)) {
    throw SolveError("shifted solve: matrix entries overflow at shift " + std::to_string(shift));
  }
  llt_.factorize(k);
  factored_ = false;
  if (llt_.info() != Eigen::Success) {
    throw SolveError("shifted solve: non-positive pivot at shift " + std::to_string(shift) +
                     " (matrix is not SPD)");
  }
  shift_ = shift;
  pinned_ = pinned;
  factored_ = true;
}

Eigen::VectorXd CholeskyFactor::solve(const Eigen::VectorXd& b) const {
  if (!factored_) throw SolveError("shifted solve: factor has not been computed");
  check_rhs(b, mass_.rows());
  Eigen::VectorXd x = llt_.solve(b);
  if (llt_.info() != Eigen::Success || !x.allFinite()) {
    throw SolveError("shifted solve: back substitution failed");
  }
  return x;
}

std::unique_ptr<CholeskyFactor> factorize(const ShiftedSystem& system) {
  if (system.mass == nullptr || system.stiffness == nullptr) {
    throw std::invalid_argument("factorize: system is missing a matrix");
  }
  auto factor = std::make_unique<CholeskyFactor>(*system.mass, *system.stiffness);
  factor->factorize(system.shift);
  return factor;
}

Eigen::VectorXd solve(const CholeskyFactor& factor, const Eigen::VectorXd& b) { return factor.solve(b); }

CgResult solve_cg(const SparseSpd& mass, const SparseSpd& stiffness, double shift,
                  const Eigen::VectorXd& b, double tol, int max_iterations) {
  check_shift(shift);
  if (!(tol > 0.0)) throw std::invalid_argument("solve_cg: tolerance must be positive");
  const Eigen::Index n = mass.rows();
  check_rhs(b, n);
  const Eigen::SparseMatrix<double, Eigen::RowMajor> k = shift * mass.matrix() + stiffness.matrix();
  const Eigen::VectorXd inv_diag = k.diagonal().cwiseInverse();

  CgResult result;
  result.solution = Eigen::VectorXd::Zero(n);
  const double bnorm = b.norm();
  if (bnorm == 0.0) return result;

  Eigen::VectorXd& x = result.solution;
  Eigen::VectorXd r = b;
  Eigen::VectorXd z = inv_diag.cwiseProduct(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  double rel = 1.0;
  Eigen::VectorXd best = x;
  double best_rel = 1.0;
  for (int it = 1; it <= max_iterations; ++it) {
    const Eigen::VectorXd kp = k * p;
    const double pkp = p.dot(kp);
    if (!(pkp > 0.0)) {
      throw SolveError("solve_cg: matrix is not positive definite at shift " + std::to_string(shift));
    }
    const double alpha = rz / pkp;
    x += alpha * p;
    r -= alpha * kp;
    rel = r.norm() / bnorm;
    if (rel < best_rel) {
      best_rel = rel;
      best = x;
    }
    if (rel <= tol) {
      // Confirm with the true residual; the recursive one drifts.
      const double true_rel = (b - k * x).norm() / bnorm;
      if (true_rel <= tol) {
        result.iterations = it;
        result.relative_residual = true_rel;
        return result;
      }
      r = b - k * x;
    }
    z = inv_diag.cwiseProduct(r);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  throw ConvergenceError("solve_cg: no convergence after " + std::to_string(max_iterations) +
                             " iterations (relative residual " + std::to_string(best_rel) + ")",
                         std::move(best), best_rel, max_iterations);
}

MeanZeroResolvent::MeanZeroResolvent(const SparseSpd& mass, const SparseSpd& stiffness,
                                     SolverOptions options)
    : mass_(&mass), stiffness_(&stiffness), options_(options) {
  if (mass.rows() != stiffness.rows()) {
    throw std::invalid_argument("MeanZeroResolvent: mass and stiffness sizes differ");
  }
  mass_ones_ = mass.matrix() * Eigen::VectorXd::Ones(mass.rows());
  measure_ = mass_ones_.sum();
  if (options_.kind == SolverOptions::Kind::Direct) {
    factor_ = std::make_unique<CholeskyFactor>(mass, stiffness);
  }
}

Eigen::VectorXd MeanZeroResolvent::solve(double shift, const Eigen::VectorXd& b) {
  check_shift(shift);
  check_rhs(b, mass_->rows());
  Eigen::VectorXd u;
  if (options_.kind == SolverOptions::Kind::Cg) {
    CgResult r = solve_cg(*mass_, *stiffness_, shift, b, options_.tol, options_.max_iterations);
    last_cg_iterations_ = r.iterations;
    u = std::move(r.solution);
  } else if (shift >= kGroundingShift) {
    factor_->factorize(shift);
    u = factor_->solve(b);
  } else {
    // Pin DoF p: with U = V + c 1 and V_p = 0, the rows other than p read
    // G V = b - c shift m (m = M 1), and c follows from m^T U = 0.
    constexpr int p = 0;
    factor_->factorize(shift, p);
    Eigen::VectorXd rhs = b;
    rhs[p] = 0.0;
    Eigen::VectorXd m_hat = mass_ones_;
    m_hat[p] = 0.0;
    Eigen::VectorXd v1 = factor_->solve(rhs);
    Eigen::VectorXd v2 = factor_->solve(m_hat);
    v1[p] = 0.0;
    v2[p] = 0.0;
    const double denom = measure_ - shift * m_hat.dot(v2);
    if (!(denom > 0.0)) throw SolveError("mean-zero solve: grounded correction broke down");
    const double c = -m_hat.dot(v1) / denom;
    u = v1 - (c * shift) * v2;
    u.array() += c;
  }
  u.array() -= mass_ones_.dot(u) / measure_;
  return u;
}

}  // namespace fracsurf
