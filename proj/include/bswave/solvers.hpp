#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "bswave/csr.hpp"
#include "bswave/errors.hpp"

namespace bswave {

enum class SpdMethod { cg_jacobi, cholesky };

namespace detail {

inline Eigen::SparseMatrix<double> to_eigen(const CsrMatrix& m) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(m.nnz());
  for (int r = 0; r < m.rows; ++r)
    for (int k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k)
      trip.emplace_back(r, m.col_idx[k], m.vals[k]);
  Eigen::SparseMatrix<double> out(m.rows, m.cols);
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

inline void remove_mean(std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  for (double& x : v) x -= mean;
}

}  // namespace detail

/// Solver for symmetric positive (semi)definite systems.
///
/// cg_jacobi is the default; cholesky prefactors once with Eigen's
/// SimplicialLLT and is the choice for operators reused across many solves.
/// With `project_constants` the matrix is singular with null space
/// span{1}: the right-hand side and iterates are kept Euclidean-mean-free
/// (cg_jacobi only).
class SpdSolver {
 public:
  SpdSolver(const CsrMatrix& matrix, SpdMethod method = SpdMethod::cg_jacobi,
            double rel_tolerance = 1e-12, int max_iterations = 0,
            bool project_constants = false)
      : matrix_(&matrix),
        method_(method),
        rel_tol_(rel_tolerance),
        max_iter_(max_iterations > 0 ? max_iterations
                                     : std::max(5000, 20 * matrix.rows)),
        project_constants_(project_constants) {
    if (method_ == SpdMethod::cholesky) {
      if (project_constants_)
        throw SolverError(
            "cholesky method does not support a constant null space; use "
            "cg_jacobi");
      llt_ = std::make_unique<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>>();
      llt_->compute(detail::to_eigen(matrix));
      if (llt_->info() != Eigen::Success)
        throw SolverError("cholesky factorization failed (matrix not SPD?)");
    } else {
      inv_diag_ = matrix.diagonal();
      for (double& d : inv_diag_) {
        if (d <= 0.0 && !project_constants_)
          throw SolverError("cg_jacobi: nonpositive diagonal entry");
        d = d != 0.0 ? 1.0 / d : 1.0;
      }
    }
  }

  const CsrMatrix& matrix() const { return *matrix_; }
  int last_iterations() const { return last_iter_; }
  double last_residual() const { return last_res_; }

  std::vector<double> solve(const std::vector<double>& b) const {
    return method_ == SpdMethod::cholesky ? solve_llt(b) : solve_cg(b);
  }

 private:
  std::vector<double> solve_llt(const std::vector<double>& b) const {
    Eigen::Map<const Eigen::VectorXd> bm(b.data(), b.size());
    Eigen::VectorXd x = llt_->solve(bm);
    return std::vector<double>(x.data(), x.data() + x.size());
  }

  std::vector<double> solve_cg(const std::vector<double>& b_in) const {
    const CsrMatrix& A = *matrix_;
    std::vector<double> b = b_in;
    if (project_constants_) detail::remove_mean(b);

    const int n = A.rows;
    std::vector<double> x(n, 0.0), r = b, z(n), p(n), Ap(n);
    double bnorm = 0.0;
    for (double v : b) bnorm += v * v;
    bnorm = std::sqrt(bnorm);
    if (bnorm == 0.0) {
      last_iter_ = 0;
      last_res_ = 0.0;
      return x;
    }

    auto precond = [&](const std::vector<double>& rr, std::vector<double>& zz) {
      for (int i = 0; i < n; ++i) zz[i] = inv_diag_[i] * rr[i];
      if (project_constants_) detail::remove_mean(zz);
    };

    precond(r, z);
    p = z;
    double rz = 0.0;
    for (int i = 0; i < n; ++i) rz += r[i] * z[i];

    for (int it = 1; it <= max_iter_; ++it) {
      A.multiply(p, Ap);
      double pAp = 0.0;
      for (int i = 0; i < n; ++i) pAp += p[i] * Ap[i];
      if (pAp <= 0.0)
        throw SolverError("cg_jacobi: matrix not positive definite on Krylov space");
      double alpha = rz / pAp;
      double rnorm = 0.0;
      for (int i = 0; i < n; ++i) {
        x[i] += alpha * p[i];
        r[i] -= alpha * Ap[i];
        rnorm += r[i] * r[i];
      }
      rnorm = std::sqrt(rnorm);
      last_iter_ = it;
      last_res_ = rnorm / bnorm;
      if (rnorm <= rel_tol_ * bnorm) {
        if (project_constants_) detail::remove_mean(x);
        return x;
      }
      precond(r, z);
      double rz_new = 0.0;
      for (int i = 0; i < n; ++i) rz_new += r[i] * z[i];
      double beta = rz_new / rz;
      rz = rz_new;
      for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    throw SolverError("cg_jacobi: no convergence in " +
                      std::to_string(max_iter_) +
                      " iterations (relative residual " +
                      std::to_string(last_res_) + ")");
  }

  const CsrMatrix* matrix_;
  SpdMethod method_;
  double rel_tol_;
  int max_iter_;
  bool project_constants_;
  std::vector<double> inv_diag_;
  std::unique_ptr<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>> llt_;
  mutable int last_iter_ = 0;
  mutable double last_res_ = 0.0;
};

/// Prefactored sparse LU for the nonsymmetric traveling-wave operator.
class LuSolver {
 public:
  explicit LuSolver(const CsrMatrix& matrix) : a_(detail::to_eigen(matrix)) {
    lu_.compute(a_);
    if (lu_.info() != Eigen::Success)
      throw SolverError("sparse LU factorization failed");
  }

  std::vector<double> solve(const std::vector<double>& b) const {
    Eigen::Map<const Eigen::VectorXd> bm(b.data(), b.size());
    Eigen::VectorXd x = lu_.solve(bm);
    if (lu_.info() != Eigen::Success) throw SolverError("sparse LU solve failed");
    return std::vector<double>(x.data(), x.data() + x.size());
  }

 private:
  Eigen::SparseMatrix<double> a_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
};

}  // namespace bswave
