#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <memory>
#include <stdexcept>
#include <string>

namespace fsiplate {

// numerical knobs shared by the solver layer
struct Tolerances {
    double lu_residual = 1e-10;        // admissible solve residual (relative)
    double svd_relative = 1e-8;        // accuracy of smallest singular values
    double nullspace = 1e-10;          // rank cutoff relative to the largest sigma
    double symmetry = 1e-13;           // max asymmetry for matrices claimed symmetric
};
const Tolerances& default_tolerances();

class SingularMatrixError : public std::runtime_error {
  public:
    SingularMatrixError(const std::string& msg, int pivot) : std::runtime_error(msg), pivot_(pivot) {}
    int pivot() const { return pivot_; }

  private:
    int pivot_;
};

class ConvergenceError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// sparse LU factorization reusable across right-hand sides
class Factorization {
  public:
    explicit Factorization(const Eigen::SparseMatrix<double>& A);

    Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
    Eigen::MatrixXd solve(const Eigen::MatrixXd& B) const;
    int rows() const { return rows_; }

  private:
    std::shared_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_;
    int rows_ = 0;
};

Eigen::VectorXd lu_solve(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b);

// smallest singular value of A in the inner product induced by the SPD
// weight H: the smallest sigma of L^T A L^{-T} where H = L L^T.
double smallest_singular_value(const Eigen::MatrixXcd& A, const Eigen::MatrixXd& H);

// orthonormal basis of the nullspace of C; columns span {x : Cx = 0},
// where singular values <= tol * max(sigma) count as zero
Eigen::MatrixXd nullspace_basis(const Eigen::MatrixXd& C, double tol);

double max_asymmetry(const Eigen::SparseMatrix<double>& A);

}  // namespace fsiplate
