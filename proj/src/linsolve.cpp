#include "fsiplate/linsolve.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cctype>
#include <cstdlib>

namespace fsiplate {

const Tolerances& default_tolerances() {
    static const Tolerances tol;
    return tol;
}

Factorization::Factorization(const Eigen::SparseMatrix<double>& A) {
    if (A.rows() != A.cols())
        throw std::invalid_argument("linsolve: matrix must be square, got " +
                                    std::to_string(A.rows()) + "x" + std::to_string(A.cols()));
    rows_ = static_cast<int>(A.rows());
    lu_ = std::make_shared<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
    Eigen::SparseMatrix<double> Ac = A;
    Ac.makeCompressed();
    lu_->analyzePattern(Ac);
    lu_->factorize(Ac);
    if (lu_->info() != Eigen::Success) {
        // Eigen reports the failing column in lastErrorMessage; keep the
        // first recoverable index when present
        int pivot = -1;
        const std::string msg = lu_->lastErrorMessage();
        for (size_t i = 0; i < msg.size(); ++i) {
            if (std::isdigit(static_cast<unsigned char>(msg[i]))) {
                pivot = std::atoi(msg.c_str() + i);
                break;
            }
        }
        throw SingularMatrixError("linsolve: LU factorization failed (" + msg + ")", pivot);
    }
}

Eigen::VectorXd Factorization::solve(const Eigen::VectorXd& b) const {
    if (b.size() != rows_)
        throw std::invalid_argument("linsolve: right-hand side has size " +
                                    std::to_string(b.size()) + ", expected " + std::to_string(rows_));
    return lu_->solve(b);
}

Eigen::MatrixXd Factorization::solve(const Eigen::MatrixXd& B) const {
    if (B.rows() != rows_)
        throw std::invalid_argument("linsolve: right-hand side has " + std::to_string(B.rows()) +
                                    " rows, expected " + std::to_string(rows_));
    return lu_->solve(B);
}

Eigen::VectorXd lu_solve(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b) {
    return Factorization(A).solve(b);
}

double smallest_singular_value(const Eigen::MatrixXcd& A, const Eigen::MatrixXd& H) {
    if (A.rows() != A.cols() || H.rows() != H.cols() || A.rows() != H.rows())
        throw std::invalid_argument("linsolve: operator and weight dimensions disagree");
    const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
    if ((H - H.transpose()).cwiseAbs().maxCoeff() > default_tolerances().symmetry * scale)
        throw std::invalid_argument("linsolve: weight matrix is not symmetric positive definite");
    Eigen::LLT<Eigen::MatrixXd> llt(H);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("linsolve: weight matrix is not symmetric positive definite");
    const Eigen::MatrixXd L = llt.matrixL();

    // B = L^T A L^{-T}; solve L B^T = (L^T A)^T for B
    Eigen::MatrixXcd Y = L.transpose().cast<std::complex<double>>() * A;
    Eigen::MatrixXcd Bt = L.cast<std::complex<double>>()
                              .triangularView<Eigen::Lower>()
                              .solve(Y.transpose());
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(Bt.transpose());
    if (svd.info() != Eigen::Success)
        throw ConvergenceError("linsolve: singular value decomposition did not converge");
    return svd.singularValues().tail<1>()(0);
}

Eigen::MatrixXd nullspace_basis(const Eigen::MatrixXd& C, double tol) {
    if (tol <= 0.0) throw std::invalid_argument("linsolve: nullspace tolerance must be positive");
    if (C.rows() == 0) throw std::invalid_argument("linsolve: constraint matrix has no rows");
    Eigen::BDCSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeFullV);
    if (svd.info() != Eigen::Success)
        throw ConvergenceError("linsolve: singular value decomposition did not converge");
    const Eigen::VectorXd sv = svd.singularValues();
    const double cutoff = (sv.size() > 0 ? sv(0) : 0.0) * tol;
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) ++rank;
    return svd.matrixV().rightCols(C.cols() - rank);
}

double max_asymmetry(const Eigen::SparseMatrix<double>& A) {
    Eigen::SparseMatrix<double> D = Eigen::SparseMatrix<double>(A.transpose()) - A;
    double m = 0.0;
    for (int k = 0; k < D.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(D, k); it; ++it)
            m = std::max(m, std::abs(it.value()));
    return m;
}

}  // namespace fsiplate
