#include "proplab/numerics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <charconv>
#include <cmath>

namespace proplab {
namespace numerics {

Vector solve_linear(const Matrix& system_matrix, const Vector& rhs) {
    if (system_matrix.rows() != system_matrix.cols())
        throw SingularMatrix("solve_linear: matrix is not square");
    if (system_matrix.rows() != rhs.size())
        throw SingularMatrix("solve_linear: dimension mismatch");

    Eigen::FullPivLU<Matrix> lu(system_matrix);
    if (!lu.isInvertible())
        throw SingularMatrix("solve_linear: rank-deficient system");
    return lu.solve(rhs);
}

Matrix solve_dare(const Matrix& A, const Matrix& B, const Matrix& Q, const Matrix& Rc,
                  double tol, int max_iter, double damping) {
    const Eigen::Index n = A.rows();
    Matrix P = Q;
    for (int it = 0; it < max_iter; ++it) {
        Matrix inner = Rc + B.transpose() * P * B;
        Eigen::LLT<Matrix> llt(inner);
        if (llt.info() != Eigen::Success)
            throw NoConvergence("solve_dare: R + B'PB not positive definite");
        Matrix next = Q + A.transpose() * P * A -
                      A.transpose() * P * B * llt.solve(B.transpose() * P * A);
        if (damping != 1.0) next = damping * next + (1.0 - damping) * P;
        double step = (next - P).norm();
        P = next;
        if (step <= tol) {
            // symmetrize against accumulated roundoff
            P = 0.5 * (P + P.transpose()).eval();
            return P;
        }
    }
    (void)n;
    throw NoConvergence("solve_dare: no fixed point after max_iter iterations");
}

double spectral_norm(const Matrix& M) {
    if (M.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(M);
    return svd.singularValues()(0);
}

double min_singular_value(const Matrix& M) {
    if (M.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(M);
    const auto& s = svd.singularValues();
    return s(s.size() - 1);
}

double spectral_radius(const Matrix& M) {
    Eigen::EigenSolver<Matrix> es(M, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

double min_symmetric_eigenvalue(const Matrix& M) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(M, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double max_symmetric_eigenvalue(const Matrix& M) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(M, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

} // namespace numerics
} // namespace proplab
