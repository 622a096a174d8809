#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace proplab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace numerics {

struct SingularMatrix : std::runtime_error {
    explicit SingularMatrix(const std::string& what) : std::runtime_error(what) {}
};

struct NoConvergence : std::runtime_error {
    explicit NoConvergence(const std::string& what) : std::runtime_error(what) {}
};

// Solve A v = rhs for square, nonsingular A. Throws SingularMatrix when
// pivoting detects rank deficiency.
Vector solve_linear(const Matrix& system_matrix, const Vector& rhs);

// Fixed point of the discrete algebraic Riccati equation
//   P = Q + A'PA - A'PB (Rc + B'PB)^{-1} B'PA
// via (optionally damped) iteration from P = Q. Throws NoConvergence when the
// Frobenius update norm stays above tol after max_iter sweeps.
Matrix solve_dare(const Matrix& A, const Matrix& B, const Matrix& Q, const Matrix& Rc,
                  double tol = 1e-10, int max_iter = 100000, double damping = 1.0);

// Largest singular value.
double spectral_norm(const Matrix& M);

// Smallest singular value.
double min_singular_value(const Matrix& M);

// Spectral radius (largest |eigenvalue|).
double spectral_radius(const Matrix& M);

// Smallest eigenvalue of a symmetric matrix.
double min_symmetric_eigenvalue(const Matrix& M);

// Largest eigenvalue of a symmetric matrix.
double max_symmetric_eigenvalue(const Matrix& M);

// Shortest round-trip decimal representation (std::to_chars); used for all
// CSV output so reruns are byte-identical.
std::string format_double(double x);

} // namespace numerics
} // namespace proplab
