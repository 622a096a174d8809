#pragma once

#include "proplab/envs.hpp"

#include <string>
#include <vector>

namespace proplab {
namespace oracle {

struct QStarTables {
    int horizon = 0;
    // q[t] has shape (|S|, |A|); v[t] has length |S|; v[T] is the zero boundary
    std::vector<Matrix> q;
    std::vector<Vector> v;
    // greedy argmin per (t, s), ties to the lowest action index
    std::vector<std::vector<int>> greedy;
};

struct OfflineOptimum {
    double J = 0.0;
    std::vector<Vector> x; // length T, x[0] = x0
    std::vector<Vector> u; // length T, u[T-1] = 0 by the c_T == 0 convention
};

struct BoxActive : std::runtime_error {
    explicit BoxActive(const std::string& what) : std::runtime_error(what) {}
};

struct SingularInnerBlock : std::runtime_error {
    explicit SingularInnerBlock(const std::string& what) : std::runtime_error(what) {}
};

QStarTables backward_induction(const envs::FiniteMdp& mdp);

// Full-horizon FTOCP with the true disturbances; unconstrained, box checked
// post hoc (throws BoxActive when any u* touches the bounds).
OfflineOptimum offline_optimal_ltv(const envs::LtvSystem& sys, const Vector& x0);

double opt_lower_bound(const envs::LtvSystem& sys);

// Time-varying feedback gains from a backward Riccati recursion with the
// system's terminal_P; u_t = -K_t x_t.
std::vector<Matrix> riccati_feedback(const envs::LtvSystem& sys);

// Stationary gain K = (R + B'PB)^{-1} B'PA from the DARE P.
Matrix stationary_gain(const Matrix& A, const Matrix& B, const Matrix& P, const Matrix& Rc);

std::string qstar_to_json(const QStarTables& tables);
QStarTables qstar_from_json(const std::string& text);

} // namespace oracle
} // namespace proplab
