#pragma once

#include "proplab/envs.hpp"

#include <optional>
#include <string>
#include <vector>

namespace proplab {
namespace baseline {

struct LambdaBarTooSmall : std::runtime_error {
    explicit LambdaBarTooSmall(const std::string& what) : std::runtime_error(what) {}
};

// ======================= FTOCP / MPC_k =======================

struct FtocpSolution {
    std::vector<Vector> x; // x_{t..t_end}, x[0] is the given state
    std::vector<Vector> u; // u_{t..t_end-1}; empty when t_end == t
    double cost = 0.0;     // stage costs plus terminal term
};

// psi_{t,t_end}(x, predicted_w; terminal): unique minimizer of
//   sum_{tau=t}^{t_end-1} c_tau(x_tau, u_tau) + 0.5 x_{t_end}' terminal x_{t_end}
// subject to the predicted dynamics, solved through the KKT system.
// predicted_w[i] is the prediction for w_{t+i}; size t_end - t.
FtocpSolution solve_ftocp(const envs::LtvSystem& sys, int t, int t_end, const Vector& x,
                          const std::vector<Vector>& predicted_w, const Matrix& terminal);

struct MpcBaseline {
    const envs::LtvSystem* sys = nullptr;
    int k = 1;
    Matrix P; // terminal matrix used when the lookahead stops before T-1

    MpcBaseline() = default;
    MpcBaseline(const envs::LtvSystem& s, int horizon_k);
    MpcBaseline(const envs::LtvSystem& s, int horizon_k, Matrix terminal);

    // Algorithm body: t' = min{t+k, T-1}; commit the first FTOCP action with
    // zero disturbance predictions; clamp to the action box afterward.
    // clamped reports whether the box was active (optional).
    Vector action(int t, const Vector& x, bool* clamped = nullptr) const;

    // Unclamped action; used by gain extraction and the contraction probes.
    Vector unconstrained_action(int t, const Vector& x) const;
};

// K_t^k with u_t = -K_t^k x_t, recovered column-by-column from unit states.
Matrix extract_feedback_gain(const MpcBaseline& b, int t);

// ======================= assumption report =======================

struct AssumptionReport {
    double a = 0, b = 0, d = 0, mu = 0, ell = 0, sigma = 0;
    double sigma_lo = 0, sigma_hi = 0; // underline/overline sigma
    double C = 0, lambda = 0, lambda_bar = 0;
    int required_k = 0;
    double rob_bound = 0;      // Theorem competitive-ratio bound
    double R_bar = 0;          // budget cap used for the stability radii
    double R_x = 0, R_u = 0;   // stability radii
    std::vector<std::string> violations;

    bool pass() const { return violations.empty(); }
    std::string to_json() const;
};

// Evaluates the closed-form constants from the system's declared bounds.
// sigma is estimated as the minimum singular value of Xi_{t,t'} over a sample
// of gaps (powers of two up to T-1, plus T-1 itself).
AssumptionReport check_assumptions(const envs::LtvSystem& sys, double lambda_bar_target,
                                   std::optional<double> budget_cap = std::nullopt);

// Xi_{t,t'} block matrix of Assumption 5.
Matrix build_xi(const envs::LtvSystem& sys, int t, int t_end);

// ======================= tabular baselines =======================

struct TabularBaseline {
    // pi[t] has shape (|S|, |A|); row s is the distribution over actions
    std::vector<Matrix> pi;

    envs::ActionDistribution action(int t, int s) const;
    static TabularBaseline uniform(int num_states, int num_actions, int horizon);
};

struct InducedChain {
    std::vector<Matrix> P; // per-step state-to-state matrices, shape (|S|, |S|)

    // product P_t P_{t+1} ... P_{t_end} (inclusive)
    Matrix product(int t, int t_end) const;
};

InducedChain induced_chain(const envs::FiniteMdp& mdp, const TabularBaseline& b);

} // namespace baseline
} // namespace proplab
