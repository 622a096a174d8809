#include "proplab/baseline.hpp"

#include <json.hpp>

#include <cmath>

namespace proplab {
namespace baseline {

using envs::LtvSystem;

// ======================= FTOCP =======================

FtocpSolution solve_ftocp(const LtvSystem& sys, int t, int t_end, const Vector& x,
                          const std::vector<Vector>& predicted_w, const Matrix& terminal) {
    const int n = sys.state_dim, m = sys.action_dim;
    const int N = t_end - t;
    FtocpSolution sol;
    sol.x.push_back(x);
    if (N == 0) {
        sol.cost = 0.5 * x.dot(terminal * x);
        return sol;
    }

    // variables: u_t, x_{t+1}, u_{t+1}, ..., u_{t_end-1}, x_{t_end}
    const int nz = N * (m + n);
    const int nc = N * n;
    Matrix K = Matrix::Zero(nz + nc, nz + nc);
    Vector rhs = Vector::Zero(nz + nc);

    auto u_off = [&](int i) { return i * (m + n); };         // i = tau - t
    auto x_off = [&](int i) { return i * (m + n) + m; };     // block for x_{t+i+1}

    for (int i = 0; i < N; ++i) {
        int tau = t + i;
        K.block(u_off(i), u_off(i), m, m) = sys.Rcost[tau];
        if (i < N - 1)
            K.block(x_off(i), x_off(i), n, n) = sys.Qcost[tau + 1];
        else
            K.block(x_off(i), x_off(i), n, n) = terminal;
    }
    for (int i = 0; i < N; ++i) {
        int tau = t + i;
        int row = nz + i * n;
        // x_{tau+1} - A_tau x_tau - B_tau u_tau = w_tau
        K.block(row, u_off(i), n, m) = -sys.B[tau];
        K.block(row, x_off(i), n, n) = Matrix::Identity(n, n);
        if (i > 0) K.block(row, x_off(i - 1), n, n) = -sys.A[tau];
        rhs.segment(row, n) = predicted_w[i];
        if (i == 0) rhs.segment(row, n) += sys.A[tau] * x;
    }
    // symmetrize: constraint Jacobian transpose in the upper-right block
    K.block(0, nz, nz, nc) = K.block(nz, 0, nc, nz).transpose();

    Vector z = numerics::solve_linear(K, rhs);

    sol.cost = 0.5 * x.dot(sys.Qcost[t] * x);
    for (int i = 0; i < N; ++i) {
        sol.u.push_back(z.segment(u_off(i), m));
        sol.x.push_back(z.segment(x_off(i), n));
    }
    for (int i = 0; i < N; ++i) {
        int tau = t + i;
        sol.cost += 0.5 * sol.u[i].dot(sys.Rcost[tau] * sol.u[i]);
        if (i < N - 1) sol.cost += 0.5 * sol.x[i + 1].dot(sys.Qcost[tau + 1] * sol.x[i + 1]);
    }
    sol.cost += 0.5 * sol.x[N].dot(terminal * sol.x[N]);
    return sol;
}

// ======================= MPC_k =======================

MpcBaseline::MpcBaseline(const LtvSystem& s, int horizon_k)
    : sys(&s), k(horizon_k), P(s.terminal_P) {}

MpcBaseline::MpcBaseline(const LtvSystem& s, int horizon_k, Matrix terminal)
    : sys(&s), k(horizon_k), P(std::move(terminal)) {}

Vector MpcBaseline::unconstrained_action(int t, const Vector& x) const {
    int t_end = std::min(t + k, sys->horizon - 1);
    if (t_end == t) return Vector::Zero(sys->action_dim);
    std::vector<Vector> zero_w(t_end - t, Vector::Zero(sys->state_dim));
    const Matrix& terminal = (t_end == sys->horizon - 1) ? sys->Qcost[t_end] : P;
    return solve_ftocp(*sys, t, t_end, x, zero_w, terminal).u[0];
}

Vector MpcBaseline::action(int t, const Vector& x, bool* clamped) const {
    Vector u = unconstrained_action(t, x);
    Vector uc = sys->clamp_to_box(u);
    if (clamped) *clamped = (u - uc).lpNorm<Eigen::Infinity>() > 0;
    return uc;
}

Matrix extract_feedback_gain(const MpcBaseline& b, int t) {
    const int n = b.sys->state_dim, m = b.sys->action_dim;
    Matrix K(m, n);
    for (int j = 0; j < n; ++j)
        K.col(j) = -b.unconstrained_action(t, envs::embed_state(j, n));
    return K;
}

// ======================= assumptions =======================

Matrix build_xi(const LtvSystem& sys, int t, int t_end) {
    const int n = sys.state_dim, m = sys.action_dim;
    const int g = t_end - t;
    Matrix Xi = Matrix::Zero((g + 1) * n, (g + 1) * n + g * m);
    Xi.block(0, 0, n, n) = Matrix::Identity(n, n);
    for (int i = 0; i < g; ++i) {
        int row = (i + 1) * n;
        int col = i * (n + m);
        Xi.block(row, col, n, n) = -sys.A[t + i];
        Xi.block(row, col + n, n, m) = -sys.B[t + i];
        Xi.block(row, col + n + m, n, n) = Matrix::Identity(n, n);
    }
    return Xi;
}

AssumptionReport check_assumptions(const LtvSystem& sys, double lambda_bar_target,
                                   std::optional<double> budget_cap) {
    AssumptionReport r;
    r.a = sys.a;
    r.b = sys.b;
    r.d = sys.d;
    r.mu = sys.mu;
    r.ell = sys.ell;
    r.lambda_bar = lambda_bar_target;

    const double tol = 1e-9;
    bool q_low = false, q_high = false, p_bad = false;
    for (int t = 0; t < sys.horizon; ++t) {
        if (numerics::min_symmetric_eigenvalue(sys.Qcost[t]) < r.mu - tol ||
            numerics::min_symmetric_eigenvalue(sys.Rcost[t]) < r.mu - tol)
            q_low = true;
        if (numerics::max_symmetric_eigenvalue(sys.Qcost[t]) > r.ell + tol ||
            numerics::max_symmetric_eigenvalue(sys.Rcost[t]) > r.ell + tol)
            q_high = true;
    }
    if (sys.terminal_P.size() > 0 &&
        (numerics::min_symmetric_eigenvalue(sys.terminal_P) < r.mu - tol ||
         numerics::max_symmetric_eigenvalue(sys.terminal_P) > r.ell + tol))
        p_bad = true;
    if (q_low) r.violations.push_back("cost matrix below mu*I (PSD-only)");
    if (q_high) r.violations.push_back("cost matrix above ell*I");
    if (p_bad) r.violations.push_back("terminal P outside [mu*I, ell*I]");
    if (r.mu <= 0) r.violations.push_back("declared mu nonpositive");

    // sampled gaps: powers of two plus the full horizon
    std::vector<int> gaps;
    for (int g = 1; g < sys.horizon - 1; g *= 2) gaps.push_back(g);
    if (sys.horizon >= 2) gaps.push_back(sys.horizon - 1);
    double sigma = std::numeric_limits<double>::infinity();
    for (int g : gaps)
        for (int t0 : {0, sys.horizon - 1 - g})
            sigma = std::min(sigma, numerics::min_singular_value(build_xi(sys, t0, t0 + g)));
    r.sigma = sigma;

    r.sigma_lo = std::min(r.mu, 1.0) * (r.a + r.b + 1.0) *
                 std::sqrt(r.ell / (2.0 * r.mu * r.ell + r.mu * r.sigma * r.sigma));
    r.sigma_hi = std::sqrt(2.0) * (r.ell + r.a + r.b + 1.0);
    if (r.sigma_lo >= r.sigma_hi) {
        r.violations.push_back("sigma_lo >= sigma_hi; lambda undefined");
        r.lambda = 1.0;
    } else {
        r.lambda = std::sqrt((r.sigma_hi - r.sigma_lo) / (r.sigma_hi + r.sigma_lo));
    }
    if (lambda_bar_target <= r.lambda)
        throw LambdaBarTooSmall("check_assumptions: lambda_bar_target <= lambda = " +
                                std::to_string(r.lambda));

    r.C = 4.0 * (r.ell + 1.0 + r.a + r.b) / (r.sigma_lo * r.sigma_lo * r.lambda);
    double k_raw = 0.5 *
                   std::log(r.C * r.C * r.C * r.b * r.a * r.lambda /
                            (lambda_bar_target - r.lambda)) /
                   std::log(1.0 / r.lambda);
    r.required_k = (int)std::ceil(std::min((double)sys.horizon, std::max(k_raw, 1.0)));

    r.rob_bound = 2.0 * r.ell * r.C * r.C * (1.0 + r.C * r.C) *
                  (1.0 + r.a * r.a + r.b * r.b) /
                  (r.mu * (1.0 - lambda_bar_target) * (1.0 - lambda_bar_target));
    r.R_bar = budget_cap.value_or(sys.box_diameter());
    r.R_x = r.C * (r.d + r.b * r.R_bar) / (1.0 - lambda_bar_target);
    r.R_u = r.C * r.R_x + r.R_bar;
    return r;
}

std::string AssumptionReport::to_json() const {
    nlohmann::json j;
    j["a"] = a;
    j["b"] = b;
    j["d"] = d;
    j["mu"] = mu;
    j["ell"] = ell;
    j["sigma"] = sigma;
    j["sigma_lo"] = sigma_lo;
    j["sigma_hi"] = sigma_hi;
    j["C"] = C;
    j["lambda"] = lambda;
    j["lambda_bar"] = lambda_bar;
    j["required_k"] = required_k;
    j["rob_bound"] = rob_bound;
    j["R_bar"] = R_bar;
    j["R_x"] = R_x;
    j["R_u"] = R_u;
    j["violations"] = violations;
    j["pass"] = violations.empty();
    return j.dump(2);
}

// ======================= tabular =======================

envs::ActionDistribution TabularBaseline::action(int t, int s) const {
    envs::ActionDistribution d;
    d.p = pi[t].row(s).transpose();
    return d;
}

TabularBaseline TabularBaseline::uniform(int num_states, int num_actions, int horizon) {
    TabularBaseline b;
    b.pi.assign(horizon, Matrix::Constant(num_states, num_actions, 1.0 / num_actions));
    return b;
}

InducedChain induced_chain(const envs::FiniteMdp& mdp, const TabularBaseline& b) {
    InducedChain ch;
    const int S = mdp.num_states, A = mdp.num_actions;
    for (int t = 0; t < mdp.horizon; ++t) {
        Matrix P = Matrix::Zero(S, S);
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a)
                P.row(s) += b.pi[t](s, a) * mdp.transitions[t].row(s * A + a);
        ch.P.push_back(std::move(P));
    }
    return ch;
}

Matrix InducedChain::product(int t, int t_end) const {
    Matrix M = P[t];
    for (int tau = t + 1; tau <= t_end; ++tau) M = M * P[tau];
    return M;
}

} // namespace baseline
} // namespace proplab
