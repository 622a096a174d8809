#include "proplab/oracle.hpp"

#include "proplab/baseline.hpp"

#include <json.hpp>

#include <cmath>

namespace proplab {
namespace oracle {

using envs::FiniteMdp;
using envs::LtvSystem;

QStarTables backward_induction(const FiniteMdp& mdp) {
    const int S = mdp.num_states, A = mdp.num_actions, T = mdp.horizon;
    QStarTables out;
    out.horizon = T;
    out.q.resize(T);
    out.v.resize(T + 1);
    out.greedy.resize(T);
    out.v[T] = Vector::Zero(S);
    for (int t = T - 1; t >= 0; --t) {
        Matrix q(S, A);
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a)
                q(s, a) = mdp.cost(t, s, a) +
                          mdp.transitions[t].row(s * A + a).dot(out.v[t + 1].transpose());
        out.v[t] = Vector(S);
        out.greedy[t].resize(S);
        for (int s = 0; s < S; ++s) {
            int best = 0;
            for (int a = 1; a < A; ++a)
                if (q(s, a) < q(s, best)) best = a;
            out.greedy[t][s] = best;
            out.v[t](s) = q(s, best);
        }
        out.q[t] = std::move(q);
    }
    return out;
}

OfflineOptimum offline_optimal_ltv(const LtvSystem& sys, const Vector& x0) {
    const int T = sys.horizon;
    std::vector<Vector> true_w(sys.w.begin(), sys.w.begin() + (T - 1));
    auto sol = baseline::solve_ftocp(sys, 0, T - 1, x0, true_w, sys.Qcost[T - 1]);

    OfflineOptimum opt;
    opt.J = sol.cost;
    opt.x = sol.x;
    opt.u = sol.u;
    opt.u.push_back(Vector::Zero(sys.action_dim)); // c_T == 0 makes u_{T-1} = 0 optimal
    for (const auto& u : opt.u)
        if (!sys.in_box(u))
            throw BoxActive("offline_optimal_ltv: unconstrained optimum leaves the action box");
    return opt;
}

double opt_lower_bound(const LtvSystem& sys) {
    double acc = 0.0;
    for (int t = 0; t + 1 < sys.horizon; ++t) acc += sys.w[t].squaredNorm();
    return sys.mu / (4.0 * (1.0 + sys.a * sys.a + sys.b * sys.b)) * acc;
}

Matrix stationary_gain(const Matrix& A, const Matrix& B, const Matrix& P, const Matrix& Rc) {
    Matrix inner = Rc + B.transpose() * P * B;
    Eigen::FullPivLU<Matrix> lu(inner);
    if (!lu.isInvertible())
        throw SingularInnerBlock("stationary_gain: R + B'PB singular");
    return lu.solve(B.transpose() * P * A);
}

std::vector<Matrix> riccati_feedback(const LtvSystem& sys) {
    const int T = sys.horizon;
    std::vector<Matrix> K(T);
    K[T - 1] = Matrix::Zero(sys.action_dim, sys.state_dim);
    Matrix P = sys.Qcost[T - 1]; // value of the final stage with u_{T-1} = 0
    for (int t = T - 2; t >= 0; --t) {
        Matrix inner = sys.Rcost[t] + sys.B[t].transpose() * P * sys.B[t];
        Eigen::FullPivLU<Matrix> lu(inner);
        if (!lu.isInvertible())
            throw SingularInnerBlock("riccati_feedback: R + B'PB singular at t=" +
                                     std::to_string(t));
        K[t] = lu.solve(sys.B[t].transpose() * P * sys.A[t]);
        P = sys.Qcost[t] +
            sys.A[t].transpose() * P * (sys.A[t] - sys.B[t] * K[t]);
        P = 0.5 * (P + P.transpose()).eval();
    }
    return K;
}

std::string qstar_to_json(const QStarTables& tables) {
    nlohmann::json j;
    j["horizon"] = tables.horizon;
    for (const auto& q : tables.q) {
        nlohmann::json m;
        m["rows"] = q.rows();
        m["cols"] = q.cols();
        std::vector<double> flat;
        for (Eigen::Index r = 0; r < q.rows(); ++r)
            for (Eigen::Index c = 0; c < q.cols(); ++c) flat.push_back(q(r, c));
        m["data"] = flat;
        j["q"].push_back(m);
    }
    for (const auto& v : tables.v)
        j["v"].push_back(std::vector<double>(v.data(), v.data() + v.size()));
    j["greedy"] = tables.greedy;
    return j.dump(2);
}

QStarTables qstar_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    QStarTables t;
    t.horizon = j.at("horizon").get<int>();
    for (const auto& m : j.at("q")) {
        Matrix q(m.at("rows").get<int>(), m.at("cols").get<int>());
        const auto& flat = m.at("data");
        for (Eigen::Index r = 0; r < q.rows(); ++r)
            for (Eigen::Index c = 0; c < q.cols(); ++c)
                q(r, c) = flat.at(r * q.cols() + c).get<double>();
        t.q.push_back(std::move(q));
    }
    for (const auto& e : j.at("v")) {
        Vector v(e.size());
        for (size_t i = 0; i < e.size(); ++i) v(i) = e.at(i).get<double>();
        t.v.push_back(std::move(v));
    }
    t.greedy = j.at("greedy").get<std::vector<std::vector<int>>>();
    return t;
}

} // namespace oracle
} // namespace proplab
