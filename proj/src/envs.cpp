#include "proplab/envs.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace proplab {
namespace envs {

using nlohmann::json;

double norm_of(const Vector& v, Norm norm) {
    return norm == Norm::L1 ? v.lpNorm<1>() : v.norm();
}

bool ActionDistribution::valid(double tol) const {
    if (p.size() == 0) return false;
    if ((p.array() < -tol).any()) return false;
    return std::abs(p.sum() - 1.0) <= tol;
}

ActionDistribution ActionDistribution::point_mass(int a, int num_actions) {
    ActionDistribution d;
    d.p = Vector::Zero(num_actions);
    d.p(a) = 1.0;
    return d;
}

ActionDistribution ActionDistribution::uniform(int num_actions) {
    ActionDistribution d;
    d.p = Vector::Constant(num_actions, 1.0 / num_actions);
    return d;
}

// ======================= FiniteMdp =======================

void FiniteMdp::validate() const {
    if ((int)transitions.size() != horizon || (int)costs.size() != horizon)
        throw std::runtime_error("FiniteMdp: tensor horizon mismatch");
    for (int t = 0; t < horizon; ++t) {
        if (transitions[t].rows() != num_states * num_actions ||
            transitions[t].cols() != num_states)
            throw std::runtime_error("FiniteMdp: transition shape mismatch");
        for (int r = 0; r < transitions[t].rows(); ++r) {
            double sum = transitions[t].row(r).sum();
            if (std::abs(sum - 1.0) > 1e-12)
                throw std::runtime_error("FiniteMdp: transition row not stochastic");
            if ((transitions[t].row(r).array() < 0).any() ||
                (transitions[t].row(r).array() > 1).any())
                throw std::runtime_error("FiniteMdp: probability outside [0,1]");
        }
        if ((costs[t].array() <= 0).any() || !costs[t].allFinite())
            throw std::runtime_error("FiniteMdp: cost outside (0, inf)");
    }
}

static int sample_index(const Eigen::Ref<const Eigen::RowVectorXd>& probs, Rng& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double u = unif(rng);
    double acc = 0.0;
    for (int i = 0; i < probs.size(); ++i) {
        acc += probs(i);
        if (u < acc) return i;
    }
    return (int)probs.size() - 1; // roundoff tail
}

std::pair<int, double> step_finite(const FiniteMdp& mdp, int t, int s,
                                   const ActionDistribution& a, Rng& rng) {
    int j = sample_index(a.p.transpose(), rng);
    int s2 = sample_index(mdp.transitions[t].row(s * mdp.num_actions + j), rng);
    return {s2, mdp.cost(t, s, j)};
}

Vector embed_state(int s, int n) {
    Vector e = Vector::Zero(n);
    e(s) = 1.0;
    return e;
}

FiniteMdp random_finite_mdp(int num_states, int num_actions, int horizon,
                            double min_entry, Rng& rng) {
    if (min_entry * num_states >= 1.0)
        throw InfeasibleFloor("random_finite_mdp: min_entry * |S| >= 1");
    FiniteMdp mdp;
    mdp.num_states = num_states;
    mdp.num_actions = num_actions;
    mdp.horizon = horizon;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int t = 0; t < horizon; ++t) {
        Matrix P(num_states * num_actions, num_states);
        for (int r = 0; r < P.rows(); ++r) {
            Eigen::RowVectorXd raw(num_states);
            for (int c = 0; c < num_states; ++c) raw(c) = unif(rng);
            raw /= raw.sum();
            // mix toward uniform so every entry clears the floor
            double slack = 1.0 - min_entry * num_states;
            P.row(r) = Eigen::RowVectorXd::Constant(num_states, min_entry) + slack * raw;
            P.row(r) /= P.row(r).sum();
        }
        Matrix c(num_states, num_actions);
        for (int s = 0; s < num_states; ++s)
            for (int a = 0; a < num_actions; ++a) c(s, a) = 1.0 - unif(rng) * (1.0 - 1e-9);
        mdp.transitions.push_back(std::move(P));
        mdp.costs.push_back(std::move(c));
    }
    return mdp;
}

FiniteMdp random_deterministic_mdp(int num_states, int num_actions, int horizon, Rng& rng) {
    FiniteMdp mdp;
    mdp.num_states = num_states;
    mdp.num_actions = num_actions;
    mdp.horizon = horizon;
    std::uniform_int_distribution<int> pick(0, num_states - 1);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int t = 0; t < horizon; ++t) {
        Matrix P = Matrix::Zero(num_states * num_actions, num_states);
        for (int r = 0; r < P.rows(); ++r) P(r, pick(rng)) = 1.0;
        Matrix c(num_states, num_actions);
        for (int s = 0; s < num_states; ++s)
            for (int a = 0; a < num_actions; ++a) c(s, a) = 0.1 + 0.9 * unif(rng);
        mdp.transitions.push_back(std::move(P));
        mdp.costs.push_back(std::move(c));
    }
    return mdp;
}

// ======================= LtvSystem =======================

double LtvSystem::box_diameter() const {
    Vector span = box_hi - box_lo;
    return norm_of(span, action_norm);
}

bool LtvSystem::in_box(const Vector& u, double tol) const {
    return (u.array() >= box_lo.array() - tol).all() &&
           (u.array() <= box_hi.array() + tol).all();
}

Vector LtvSystem::clamp_to_box(const Vector& u) const {
    return u.cwiseMax(box_lo).cwiseMin(box_hi);
}

double LtvSystem::stage_cost(int t, const Vector& x, const Vector& u) const {
    return 0.5 * (x.dot(Qcost[t] * x) + u.dot(Rcost[t] * u));
}

void LtvSystem::declare_bounds() {
    a = b = d = 0.0;
    ell = 0.0;
    double min_eig = std::numeric_limits<double>::infinity();
    double min_pos_eig = std::numeric_limits<double>::infinity();
    auto account = [&](const Matrix& M) {
        double lo = numerics::min_symmetric_eigenvalue(M);
        double hi = numerics::max_symmetric_eigenvalue(M);
        ell = std::max(ell, hi);
        min_eig = std::min(min_eig, lo);
        if (lo > 1e-12) min_pos_eig = std::min(min_pos_eig, lo);
    };
    for (int t = 0; t < horizon; ++t) {
        a = std::max(a, numerics::spectral_norm(A[t]));
        b = std::max(b, numerics::spectral_norm(B[t]));
        d = std::max(d, norm_of(w[t], state_norm));
        account(Qcost[t]);
        account(Rcost[t]);
    }
    if (terminal_P.size() > 0) account(terminal_P); // Assumption 4 covers P too
    // declared mu falls back to the smallest positive cost eigenvalue when a
    // cost matrix is only PSD; check_assumptions reports the violation
    mu = (min_eig > 1e-12) ? min_eig : min_pos_eig;
}

Vector step_ltv(const LtvSystem& sys, int t, const Vector& x, const Vector& u) {
    if (!sys.in_box(u))
        throw ActionOutOfBox("step_ltv: action violates box at t=" + std::to_string(t));
    return sys.A[t] * x + sys.B[t] * u + sys.w[t];
}

Vector rose_point(int t) {
    Vector y(2);
    y(0) = 2.0 * std::cos(t / 20.0) * std::sin(t / 5.0);
    y(1) = 2.0 * std::sin(t / 20.0) * std::sin(t / 5.0);
    return y;
}

static LtvSystem make_tracking_shell(int T) {
    LtvSystem sys;
    sys.horizon = T;
    sys.state_dim = 4;
    sys.action_dim = 2;
    Matrix A(4, 4);
    A << 1, 0, 0.2, 0,
         0, 1, 0, 0.2,
         0, 0, 1, 0,
         0, 0, 0, 1;
    Matrix B(4, 2);
    B << 0, 0,
         0, 0,
         0.2, 0,
         0, 0.2;
    Matrix Q = Matrix::Zero(4, 4);
    Q(0, 0) = Q(1, 1) = 1.0;
    Matrix R = 1e-2 * Matrix::Identity(2, 2);
    for (int t = 0; t < T; ++t) {
        sys.A.push_back(A);
        sys.B.push_back(B);
        sys.Qcost.push_back(Q);
        sys.Rcost.push_back(R);
    }
    sys.box_lo = Vector::Constant(2, -100.0);
    sys.box_hi = Vector::Constant(2, 100.0);
    return sys;
}

LtvSystem build_tracking_benchmark(int T) {
    LtvSystem sys = make_tracking_shell(T);
    // reference embedded with zero velocity components; w_t = A y_t - y_{t+1}
    for (int t = 0; t < T; ++t) {
        Vector yt = Vector::Zero(4), yn = Vector::Zero(4);
        yt.head(2) = rose_point(t);
        yn.head(2) = rose_point(t + 1);
        sys.w.push_back(sys.A[t] * yt - yn);
    }
    sys.terminal_P = numerics::solve_dare(sys.A[0], sys.B[0], sys.Qcost[0], sys.Rcost[0]);
    sys.declare_bounds();
    return sys;
}

LtvSystem build_nonstationary_benchmark(int T, int shift_step, double pre_mean,
                                        double post_mean, double sigma, Rng& rng) {
    LtvSystem sys = make_tracking_shell(T);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (int t = 0; t < T; ++t) {
        double mean = t < shift_step ? pre_mean : post_mean;
        Vector wt(4);
        for (int i = 0; i < 4; ++i) wt(i) = mean + sigma * noise(rng);
        sys.w.push_back(wt);
    }
    sys.terminal_P = numerics::solve_dare(sys.A[0], sys.B[0], sys.Qcost[0], sys.Rcost[0]);
    sys.declare_bounds();
    return sys;
}

// ======================= JSON =======================

static json matrix_to_json(const Matrix& M) {
    json j;
    j["rows"] = M.rows();
    j["cols"] = M.cols();
    std::vector<double> flat(M.size());
    for (Eigen::Index r = 0; r < M.rows(); ++r)
        for (Eigen::Index c = 0; c < M.cols(); ++c) flat[r * M.cols() + c] = M(r, c);
    j["data"] = flat;
    return j;
}

static Matrix matrix_from_json(const json& j) {
    Matrix M(j.at("rows").get<int>(), j.at("cols").get<int>());
    const auto& flat = j.at("data");
    for (Eigen::Index r = 0; r < M.rows(); ++r)
        for (Eigen::Index c = 0; c < M.cols(); ++c)
            M(r, c) = flat.at(r * M.cols() + c).get<double>();
    return M;
}

static json vector_to_json(const Vector& v) {
    std::vector<double> flat(v.data(), v.data() + v.size());
    return json(flat);
}

static Vector vector_from_json(const json& j) {
    Vector v(j.size());
    for (size_t i = 0; i < j.size(); ++i) v(i) = j.at(i).get<double>();
    return v;
}

static std::string norm_tag(Norm n) { return n == Norm::L1 ? "l1" : "l2"; }
static Norm norm_from_tag(const std::string& s) {
    if (s == "l1") return Norm::L1;
    if (s == "l2") return Norm::L2;
    throw std::runtime_error("unknown norm tag: " + s);
}

std::string finite_mdp_to_json(const FiniteMdp& mdp) {
    json j;
    j["type"] = "finite";
    j["num_states"] = mdp.num_states;
    j["num_actions"] = mdp.num_actions;
    j["horizon"] = mdp.horizon;
    j["state_norm"] = norm_tag(mdp.state_norm);
    j["action_norm"] = norm_tag(mdp.action_norm);
    for (const auto& P : mdp.transitions) j["transitions"].push_back(matrix_to_json(P));
    for (const auto& c : mdp.costs) j["costs"].push_back(matrix_to_json(c));
    return j.dump(2);
}

FiniteMdp finite_mdp_from_json(const std::string& text) {
    json j = json::parse(text);
    if (j.at("type") != "finite") throw std::runtime_error("expected finite env");
    FiniteMdp mdp;
    mdp.num_states = j.at("num_states").get<int>();
    mdp.num_actions = j.at("num_actions").get<int>();
    mdp.horizon = j.at("horizon").get<int>();
    mdp.state_norm = norm_from_tag(j.at("state_norm").get<std::string>());
    mdp.action_norm = norm_from_tag(j.at("action_norm").get<std::string>());
    for (const auto& e : j.at("transitions")) mdp.transitions.push_back(matrix_from_json(e));
    for (const auto& e : j.at("costs")) mdp.costs.push_back(matrix_from_json(e));
    mdp.validate();
    return mdp;
}

std::string ltv_to_json(const LtvSystem& sys) {
    json j;
    j["type"] = "ltv";
    j["horizon"] = sys.horizon;
    j["state_dim"] = sys.state_dim;
    j["action_dim"] = sys.action_dim;
    j["state_norm"] = norm_tag(sys.state_norm);
    j["action_norm"] = norm_tag(sys.action_norm);
    for (const auto& M : sys.A) j["A"].push_back(matrix_to_json(M));
    for (const auto& M : sys.B) j["B"].push_back(matrix_to_json(M));
    for (const auto& v : sys.w) j["w"].push_back(vector_to_json(v));
    for (const auto& M : sys.Qcost) j["Qcost"].push_back(matrix_to_json(M));
    for (const auto& M : sys.Rcost) j["Rcost"].push_back(matrix_to_json(M));
    j["terminal_P"] = matrix_to_json(sys.terminal_P);
    j["box_lo"] = vector_to_json(sys.box_lo);
    j["box_hi"] = vector_to_json(sys.box_hi);
    j["a"] = sys.a;
    j["b"] = sys.b;
    j["d"] = sys.d;
    j["mu"] = sys.mu;
    j["ell"] = sys.ell;
    return j.dump(2);
}

LtvSystem ltv_from_json(const std::string& text) {
    json j = json::parse(text);
    if (j.at("type") != "ltv") throw std::runtime_error("expected ltv env");
    LtvSystem sys;
    sys.horizon = j.at("horizon").get<int>();
    sys.state_dim = j.at("state_dim").get<int>();
    sys.action_dim = j.at("action_dim").get<int>();
    sys.state_norm = norm_from_tag(j.at("state_norm").get<std::string>());
    sys.action_norm = norm_from_tag(j.at("action_norm").get<std::string>());
    for (const auto& e : j.at("A")) sys.A.push_back(matrix_from_json(e));
    for (const auto& e : j.at("B")) sys.B.push_back(matrix_from_json(e));
    for (const auto& e : j.at("w")) sys.w.push_back(vector_from_json(e));
    for (const auto& e : j.at("Qcost")) sys.Qcost.push_back(matrix_from_json(e));
    for (const auto& e : j.at("Rcost")) sys.Rcost.push_back(matrix_from_json(e));
    sys.terminal_P = matrix_from_json(j.at("terminal_P"));
    sys.box_lo = vector_from_json(j.at("box_lo"));
    sys.box_hi = vector_from_json(j.at("box_hi"));
    sys.a = j.at("a").get<double>();
    sys.b = j.at("b").get<double>();
    sys.d = j.at("d").get<double>();
    sys.mu = j.at("mu").get<double>();
    sys.ell = j.at("ell").get<double>();
    return sys;
}

void env_from_json(const std::string& text, bool& is_finite, FiniteMdp& mdp, LtvSystem& sys) {
    json j = json::parse(text);
    std::string type = j.at("type").get<std::string>();
    if (type == "finite") {
        is_finite = true;
        mdp = finite_mdp_from_json(text);
    } else if (type == "ltv") {
        is_finite = false;
        sys = ltv_from_json(text);
    } else {
        throw std::runtime_error("unknown env type: " + type);
    }
}

} // namespace envs
} // namespace proplab
