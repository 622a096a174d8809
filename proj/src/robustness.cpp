#include "proplab/robustness.hpp"

#include <json.hpp>

#include <cmath>
#include <deque>
#include <limits>

namespace proplab {
namespace robustness {

double tv_distance(const Vector& mu, const Vector& nu) {
    return 0.5 * (mu - nu).lpNorm<1>();
}

double w1_indicator(const Vector& mu, const Vector& nu) {
    return 2.0 * tv_distance(mu, nu);
}

// ======================= exact discrete transport =======================

namespace {

struct FlowEdge {
    int to;
    double cap;
    double cost;
    int rev;
};

class MinCostFlow {
public:
    explicit MinCostFlow(int n) : graph_(n) {}

    void add_edge(int from, int to, double cap, double cost) {
        graph_[from].push_back({to, cap, cost, (int)graph_[to].size()});
        graph_[to].push_back({from, 0.0, -cost, (int)graph_[from].size() - 1});
    }

    // sends as much flow as possible from s to t; returns total cost
    double solve(int s, int t) {
        const double inf = std::numeric_limits<double>::infinity();
        double total = 0.0;
        while (true) {
            // SPFA shortest path on residual costs
            std::vector<double> dist(graph_.size(), inf);
            std::vector<int> pv(graph_.size(), -1), pe(graph_.size(), -1);
            std::vector<bool> inq(graph_.size(), false);
            std::deque<int> q;
            dist[s] = 0.0;
            q.push_back(s);
            while (!q.empty()) {
                int v = q.front();
                q.pop_front();
                inq[v] = false;
                for (int i = 0; i < (int)graph_[v].size(); ++i) {
                    const FlowEdge& e = graph_[v][i];
                    if (e.cap <= 1e-15) continue;
                    if (dist[v] + e.cost < dist[e.to] - 1e-15) {
                        dist[e.to] = dist[v] + e.cost;
                        pv[e.to] = v;
                        pe[e.to] = i;
                        if (!inq[e.to]) {
                            inq[e.to] = true;
                            q.push_back(e.to);
                        }
                    }
                }
            }
            if (dist[t] == inf) break;
            double push = inf;
            for (int v = t; v != s; v = pv[v]) push = std::min(push, graph_[pv[v]][pe[v]].cap);
            for (int v = t; v != s; v = pv[v]) {
                FlowEdge& e = graph_[pv[v]][pe[v]];
                e.cap -= push;
                graph_[e.to][e.rev].cap += push;
            }
            total += push * dist[t];
        }
        return total;
    }

private:
    std::vector<std::vector<FlowEdge>> graph_;
};

} // namespace

double discrete_w1(const Vector& mu, const Vector& nu, const Matrix& cost) {
    // shared mass stays in place under a metric ground cost
    Vector p = (mu - nu).cwiseMax(0.0);
    Vector q = (nu - mu).cwiseMax(0.0);

    std::vector<int> pi, qi;
    for (int i = 0; i < p.size(); ++i)
        if (p(i) > 1e-15) pi.push_back(i);
    for (int j = 0; j < q.size(); ++j)
        if (q(j) > 1e-15) qi.push_back(j);
    if (pi.empty() || qi.empty()) return 0.0;

    const int n = (int)pi.size(), m = (int)qi.size();
    MinCostFlow mcf(n + m + 2);
    const int src = n + m, snk = n + m + 1;
    for (int i = 0; i < n; ++i) mcf.add_edge(src, i, p(pi[i]), 0.0);
    for (int j = 0; j < m; ++j) mcf.add_edge(n + j, snk, q(qi[j]), 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) mcf.add_edge(i, n + j, 1e18, cost(pi[i], qi[j]));
    return mcf.solve(src, snk);
}

// ======================= certificates =======================

static double chain_eps_min(const baseline::InducedChain& ch) {
    double eps = std::numeric_limits<double>::infinity();
    for (const auto& P : ch.P) eps = std::min(eps, P.minCoeff());
    return eps;
}

ContractionCertificate certify_contraction(const envs::FiniteMdp& mdp,
                                           const baseline::TabularBaseline& base,
                                           int max_gap) {
    const int S = mdp.num_states, T = mdp.horizon;
    auto chain = baseline::induced_chain(mdp, base);

    ContractionCertificate cert;
    cert.eps_min = chain_eps_min(chain);
    cert.lambda = 1.0 - S * cert.eps_min;

    cert.per_gap.assign(max_gap + 1, GapRecord{});
    for (int g = 0; g <= max_gap; ++g) {
        cert.per_gap[g].gap = g;
        cert.per_gap[g].bound = std::pow(cert.lambda, g);
    }
    // running window products: M = P_t ... P_{t'}
    for (int t = 0; t < T; ++t) {
        Matrix M = chain.P[t];
        for (int t2 = t; t2 < T && t2 - t <= max_gap; ++t2) {
            if (t2 > t) M = M * chain.P[t2];
            int g = t2 - t;
            for (int i = 0; i < S; ++i)
                for (int j = i + 1; j < S; ++j) {
                    double tv = tv_distance(M.row(i).transpose(), M.row(j).transpose());
                    cert.per_gap[g].observed = std::max(cert.per_gap[g].observed, tv);
                }
        }
    }
    cert.pass = cert.eps_min > 0.0;
    cert.c_s = 0.0;
    for (int g = 0; g <= max_gap; ++g) {
        if (cert.per_gap[g].observed > cert.per_gap[g].bound + 1e-12) cert.pass = false;
        if (g >= 1) cert.c_s += 2.0 * std::pow(cert.lambda, g - 1);
    }
    return cert;
}

ContractionCertificate certify_wasserstein_robustness(const envs::FiniteMdp& mdp,
                                                      const baseline::TabularBaseline& base,
                                                      int max_gap) {
    const int S = mdp.num_states, A = mdp.num_actions, T = mdp.horizon;
    auto chain = baseline::induced_chain(mdp, base);

    ContractionCertificate cert;
    cert.eps_min = chain_eps_min(chain);
    cert.lambda = 1.0 - S * cert.eps_min;
    cert.per_gap.assign(max_gap + 1, GapRecord{});
    for (int g = 0; g <= max_gap; ++g) {
        cert.per_gap[g].gap = g;
        cert.per_gap[g].bound = g >= 1 ? 2.0 * std::pow(cert.lambda, g - 1) : 0.0;
    }

    // product ground metric on state-action pairs, flattened as s*A + a
    Matrix ground(S * A, S * A);
    for (int s1 = 0; s1 < S; ++s1)
        for (int a1 = 0; a1 < A; ++a1)
            for (int s2 = 0; s2 < S; ++s2)
                for (int a2 = 0; a2 < A; ++a2)
                    ground(s1 * A + a1, s2 * A + a2) =
                        2.0 * (s1 != s2) + 2.0 * (a1 != a2);

    for (int t1 = 0; t1 + 1 < T; ++t1) {
        // state distribution at t2 for every initial (s, a), then the joint
        // after applying the baseline policy at t2
        Matrix states = mdp.transitions[t1]; // (S*A, S): distribution at t1+1
        for (int t2 = t1 + 1; t2 < T && t2 - t1 <= max_gap; ++t2) {
            if (t2 > t1 + 1) states = states * chain.P[t2 - 1];
            int g = t2 - t1;
            Matrix joints(S * A, S * A); // row z: joint distribution at t2
            for (int z = 0; z < S * A; ++z)
                for (int s = 0; s < S; ++s)
                    for (int a = 0; a < A; ++a)
                        joints(z, s * A + a) = states(z, s) * base.pi[t2](s, a);
            for (int z1 = 0; z1 < S * A; ++z1)
                for (int z2 = z1 + 1; z2 < S * A; ++z2) {
                    double w0 = ground(z1, z2);
                    double w = discrete_w1(joints.row(z1).transpose(),
                                           joints.row(z2).transpose(), ground);
                    cert.per_gap[g].observed = std::max(cert.per_gap[g].observed, w / w0);
                }
        }
    }
    cert.pass = cert.eps_min > 0.0;
    cert.c_s = 0.0;
    for (int g = 1; g <= max_gap; ++g) {
        if (cert.per_gap[g].observed > cert.per_gap[g].bound + 1e-12) cert.pass = false;
        cert.c_s += 2.0 * std::pow(cert.lambda, g - 1);
    }
    return cert;
}

std::vector<double> estimate_mpc_contraction(const envs::LtvSystem& sys,
                                             const baseline::MpcBaseline& base,
                                             int probes, envs::Rng& rng) {
    const int T = sys.horizon;
    const int n = sys.state_dim, m = sys.action_dim;
    std::vector<double> per_gap(T, 0.0);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);

    for (int pr = 0; pr < probes; ++pr) {
        Vector x1(n), x2(n), u1(m), u2(m);
        for (int i = 0; i < n; ++i) {
            x1(i) = unif(rng);
            x2(i) = unif(rng);
        }
        for (int i = 0; i < m; ++i) {
            u1(i) = unif(rng);
            u2(i) = unif(rng);
        }
        double d0 = std::sqrt((x1 - x2).squaredNorm() + (u1 - u2).squaredNorm());
        if (d0 < 1e-12) continue;
        Vector y1 = x1, y2 = x2, v1 = u1, v2 = u2;
        for (int t = 0; t + 1 < T; ++t) {
            y1 = envs::step_ltv(sys, t, y1, sys.clamp_to_box(v1));
            y2 = envs::step_ltv(sys, t, y2, sys.clamp_to_box(v2));
            v1 = base.action(t + 1, y1);
            v2 = base.action(t + 1, y2);
            int g = t + 1;
            double d = std::sqrt((y1 - y2).squaredNorm() + (v1 - v2).squaredNorm());
            per_gap[g] = std::max(per_gap[g], d / d0);
        }
    }
    return per_gap;
}

std::string ContractionCertificate::to_json() const {
    nlohmann::json j;
    j["eps_min"] = eps_min;
    j["lambda"] = lambda;
    j["c_s"] = c_s;
    for (const auto& g : per_gap) {
        nlohmann::json e;
        e["gap"] = g.gap;
        e["bound"] = g.bound;
        e["observed"] = g.observed;
        j["per_gap"].push_back(e);
    }
    j["pass"] = pass;
    return j.dump(2);
}

} // namespace robustness
} // namespace proplab
