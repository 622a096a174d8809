#pragma once

#include "proplab/numerics.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace proplab {
namespace envs {

using Rng = std::mt19937_64;

enum class Norm { L1, L2 };

double norm_of(const Vector& v, Norm norm);

struct ActionDistribution {
    Vector p; // probabilities over |A| actions

    bool valid(double tol = 1e-12) const;
    static ActionDistribution point_mass(int a, int num_actions);
    static ActionDistribution uniform(int num_actions);
};

// ======================= finite tabular MDPs =======================

struct FiniteMdp {
    int num_states = 0;
    int num_actions = 0;
    int horizon = 0;
    // transitions[t] has shape (|S|*|A|, |S|); row s*|A|+a is P_t(s,a;.)
    std::vector<Matrix> transitions;
    // costs[t] has shape (|S|, |A|)
    std::vector<Matrix> costs;
    Norm state_norm = Norm::L1;
    Norm action_norm = Norm::L1;

    double transition(int t, int s, int a, int s2) const {
        return transitions[t](s * num_actions + a, s2);
    }
    double cost(int t, int s, int a) const { return costs[t](s, a); }
    // cost of a stochastic action: E_{j~a} c_t(s,j)
    double cost(int t, int s, const ActionDistribution& a) const {
        return costs[t].row(s).dot(a.p.transpose());
    }
    void validate() const; // throws std::runtime_error on invariant failure
};

struct InfeasibleFloor : std::runtime_error {
    explicit InfeasibleFloor(const std::string& what) : std::runtime_error(what) {}
};

// Sample j ~ a then s' ~ P_t(s,j;.); returns (s', c_t(s,j)).
std::pair<int, double> step_finite(const FiniteMdp& mdp, int t, int s,
                                   const ActionDistribution& a, Rng& rng);

// Indicator embedding e_s in n dimensions.
Vector embed_state(int s, int n);

// Random MDP with every transition entry >= min_entry and costs in (0,1].
FiniteMdp random_finite_mdp(int num_states, int num_actions, int horizon,
                            double min_entry, Rng& rng);

// Random MDP with one-hot transition rows (deterministic dynamics).
FiniteMdp random_deterministic_mdp(int num_states, int num_actions, int horizon, Rng& rng);

// ======================= linear time-varying systems =======================

struct ActionOutOfBox : std::runtime_error {
    explicit ActionOutOfBox(const std::string& what) : std::runtime_error(what) {}
};

struct LtvSystem {
    int horizon = 0;
    int state_dim = 0;
    int action_dim = 0;
    std::vector<Matrix> A; // size T
    std::vector<Matrix> B; // size T
    std::vector<Vector> w; // size T, oblivious disturbances (simulator-only)
    std::vector<Matrix> Qcost; // size T
    std::vector<Matrix> Rcost; // size T
    Matrix terminal_P;         // terminal cost matrix for MPC
    Vector box_lo, box_hi;     // per-coordinate action bounds
    Norm state_norm = Norm::L2;
    Norm action_norm = Norm::L2;

    // declared Assumption 4/5 constants; the harness trusts these and
    // check_assumptions reports any violation it can detect
    double a = 0, b = 0, d = 0, mu = 0, ell = 0;

    double box_diameter() const; // gamma under action_norm
    bool in_box(const Vector& u, double tol = 1e-9) const;
    Vector clamp_to_box(const Vector& u) const;
    // half-quadratic stage cost 0.5 (x'Qx + u'Ru)
    double stage_cost(int t, const Vector& x, const Vector& u) const;
    void declare_bounds(); // fill a, b, d, ell from the matrices; mu from cost spectra
};

Vector step_ltv(const LtvSystem& sys, int t, const Vector& x, const Vector& u);

// Rose-curve reference point y_t = [2cos(t/20)sin(t/5), 2sin(t/20)sin(t/5)].
Vector rose_point(int t);

LtvSystem build_tracking_benchmark(int T);

LtvSystem build_nonstationary_benchmark(int T, int shift_step, double pre_mean,
                                        double post_mean, double sigma, Rng& rng);

// ======================= JSON round trip =======================

std::string finite_mdp_to_json(const FiniteMdp& mdp);
FiniteMdp finite_mdp_from_json(const std::string& text);
std::string ltv_to_json(const LtvSystem& sys);
LtvSystem ltv_from_json(const std::string& text);
// dispatch on the "type" tag; exactly one output is filled
void env_from_json(const std::string& text, bool& is_finite, FiniteMdp& mdp, LtvSystem& sys);

} // namespace envs
} // namespace proplab
