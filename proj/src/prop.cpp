#include "proplab/prop.hpp"

#include <json.hpp>

#include <cmath>
#include <sstream>

namespace proplab {
namespace prop {

using envs::ActionDistribution;
using envs::Norm;

Vector project_to_ball(const Vector& u_tilde, const Vector& u_bar, double budget, Norm norm) {
    double eta = envs::norm_of(u_tilde - u_bar, norm);
    if (eta == 0.0) return u_tilde;
    if (budget >= eta) return u_tilde;
    if (budget <= 0.0) return u_bar;
    double lam = budget / eta;
    return lam * u_tilde + (1.0 - lam) * u_bar;
}

double blackbox_budget(const Vector& u_tilde, const Vector& u_bar, double lambda, Norm norm) {
    return lambda * envs::norm_of(u_tilde - u_bar, norm);
}

double greybox_budget(double eta, double td_sum, double beta, double L_Q,
                      std::optional<double> cap) {
    double r = std::max(eta - (beta / L_Q) * td_sum, 0.0);
    r = std::min(r, eta);
    if (cap) r = std::min(r, *cap);
    return r;
}

double approx_td_error_finite(const advice::TabularAdvice& adv, int t, int s_t,
                              int prev_s, int prev_a, double prev_cost) {
    return prev_cost + adv.min_value(t, s_t) - adv.q[t - 1](prev_s, prev_a);
}

double approx_td_error_ltv(const advice::QuadraticAdvice& adv, const envs::LtvSystem& sys,
                           int t, const Vector& x_t, const Vector& prev_x,
                           const Vector& prev_u, double prev_cost) {
    return prev_cost + adv.min_value(t, x_t, sys.box_lo, sys.box_hi) -
           adv.eval(t - 1, prev_x, prev_u);
}

static double trust_of(double budget, double eta) {
    return eta > 0.0 ? std::min(1.0, budget / eta) : 1.0;
}

static int sample_index(const Vector& probs, envs::Rng& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double u = unif(rng);
    double acc = 0.0;
    for (int i = 0; i < probs.size(); ++i) {
        acc += probs(i);
        if (u < acc) return i;
    }
    return (int)probs.size() - 1;
}

TrajectoryLog run_episode(const envs::FiniteMdp& mdp, const baseline::TabularBaseline& base,
                          const advice::TabularAdvice& adv, const PropConfig& config,
                          int s0, std::uint64_t seed) {
    envs::Rng rng(seed);
    TrajectoryLog log;
    log.seed = seed;
    const int T = mdp.horizon;

    int s = s0;
    double td_sum = 0.0;
    int prev_s = -1, prev_a = -1;
    double prev_cost = 0.0;

    for (int t = 0; t < T; ++t) {
        ActionDistribution u_tilde = adv.argmin(t, s);
        ActionDistribution u_bar = base.action(t, s);
        double eta = (u_tilde.p - u_bar.p).lpNorm<1>();

        StepRecord rec;
        rec.t = t;
        rec.x = envs::embed_state(s, mdp.num_states);
        rec.u_tilde = u_tilde.p;
        rec.u_bar = u_bar.p;

        switch (config.mode) {
        case Mode::BaselineOnly:
            rec.budget = 0.0;
            break;
        case Mode::AdviceOnly:
            rec.budget = eta;
            break;
        case Mode::Black:
            rec.budget = blackbox_budget(u_tilde.p, u_bar.p, config.lambda, mdp.action_norm);
            if (config.budget_cap) rec.budget = std::min(rec.budget, *config.budget_cap);
            break;
        case Mode::Grey:
            if (t >= 1) {
                rec.td = approx_td_error_finite(adv, t, s, prev_s, prev_a, prev_cost);
                td_sum += rec.td;
            }
            rec.budget = greybox_budget(eta, td_sum, config.beta, adv.L_Q, config.budget_cap);
            break;
        }
        rec.eta = eta;
        rec.trust = trust_of(rec.budget, eta);
        rec.u = project_to_ball(u_tilde.p, u_bar.p, rec.budget, mdp.action_norm);

        // sample the atomic action, then the successor (one draw each, in
        // every mode, so fixed seeds replay identically across modes)
        int j = sample_index(rec.u, rng);
        Vector row = mdp.transitions[t].row(s * mdp.num_actions + j).transpose();
        int s_next = sample_index(row, rng);
        rec.cost = mdp.cost(t, s, j);

        prev_s = s;
        prev_a = j;
        prev_cost = rec.cost;
        s = s_next;
        log.J += rec.cost;
        log.steps.push_back(std::move(rec));
    }
    return log;
}

TrajectoryLog run_episode(const envs::LtvSystem& sys, const baseline::MpcBaseline& base,
                          const advice::QuadraticAdvice& adv, const PropConfig& config,
                          const Vector& x0, std::uint64_t seed) {
    TrajectoryLog log;
    log.seed = seed;
    const int T = sys.horizon;
    const double default_cap = sys.box_diameter();

    Vector x = x0;
    double td_sum = 0.0;
    Vector prev_x, prev_u;
    double prev_cost = 0.0;

    for (int t = 0; t < T; ++t) {
        Vector u_tilde = adv.argmin(t, x, sys.box_lo, sys.box_hi);
        Vector u_bar = base.action(t, x);
        double eta = (u_tilde - u_bar).norm();

        StepRecord rec;
        rec.t = t;
        rec.x = x;
        rec.u_tilde = u_tilde;
        rec.u_bar = u_bar;

        switch (config.mode) {
        case Mode::BaselineOnly:
            rec.budget = 0.0;
            break;
        case Mode::AdviceOnly:
            rec.budget = eta;
            break;
        case Mode::Black:
            rec.budget = blackbox_budget(u_tilde, u_bar, config.lambda, sys.action_norm);
            rec.budget = std::min(rec.budget, config.budget_cap.value_or(default_cap));
            break;
        case Mode::Grey:
            if (t >= 1) {
                rec.td = approx_td_error_ltv(adv, sys, t, x, prev_x, prev_u, prev_cost);
                td_sum += rec.td;
            }
            rec.budget = greybox_budget(eta, td_sum, config.beta, adv.L_Q,
                                        config.budget_cap.value_or(default_cap));
            break;
        }
        rec.eta = eta;
        rec.trust = trust_of(rec.budget, eta);
        rec.u = project_to_ball(u_tilde, u_bar, rec.budget, sys.action_norm);
        rec.cost = sys.stage_cost(t, x, rec.u);

        prev_x = x;
        prev_u = rec.u;
        prev_cost = rec.cost;
        x = envs::step_ltv(sys, t, x, rec.u);
        log.J += rec.cost;
        log.steps.push_back(std::move(rec));
    }
    return log;
}

std::string TrajectoryLog::to_csv() const {
    std::ostringstream out;
    out << "t,cost,eta,budget,td,trust";
    if (!steps.empty()) {
        for (int i = 0; i < steps[0].x.size(); ++i) out << ",x" << i;
        for (int i = 0; i < steps[0].u.size(); ++i) out << ",u" << i;
    }
    out << "\n";
    using numerics::format_double;
    for (const auto& s : steps) {
        out << s.t << ',' << format_double(s.cost) << ',' << format_double(s.eta) << ','
            << format_double(s.budget) << ',' << format_double(s.td) << ','
            << format_double(s.trust);
        for (int i = 0; i < s.x.size(); ++i) out << ',' << format_double(s.x(i));
        for (int i = 0; i < s.u.size(); ++i) out << ',' << format_double(s.u(i));
        out << "\n";
    }
    return out.str();
}

std::string TrajectoryLog::to_json() const {
    nlohmann::json j;
    j["J"] = J;
    j["seed"] = seed;
    for (const auto& s : steps) {
        nlohmann::json e;
        e["t"] = s.t;
        e["cost"] = s.cost;
        e["eta"] = s.eta;
        e["budget"] = s.budget;
        e["td"] = s.td;
        e["trust"] = s.trust;
        e["x"] = std::vector<double>(s.x.data(), s.x.data() + s.x.size());
        e["u_tilde"] = std::vector<double>(s.u_tilde.data(), s.u_tilde.data() + s.u_tilde.size());
        e["u_bar"] = std::vector<double>(s.u_bar.data(), s.u_bar.data() + s.u_bar.size());
        e["u"] = std::vector<double>(s.u.data(), s.u.data() + s.u.size());
        j["steps"].push_back(e);
    }
    return j.dump(2);
}

} // namespace prop
} // namespace proplab
