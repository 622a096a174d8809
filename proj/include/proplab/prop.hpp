#pragma once

#include "proplab/advice.hpp"
#include "proplab/baseline.hpp"
#include "proplab/envs.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace proplab {
namespace prop {

enum class Mode { Black, Grey, BaselineOnly, AdviceOnly };

struct PropConfig {
    Mode mode = Mode::Grey;
    double lambda = 0.5;                  // black-box, in [0,1]
    double beta = 1.0;                    // grey-box, >= 0
    std::optional<double> budget_cap;     // global R bar; action-space diameter by default
};

struct StepRecord {
    int t = 0;
    Vector x;        // state (indicator embedding for finite MDPs)
    Vector u_tilde;  // advice action
    Vector u_bar;    // baseline action
    Vector u;        // played action
    double eta = 0;  // decision discrepancy
    double budget = 0;
    double td = 0;   // approximate TD-error (0 at t = 0, where the sum is empty)
    double trust = 0;
    double cost = 0;
};

struct TrajectoryLog {
    std::vector<StepRecord> steps;
    double J = 0.0;
    std::uint64_t seed = 0;

    std::string to_csv() const;
    std::string to_json() const;
};

// lambda(R) u_tilde + (1 - lambda(R)) u_bar with lambda(R) = min{1, R/||u_tilde - u_bar||};
// returns u_tilde when the two coincide. The endpoints are returned exactly.
Vector project_to_ball(const Vector& u_tilde, const Vector& u_bar, double budget,
                       envs::Norm norm);

double blackbox_budget(const Vector& u_tilde, const Vector& u_bar, double lambda,
                       envs::Norm norm);

// R_t = [eta - (beta/L_Q) td_sum]^+, capped at eta and at the global cap.
double greybox_budget(double eta, double td_sum, double beta, double L_Q,
                      std::optional<double> cap);

// delta_t = c_{t-1} + inf_v Qtilde_t(x_t, v) - Qtilde_{t-1}(x_{t-1}, u_{t-1})
double approx_td_error_finite(const advice::TabularAdvice& adv, int t, int s_t,
                              int prev_s, int prev_a, double prev_cost);
double approx_td_error_ltv(const advice::QuadraticAdvice& adv, const envs::LtvSystem& sys,
                           int t, const Vector& x_t, const Vector& prev_x,
                           const Vector& prev_u, double prev_cost);

TrajectoryLog run_episode(const envs::FiniteMdp& mdp, const baseline::TabularBaseline& base,
                          const advice::TabularAdvice& adv, const PropConfig& config,
                          int s0, std::uint64_t seed);

TrajectoryLog run_episode(const envs::LtvSystem& sys, const baseline::MpcBaseline& base,
                          const advice::QuadraticAdvice& adv, const PropConfig& config,
                          const Vector& x0, std::uint64_t seed = 0);

} // namespace prop
} // namespace proplab
