#pragma once

#include "proplab/envs.hpp"
#include "proplab/oracle.hpp"

#include <string>
#include <vector>

namespace proplab {
namespace advice {

struct NonPositiveCurvature : std::runtime_error {
    explicit NonPositiveCurvature(const std::string& what) : std::runtime_error(what) {}
};

struct LipschitzViolation : std::runtime_error {
    explicit LipschitzViolation(const std::string& what) : std::runtime_error(what) {}
};

// ======================= tabular advice (finite MDPs) =======================

struct TabularAdvice {
    std::vector<Matrix> q; // per step, shape (|S|, |A|)
    double L_Q = 0.0;      // Lipschitz constant in the action under l1

    // linear extension over action distributions
    double eval(int t, int s, const envs::ActionDistribution& a) const {
        return q[t].row(s).dot(a.p.transpose());
    }
    double min_value(int t, int s) const { return q[t].row(s).minCoeff(); }
    // exact argmin (point mass), ties to the lowest action index
    envs::ActionDistribution argmin(int t, int s) const;
};

enum class PerturbMode { UniformShift, PerEntryNoise, AdversarialArgminFlip };

struct AdviceErrorSpec {
    double epsilon = 0.0;
    PerturbMode mode = PerturbMode::UniformShift;
};

TabularAdvice exact_advice(const oracle::QStarTables& tables);
TabularAdvice perturbed_advice(const oracle::QStarTables& tables, const AdviceErrorSpec& spec,
                               envs::Rng& rng);

// rho[t] has shape (|S|, |A|): weights over state-action pairs at step t.
// p <= 0 means the sup norm. The V-term uses the state marginal of rho[t].
double advice_error(const TabularAdvice& adv, const oracle::QStarTables& tables, double p,
                    const std::vector<Matrix>& rho);

// Checks the declared L_Q against probe pairs; throws LipschitzViolation.
void check_lipschitz_tabular(const TabularAdvice& adv, int probes, envs::Rng& rng);

// ======================= quadratic advice (LTV) =======================

// Qtilde_t(x, u) = 0.5 x'Pxx x + x'Pxu u + 0.5 u'Puu u + qx'x + qu'u + r
struct QuadraticAdvice {
    struct Term {
        Matrix Pxx, Pxu, Puu;
        Vector qx, qu;
        double r = 0.0;
    };
    std::vector<Term> terms; // per step
    double L_Q = 0.0;        // Lipschitz constant in u (l2) over the probe domain

    double eval(int t, const Vector& x, const Vector& u) const;
    // closed-form unconstrained minimizer clamped to the box, refined by
    // projected gradient to 1e-8 stationarity when the box is active
    Vector argmin(int t, const Vector& x, const Vector& box_lo, const Vector& box_hi) const;
    double min_value(int t, const Vector& x, const Vector& box_lo, const Vector& box_hi) const;
};

// Exact/stale value advice from the affine Riccati recursion under an assumed
// disturbance sequence (the true w gives exact Q*; a wrong w gives stale
// advice). state_radius feeds the declared L_Q bound.
QuadraticAdvice lqr_advice(const envs::LtvSystem& sys, const std::vector<Vector>& assumed_w,
                           double state_radius);

// Constant advice ignoring the state: Qtilde_t(x,u) = 0.5 curvature ||u - u0||^2.
QuadraticAdvice constant_quadratic_advice(const envs::LtvSystem& sys, const Vector& u0,
                                          double curvature);

void check_lipschitz_quadratic(const QuadraticAdvice& adv, const envs::LtvSystem& sys,
                               double state_radius, int probes, envs::Rng& rng);

// ======================= JSON =======================

std::string tabular_advice_to_json(const TabularAdvice& adv);
TabularAdvice tabular_advice_from_json(const std::string& text);

} // namespace advice
} // namespace proplab
