#pragma once

#include "proplab/baseline.hpp"
#include "proplab/envs.hpp"

#include <string>
#include <vector>

namespace proplab {
namespace robustness {

// TV(mu, nu) = 0.5 ||mu - nu||_1
double tv_distance(const Vector& mu, const Vector& nu);

// W1 under the indicator embedding with the l1 metric: exactly 2 TV.
double w1_indicator(const Vector& mu, const Vector& nu);

// Exact discrete optimal transport (min-cost flow by successive shortest
// paths); cost(i, j) >= 0 is the ground metric between support points.
double discrete_w1(const Vector& mu, const Vector& nu, const Matrix& cost);

struct GapRecord {
    int gap = 0;
    double bound = 0;    // certified decay at this gap
    double observed = 0; // worst observed value
};

struct ContractionCertificate {
    double eps_min = 0; // minimum induced-chain entry
    double lambda = 1;  // 1 - |S| eps_min
    double c_s = 0;     // sum of s(t) over tested gaps
    std::vector<GapRecord> per_gap;
    bool pass = false;

    std::string to_json() const;
};

// Lemma-level check: TV(mu'P, nu'P) <= lambda^{t'-t} TV(mu, nu) over all
// point-mass pairs and all windows with gap <= max_gap.
ContractionCertificate certify_contraction(const envs::FiniteMdp& mdp,
                                           const baseline::TabularBaseline& base,
                                           int max_gap);

// Theorem-level check: W1 between pushed-forward joint state-action
// distributions started from point-mass pairs, against s(g) = 2 lambda^{g-1}
// times the initial W1.
ContractionCertificate certify_wasserstein_robustness(const envs::FiniteMdp& mdp,
                                                      const baseline::TabularBaseline& base,
                                                      int max_gap);

// Sampled falsifier for MPC: rolls perturbed state-action pairs forward under
// the baseline and reports the per-gap max of the trajectory-distance ratio.
std::vector<double> estimate_mpc_contraction(const envs::LtvSystem& sys,
                                             const baseline::MpcBaseline& base,
                                             int probes, envs::Rng& rng);

} // namespace robustness
} // namespace proplab
