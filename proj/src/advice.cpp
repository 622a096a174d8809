#include "proplab/advice.hpp"

#include <json.hpp>

#include <cmath>

namespace proplab {
namespace advice {

using envs::ActionDistribution;

// ======================= tabular =======================

ActionDistribution TabularAdvice::argmin(int t, int s) const {
    int best = 0;
    for (int a = 1; a < q[t].cols(); ++a)
        if (q[t](s, a) < q[t](s, best)) best = a;
    return ActionDistribution::point_mass(best, (int)q[t].cols());
}

static double tabular_lq(const std::vector<Matrix>& q) {
    // linear extension under l1: the sharp constant is half the value range
    double lq = 0.0;
    for (const auto& m : q)
        for (int s = 0; s < m.rows(); ++s)
            lq = std::max(lq, (m.row(s).maxCoeff() - m.row(s).minCoeff()) / 2.0);
    return lq;
}

TabularAdvice exact_advice(const oracle::QStarTables& tables) {
    TabularAdvice adv;
    adv.q = tables.q;
    adv.L_Q = std::max(tabular_lq(adv.q), 1e-12);
    return adv;
}

TabularAdvice perturbed_advice(const oracle::QStarTables& tables, const AdviceErrorSpec& spec,
                               envs::Rng& rng) {
    TabularAdvice adv;
    adv.q = tables.q;
    const int T = tables.horizon;
    const double c = spec.epsilon / (2.0 * T); // both Eq.-4 terms move by <= c per step
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    if (spec.epsilon > 0.0) {
        switch (spec.mode) {
        case PerturbMode::UniformShift:
            for (auto& m : adv.q) m.array() += c;
            break;
        case PerturbMode::PerEntryNoise:
            for (auto& m : adv.q)
                for (int s = 0; s < m.rows(); ++s)
                    for (int a = 0; a < m.cols(); ++a) m(s, a) += c * unif(rng);
            break;
        case PerturbMode::AdversarialArgminFlip:
            // raise the optimal entry, lower the worst one: the advice argmin
            // moves toward the worst action once c clears half the gap
            for (int t = 0; t < T; ++t)
                for (int s = 0; s < adv.q[t].rows(); ++s) {
                    int best = 0, worst = 0;
                    for (int a = 1; a < adv.q[t].cols(); ++a) {
                        if (adv.q[t](s, a) < adv.q[t](s, best)) best = a;
                        if (adv.q[t](s, a) > adv.q[t](s, worst)) worst = a;
                    }
                    if (best != worst) {
                        adv.q[t](s, best) += c;
                        adv.q[t](s, worst) -= c;
                    }
                }
            break;
        }
    }
    adv.L_Q = std::max(tabular_lq(adv.q), 1e-12);
    return adv;
}

double advice_error(const TabularAdvice& adv, const oracle::QStarTables& tables, double p,
                    const std::vector<Matrix>& rho) {
    const bool sup_norm = !(p > 0.0) || std::isinf(p);
    double total = 0.0;
    for (int t = 0; t < tables.horizon; ++t) {
        const Matrix diff_q = (adv.q[t] - tables.q[t]).cwiseAbs();
        Vector diff_v(tables.q[t].rows());
        for (int s = 0; s < tables.q[t].rows(); ++s)
            diff_v(s) = std::abs(adv.q[t].row(s).minCoeff() - tables.v[t](s));
        double term_q = 0.0, term_v = 0.0;
        if (sup_norm) {
            for (int s = 0; s < diff_q.rows(); ++s)
                for (int a = 0; a < diff_q.cols(); ++a)
                    if (rho[t](s, a) > 0.0) {
                        term_q = std::max(term_q, diff_q(s, a));
                        term_v = std::max(term_v, diff_v(s));
                    }
        } else {
            for (int s = 0; s < diff_q.rows(); ++s) {
                double phi = rho[t].row(s).sum();
                for (int a = 0; a < diff_q.cols(); ++a)
                    term_q += rho[t](s, a) * std::pow(diff_q(s, a), p);
                term_v += phi * std::pow(diff_v(s), p);
            }
            term_q = std::pow(term_q, 1.0 / p);
            term_v = std::pow(term_v, 1.0 / p);
        }
        total += term_q + term_v;
    }
    return total;
}

void check_lipschitz_tabular(const TabularAdvice& adv, int probes, envs::Rng& rng) {
    const int T = (int)adv.q.size();
    if (T == 0) return;
    const int S = (int)adv.q[0].rows(), A = (int)adv.q[0].cols();
    std::uniform_int_distribution<int> pick_t(0, T - 1), pick_s(0, S - 1);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int i = 0; i < probes; ++i) {
        int t = pick_t(rng), s = pick_s(rng);
        ActionDistribution p1, p2;
        p1.p = Vector(A);
        p2.p = Vector(A);
        for (int a = 0; a < A; ++a) {
            p1.p(a) = unif(rng);
            p2.p(a) = unif(rng);
        }
        p1.p /= p1.p.sum();
        p2.p /= p2.p.sum();
        double dist = (p1.p - p2.p).lpNorm<1>();
        if (dist < 1e-12) continue;
        double gap = std::abs(adv.eval(t, s, p1) - adv.eval(t, s, p2));
        if (gap > adv.L_Q * dist * (1.0 + 1e-9) + 1e-12)
            throw LipschitzViolation("tabular advice violates the declared L_Q");
    }
}

// ======================= quadratic =======================

double QuadraticAdvice::eval(int t, const Vector& x, const Vector& u) const {
    const Term& m = terms[t];
    return 0.5 * x.dot(m.Pxx * x) + x.dot(m.Pxu * u) + 0.5 * u.dot(m.Puu * u) +
           m.qx.dot(x) + m.qu.dot(u) + m.r;
}

Vector QuadraticAdvice::argmin(int t, const Vector& x, const Vector& box_lo,
                               const Vector& box_hi) const {
    const Term& m = terms[t];
    Eigen::LLT<Matrix> llt(m.Puu);
    if (llt.info() != Eigen::Success)
        throw NonPositiveCurvature("quadratic advice: u-block not positive definite");
    Vector lin = m.Pxu.transpose() * x + m.qu;
    Vector u = (-llt.solve(lin)).cwiseMax(box_lo).cwiseMin(box_hi);
    // projected gradient cleans up when the clamp was active
    double step = 1.0 / numerics::max_symmetric_eigenvalue(m.Puu);
    for (int it = 0; it < 10000; ++it) {
        Vector grad = m.Puu * u + lin;
        Vector next = (u - step * grad).cwiseMax(box_lo).cwiseMin(box_hi);
        double move = (next - u).norm();
        u = next;
        if (move <= 1e-10) break;
    }
    return u;
}

double QuadraticAdvice::min_value(int t, const Vector& x, const Vector& box_lo,
                                  const Vector& box_hi) const {
    return eval(t, x, argmin(t, x, box_lo, box_hi));
}

static double quadratic_lq(const QuadraticAdvice& adv, const envs::LtvSystem& sys,
                           double state_radius) {
    // sup over the probe domain of ||grad_u Q|| = ||Pxu'x + Puu u + qu||
    double u_rad = std::max(sys.box_lo.norm(), sys.box_hi.norm());
    double lq = 0.0;
    for (const auto& m : adv.terms)
        lq = std::max(lq, numerics::spectral_norm(m.Pxu.transpose()) * state_radius +
                              numerics::spectral_norm(m.Puu) * u_rad + m.qu.norm());
    return std::max(lq, 1e-12);
}

QuadraticAdvice lqr_advice(const envs::LtvSystem& sys, const std::vector<Vector>& assumed_w,
                           double state_radius) {
    const int T = sys.horizon;
    const int n = sys.state_dim, m = sys.action_dim;
    QuadraticAdvice adv;
    adv.terms.resize(T);

    // final stage: Q_{T-1}(x,u) = c_{T-1}(x,u), zero continuation
    adv.terms[T - 1].Pxx = sys.Qcost[T - 1];
    adv.terms[T - 1].Pxu = Matrix::Zero(n, m);
    adv.terms[T - 1].Puu = sys.Rcost[T - 1];
    adv.terms[T - 1].qx = Vector::Zero(n);
    adv.terms[T - 1].qu = Vector::Zero(m);

    // affine value function V_t(x) = 0.5 x'Px + p'x + r
    Matrix P = sys.Qcost[T - 1];
    Vector p = Vector::Zero(n);
    double r = 0.0;
    for (int t = T - 2; t >= 0; --t) {
        const Vector& wh = assumed_w[t];
        QuadraticAdvice::Term& term = adv.terms[t];
        term.Pxx = sys.Qcost[t] + sys.A[t].transpose() * P * sys.A[t];
        term.Pxu = sys.A[t].transpose() * P * sys.B[t];
        term.Puu = sys.Rcost[t] + sys.B[t].transpose() * P * sys.B[t];
        Vector pw = P * wh + p;
        term.qx = sys.A[t].transpose() * pw;
        term.qu = sys.B[t].transpose() * pw;
        term.r = 0.5 * wh.dot(P * wh) + p.dot(wh) + r;

        Eigen::LLT<Matrix> llt(term.Puu);
        if (llt.info() != Eigen::Success)
            throw NonPositiveCurvature("lqr_advice: R + B'PB not positive definite");
        Matrix Kinv_pxu = llt.solve(term.Pxu.transpose());
        Vector Kinv_qu = llt.solve(term.qu);
        P = term.Pxx - term.Pxu * Kinv_pxu;
        P = 0.5 * (P + P.transpose()).eval();
        p = term.qx - term.Pxu * Kinv_qu;
        r = term.r - 0.5 * term.qu.dot(Kinv_qu);
    }
    adv.L_Q = quadratic_lq(adv, sys, state_radius);
    return adv;
}

QuadraticAdvice constant_quadratic_advice(const envs::LtvSystem& sys, const Vector& u0,
                                          double curvature) {
    const int n = sys.state_dim, m = sys.action_dim;
    QuadraticAdvice adv;
    QuadraticAdvice::Term term;
    term.Pxx = Matrix::Zero(n, n);
    term.Pxu = Matrix::Zero(n, m);
    term.Puu = curvature * Matrix::Identity(m, m);
    term.qx = Vector::Zero(n);
    term.qu = -curvature * u0;
    term.r = 0.5 * curvature * u0.squaredNorm();
    adv.terms.assign(sys.horizon, term);
    adv.L_Q = quadratic_lq(adv, sys, 1.0);
    return adv;
}

void check_lipschitz_quadratic(const QuadraticAdvice& adv, const envs::LtvSystem& sys,
                               double state_radius, int probes, envs::Rng& rng) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::uniform_int_distribution<int> pick_t(0, (int)adv.terms.size() - 1);
    const int n = sys.state_dim, m = sys.action_dim;
    for (int i = 0; i < probes; ++i) {
        int t = pick_t(rng);
        Vector x(n), u(m), v(m);
        for (int j = 0; j < n; ++j) x(j) = state_radius * unif(rng);
        if (x.norm() > state_radius) x *= state_radius / x.norm();
        for (int j = 0; j < m; ++j) {
            u(j) = sys.box_lo(j) + (unif(rng) + 1.0) / 2.0 * (sys.box_hi(j) - sys.box_lo(j));
            v(j) = sys.box_lo(j) + (unif(rng) + 1.0) / 2.0 * (sys.box_hi(j) - sys.box_lo(j));
        }
        double dist = (u - v).norm();
        if (dist < 1e-12) continue;
        double gap = std::abs(adv.eval(t, x, u) - adv.eval(t, x, v));
        if (gap > adv.L_Q * dist * (1.0 + 1e-9) + 1e-12)
            throw LipschitzViolation("quadratic advice violates the declared L_Q");
    }
}

// ======================= JSON =======================

std::string tabular_advice_to_json(const TabularAdvice& adv) {
    nlohmann::json j;
    j["L_Q"] = adv.L_Q;
    for (const auto& m : adv.q) {
        nlohmann::json e;
        e["rows"] = m.rows();
        e["cols"] = m.cols();
        std::vector<double> flat;
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c) flat.push_back(m(r, c));
        e["data"] = flat;
        j["q"].push_back(e);
    }
    return j.dump(2);
}

TabularAdvice tabular_advice_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    TabularAdvice adv;
    adv.L_Q = j.at("L_Q").get<double>();
    for (const auto& e : j.at("q")) {
        Matrix m(e.at("rows").get<int>(), e.at("cols").get<int>());
        const auto& flat = e.at("data");
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c)
                m(r, c) = flat.at(r * m.cols() + c).get<double>();
        adv.q.push_back(std::move(m));
    }
    return adv;
}

} // namespace advice
} // namespace proplab
