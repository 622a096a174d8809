#include "proplab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

namespace proplab {
namespace harness {

double dynamic_regret(double J_alg, double J_star) { return J_alg - J_star; }

double ratio_of_expectations(double J_alg, double J_star) {
    if (J_star <= 0.0)
        throw NonpositiveOptimum("ratio_of_expectations: J_star <= 0");
    return J_alg / J_star;
}

// ======================= TOML subset =======================

namespace {

std::string strip(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

TomlTable::Value parse_scalar(const std::string& raw) {
    if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"')
        return raw.substr(1, raw.size() - 2);
    if (raw == "true") return true;
    if (raw == "false") return false;
    size_t pos = 0;
    double d = std::stod(raw, &pos);
    if (pos != raw.size()) throw std::runtime_error("toml: bad scalar: " + raw);
    return d;
}

} // namespace

TomlTable TomlTable::parse(const std::string& text) {
    TomlTable t;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = std::string::npos;
        bool in_str = false;
        for (size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') in_str = !in_str;
            if (line[i] == '#' && !in_str) {
                hash = i;
                break;
            }
        }
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = strip(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::runtime_error("toml: bad section at line " + std::to_string(lineno));
            section = strip(line.substr(1, line.size() - 2));
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("toml: expected key = value at line " +
                                     std::to_string(lineno));
        std::string key = strip(line.substr(0, eq));
        std::string raw = strip(line.substr(eq + 1));
        if (key.empty() || raw.empty())
            throw std::runtime_error("toml: empty key or value at line " + std::to_string(lineno));
        if (raw.front() == '[') {
            if (raw.back() != ']')
                throw std::runtime_error("toml: unterminated array at line " +
                                         std::to_string(lineno));
            std::string body = strip(raw.substr(1, raw.size() - 2));
            std::vector<double> nums;
            std::vector<std::string> strs;
            bool is_str = false;
            if (!body.empty()) {
                std::istringstream items(body);
                std::string item;
                while (std::getline(items, item, ',')) {
                    item = strip(item);
                    Value v = parse_scalar(item);
                    if (std::holds_alternative<std::string>(v)) {
                        is_str = true;
                        strs.push_back(std::get<std::string>(v));
                    } else if (std::holds_alternative<double>(v)) {
                        nums.push_back(std::get<double>(v));
                    } else {
                        throw std::runtime_error("toml: bad array element: " + item);
                    }
                }
            }
            if (is_str)
                t.sections_[section][key] = strs;
            else
                t.sections_[section][key] = nums;
        } else {
            t.sections_[section][key] = parse_scalar(raw);
        }
    }
    return t;
}

TomlTable TomlTable::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

bool TomlTable::has(const std::string& section, const std::string& key) const {
    auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
}

std::string TomlTable::get_string(const std::string& section, const std::string& key,
                                  const std::string& fallback) const {
    if (!has(section, key)) return fallback;
    return std::get<std::string>(sections_.at(section).at(key));
}

double TomlTable::get_double(const std::string& section, const std::string& key,
                             double fallback) const {
    if (!has(section, key)) return fallback;
    return std::get<double>(sections_.at(section).at(key));
}

bool TomlTable::get_bool(const std::string& section, const std::string& key,
                         bool fallback) const {
    if (!has(section, key)) return fallback;
    return std::get<bool>(sections_.at(section).at(key));
}

std::vector<double> TomlTable::get_double_array(const std::string& section,
                                                const std::string& key) const {
    if (!has(section, key)) return {};
    return std::get<std::vector<double>>(sections_.at(section).at(key));
}

// ======================= config =======================

ExperimentConfig ExperimentConfig::from_toml(const TomlTable& t) {
    ExperimentConfig c;
    c.id = t.get_string("experiment", "id", c.id);
    c.episodes = (int)t.get_double("experiment", "episodes", c.episodes);
    if (t.has("experiment", "seeds")) {
        c.seeds.clear();
        for (double s : t.get_double_array("experiment", "seeds"))
            c.seeds.push_back((std::uint64_t)s);
    }
    if (c.seeds.empty()) throw std::runtime_error("config: seeds must be nonempty");

    c.env_builder = t.get_string("env", "builder", c.env_builder);
    c.env_path = t.get_string("env", "path", c.env_path);
    c.T = (int)t.get_double("env", "T", c.T);
    c.shift_step = (int)t.get_double("env", "shift_step", c.T / 2);
    c.pre_mean = t.get_double("env", "pre_mean", c.pre_mean);
    c.post_mean = t.get_double("env", "post_mean", c.post_mean);
    c.noise_sigma = t.get_double("env", "sigma", c.noise_sigma);
    c.S = (int)t.get_double("env", "S", c.S);
    c.A = (int)t.get_double("env", "A", c.A);
    c.min_entry = t.get_double("env", "min_entry", c.min_entry);
    c.env_seed = (std::uint64_t)t.get_double("env", "env_seed", 0);

    c.baseline_type = t.get_string("baseline", "type", c.baseline_type);
    c.mpc_k = (int)t.get_double("baseline", "k", c.mpc_k);

    c.advice_type = t.get_string("advice", "type", c.advice_type);
    c.epsilon = t.get_double("advice", "epsilon", c.epsilon);
    std::string mode = t.get_string("advice", "mode", "uniform-shift");
    if (mode == "uniform-shift")
        c.perturb_mode = advice::PerturbMode::UniformShift;
    else if (mode == "per-entry-noise")
        c.perturb_mode = advice::PerturbMode::PerEntryNoise;
    else if (mode == "adversarial-argmin-flip")
        c.perturb_mode = advice::PerturbMode::AdversarialArgminFlip;
    else
        throw std::runtime_error("config: unknown perturbation mode: " + mode);
    c.assumed_mean = t.get_double("advice", "assumed_mean", c.assumed_mean);
    c.constant_u0 = t.get_double_array("advice", "u0");
    c.constant_curvature = t.get_double("advice", "curvature", c.constant_curvature);

    std::string pm = t.get_string("prop", "mode", "grey");
    if (pm == "black")
        c.prop.mode = prop::Mode::Black;
    else if (pm == "grey")
        c.prop.mode = prop::Mode::Grey;
    else if (pm == "baseline-only")
        c.prop.mode = prop::Mode::BaselineOnly;
    else if (pm == "advice-only")
        c.prop.mode = prop::Mode::AdviceOnly;
    else
        throw std::runtime_error("config: unknown prop mode: " + pm);
    c.prop.lambda = t.get_double("prop", "lambda", c.prop.lambda);
    c.prop.beta = t.get_double("prop", "beta", c.prop.beta);
    double cap = t.get_double("prop", "budget_cap", 0.0);
    if (cap > 0.0) c.prop.budget_cap = cap;
    return c;
}

// ======================= experiment machinery =======================

namespace {

struct BuiltEnv {
    bool is_finite = false;
    envs::FiniteMdp mdp;
    envs::LtvSystem sys;
};

BuiltEnv build_env(const ExperimentConfig& c) {
    BuiltEnv e;
    if (c.env_builder == "tracking") {
        e.sys = envs::build_tracking_benchmark(c.T);
    } else if (c.env_builder == "nonstationary") {
        envs::Rng rng(c.env_seed);
        e.sys = envs::build_nonstationary_benchmark(c.T, c.shift_step, c.pre_mean, c.post_mean,
                                                    c.noise_sigma, rng);
    } else if (c.env_builder == "random_finite") {
        envs::Rng rng(c.env_seed);
        e.is_finite = true;
        e.mdp = envs::random_finite_mdp(c.S, c.A, c.T, c.min_entry, rng);
    } else if (c.env_builder == "random_deterministic") {
        envs::Rng rng(c.env_seed);
        e.is_finite = true;
        e.mdp = envs::random_deterministic_mdp(c.S, c.A, c.T, rng);
    } else if (c.env_builder == "file") {
        std::ifstream in(c.env_path);
        if (!in) throw std::runtime_error("cannot open env file: " + c.env_path);
        std::ostringstream buf;
        buf << in.rdbuf();
        envs::env_from_json(buf.str(), e.is_finite, e.mdp, e.sys);
    } else {
        throw std::runtime_error("unknown env builder: " + c.env_builder);
    }
    return e;
}

std::uint64_t episode_seed(std::uint64_t seed, int episode) {
    return seed * 1000003ull + (std::uint64_t)episode;
}

std::vector<MetricsRow> run_finite(const ExperimentConfig& c, const BuiltEnv& env) {
    const auto& mdp = env.mdp;
    auto tables = oracle::backward_induction(mdp);
    envs::Rng advice_rng(c.env_seed + 1);
    advice::TabularAdvice adv;
    if (c.advice_type == "exact") {
        adv = advice::exact_advice(tables);
    } else if (c.advice_type == "perturbed") {
        advice::AdviceErrorSpec spec{c.epsilon, c.perturb_mode};
        adv = advice::perturbed_advice(tables, spec, advice_rng);
    } else {
        throw std::runtime_error("finite env supports advice type exact|perturbed, got: " +
                                 c.advice_type);
    }
    if (c.baseline_type != "tabular_uniform")
        throw std::runtime_error("finite env supports baseline type tabular_uniform, got: " +
                                 c.baseline_type);
    auto base = baseline::TabularBaseline::uniform(mdp.num_states, mdp.num_actions, mdp.horizon);
    const int s0 = 0;
    const double J_star = tables.v[0](s0);

    prop::PropConfig base_cfg = c.prop;
    base_cfg.mode = prop::Mode::BaselineOnly;

    std::vector<MetricsRow> rows;
    for (std::uint64_t seed : c.seeds) {
        MetricsRow r;
        r.config_id = c.id;
        r.seed = seed;
        r.J_star = J_star;
        // empirical state-action weights of the PROP trajectories (Eq.-4 rho)
        std::vector<Matrix> rho(mdp.horizon,
                                Matrix::Zero(mdp.num_states, mdp.num_actions));
        for (int e = 0; e < c.episodes; ++e) {
            std::uint64_t es = episode_seed(seed, e);
            auto log = prop::run_episode(mdp, base, adv, c.prop, s0, es);
            auto blog = prop::run_episode(mdp, base, adv, base_cfg, s0, es);
            r.J_alg += log.J;
            r.J_base += blog.J;
            for (const auto& step : log.steps) {
                int s = 0;
                step.x.maxCoeff(&s);
                rho[step.t].row(s) += step.u.transpose() / c.episodes;
                r.mean_trust += step.trust;
                r.mean_abs_td += std::abs(step.td);
            }
        }
        r.J_alg /= c.episodes;
        r.J_base /= c.episodes;
        r.mean_trust /= c.episodes * mdp.horizon;
        r.mean_abs_td /= c.episodes * mdp.horizon;
        r.eps = advice::advice_error(adv, tables, std::numeric_limits<double>::infinity(), rho);
        r.DR = dynamic_regret(r.J_alg, J_star);
        r.RoE = ratio_of_expectations(r.J_alg, J_star);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<MetricsRow> run_ltv(const ExperimentConfig& c, const BuiltEnv& env) {
    const auto& sys = env.sys;
    if (c.baseline_type != "mpc")
        throw std::runtime_error("ltv env supports baseline type mpc, got: " + c.baseline_type);
    baseline::MpcBaseline base(sys, c.mpc_k);
    const Vector x0 = Vector::Zero(sys.state_dim);

    // baseline-only rollout: cost anchor and the state radius for L_Q
    prop::PropConfig base_cfg = c.prop;
    base_cfg.mode = prop::Mode::BaselineOnly;
    advice::QuadraticAdvice probe = advice::constant_quadratic_advice(sys, Vector::Zero(sys.action_dim), 1.0);
    auto blog = prop::run_episode(sys, base, probe, base_cfg, x0);
    double radius = 1.0;
    for (const auto& s : blog.steps) radius = std::max(radius, s.x.norm());
    radius = 2.0 * radius + 1.0;

    advice::QuadraticAdvice adv;
    if (c.advice_type == "exact") {
        adv = advice::lqr_advice(sys, sys.w, radius);
    } else if (c.advice_type == "stale") {
        std::vector<Vector> assumed(sys.horizon,
                                    Vector::Constant(sys.state_dim, c.assumed_mean));
        adv = advice::lqr_advice(sys, assumed, radius);
    } else if (c.advice_type == "constant") {
        Vector u0 = Vector::Constant(sys.action_dim, 1.0);
        if (!c.constant_u0.empty()) {
            u0 = Vector((int)c.constant_u0.size());
            for (size_t i = 0; i < c.constant_u0.size(); ++i) u0(i) = c.constant_u0[i];
        }
        adv = advice::constant_quadratic_advice(sys, u0, c.constant_curvature);
    } else if (c.advice_type == "perturbed") {
        adv = advice::lqr_advice(sys, sys.w, radius);
        // controlled argmin shift: move each step's linear term by epsilon
        envs::Rng rng(c.env_seed + 1);
        std::normal_distribution<double> g(0.0, 1.0);
        for (auto& term : adv.terms) {
            Vector e(sys.action_dim);
            for (int i = 0; i < e.size(); ++i) e(i) = g(rng);
            if (e.norm() > 0) e /= e.norm();
            term.qu += c.epsilon * e;
        }
        adv.L_Q += c.epsilon;
    } else {
        throw std::runtime_error("ltv env supports advice type exact|stale|constant|perturbed, got: " +
                                 c.advice_type);
    }

    auto opt = oracle::offline_optimal_ltv(sys, x0);
    auto log = prop::run_episode(sys, base, adv, c.prop, x0);

    std::vector<MetricsRow> rows;
    for (std::uint64_t seed : c.seeds) {
        MetricsRow r;
        r.config_id = c.id;
        r.seed = seed;
        r.J_alg = log.J;
        r.J_base = blog.J;
        r.J_star = opt.J;
        r.eps = c.epsilon; // requested perturbation scale (reporting only)
        r.DR = dynamic_regret(log.J, opt.J);
        r.RoE = ratio_of_expectations(log.J, opt.J);
        auto tt = trust_trace(log);
        r.mean_trust = tt.mean;
        double abs_td = 0.0;
        for (const auto& s : log.steps) abs_td += std::abs(s.td);
        r.mean_abs_td = abs_td / sys.horizon;
        rows.push_back(std::move(r));
    }
    return rows;
}

} // namespace

std::vector<MetricsRow> run_experiment(const ExperimentConfig& config, const RowSink& sink) {
    BuiltEnv env = build_env(config);
    auto rows = env.is_finite ? run_finite(config, env) : run_ltv(config, env);
    if (sink)
        for (const auto& r : rows) sink(r);
    return rows;
}

std::vector<MetricsRow> sweep(const ExperimentConfig& config, const std::string& parameter,
                              const std::vector<double>& grid, int workers,
                              const RowSink& sink) {
    if (grid.empty()) throw std::runtime_error("sweep: empty grid");
    std::vector<ExperimentConfig> variants;
    for (double v : grid) {
        ExperimentConfig c = config;
        if (parameter == "lambda")
            c.prop.lambda = v;
        else if (parameter == "beta")
            c.prop.beta = v;
        else if (parameter == "epsilon")
            c.epsilon = v;
        else
            throw std::runtime_error("sweep: unknown parameter: " + parameter);
        variants.push_back(std::move(c));
    }

    std::vector<std::vector<MetricsRow>> results(variants.size());
    std::vector<std::exception_ptr> errors(variants.size());
    std::atomic<size_t> next{0};
    if (workers <= 0) workers = (int)std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<int>(workers, (int)variants.size());

    auto body = [&]() {
        for (size_t i = next.fetch_add(1); i < variants.size(); i = next.fetch_add(1)) {
            try {
                results[i] = run_experiment(variants[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int i = 1; i < workers; ++i) pool.emplace_back(body);
    body();
    for (auto& th : pool) th.join();

    std::vector<MetricsRow> rows;
    for (size_t i = 0; i < variants.size(); ++i) {
        if (errors[i]) std::rethrow_exception(errors[i]);
        for (auto r : results[i]) {
            r.param = parameter;
            r.param_value = grid[i];
            if (sink) sink(r);
            rows.push_back(std::move(r));
        }
    }
    return rows;
}

// ======================= CSV =======================

std::string metrics_csv_header() {
    return "config_id,seed,param,param_value,J_alg,J_base,J_star,DR,RoE,eps,mean_trust,"
           "mean_abs_td";
}

std::string metrics_csv_row(const MetricsRow& r) {
    using numerics::format_double;
    std::ostringstream out;
    out << r.config_id << ',' << r.seed << ',' << r.param << ','
        << format_double(r.param_value) << ',' << format_double(r.J_alg) << ','
        << format_double(r.J_base) << ',' << format_double(r.J_star) << ','
        << format_double(r.DR) << ',' << format_double(r.RoE) << ',' << format_double(r.eps)
        << ',' << format_double(r.mean_trust) << ',' << format_double(r.mean_abs_td);
    return out.str();
}

// ======================= trajectory summaries =======================

TrustTrace trust_trace(const prop::TrajectoryLog& log) {
    TrustTrace t;
    for (const auto& s : log.steps) {
        t.per_step.push_back(s.trust);
        t.mean += s.trust;
    }
    if (!t.per_step.empty()) t.mean /= (double)t.per_step.size();
    return t;
}

ShiftSummary nonstationary_report(const prop::TrajectoryLog& log,
                                  const prop::TrajectoryLog& baseline_log, int shift_step,
                                  int window) {
    ShiftSummary out;
    const int T = (int)log.steps.size();
    int pre = 0, post = 0;
    for (const auto& s : log.steps) {
        if (s.t < shift_step) {
            out.pre_trust += s.trust;
            out.pre_abs_td += std::abs(s.td);
            ++pre;
        } else {
            out.post_trust += s.trust;
            out.post_abs_td += std::abs(s.td);
            ++post;
        }
    }
    if (pre > 0) {
        out.pre_trust /= pre;
        out.pre_abs_td /= pre;
    }
    if (post > 0) {
        out.post_trust /= post;
        out.post_abs_td /= post;
    }
    for (int t = shift_step; t + window <= T; ++t) {
        double c_alg = 0, c_base = 0;
        for (int i = t; i < t + window; ++i) {
            c_alg += log.steps[i].cost;
            c_base += baseline_log.steps[i].cost;
        }
        if (c_alg <= 1.1 * c_base) {
            out.recovery_step = t;
            break;
        }
    }
    return out;
}

} // namespace harness
} // namespace proplab
