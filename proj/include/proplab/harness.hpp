#pragma once

#include "proplab/advice.hpp"
#include "proplab/baseline.hpp"
#include "proplab/envs.hpp"
#include "proplab/oracle.hpp"
#include "proplab/prop.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace proplab {
namespace harness {

struct NonpositiveOptimum : std::runtime_error {
    explicit NonpositiveOptimum(const std::string& what) : std::runtime_error(what) {}
};

double dynamic_regret(double J_alg, double J_star);
double ratio_of_expectations(double J_alg, double J_star);

// ======================= TOML subset =======================

// Flat sections of scalars and one-dimensional arrays; enough for the
// experiment configs. Unsupported syntax raises std::runtime_error.
class TomlTable {
public:
    using Value = std::variant<std::string, double, bool, std::vector<double>,
                               std::vector<std::string>>;

    static TomlTable parse(const std::string& text);
    static TomlTable parse_file(const std::string& path);

    bool has(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key,
                      double fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
    std::vector<double> get_double_array(const std::string& section,
                                         const std::string& key) const;

private:
    std::map<std::string, std::map<std::string, Value>> sections_;
};

// ======================= experiment configuration =======================

struct ExperimentConfig {
    std::string id = "experiment";
    int episodes = 1;
    std::vector<std::uint64_t> seeds{0};

    // env
    std::string env_builder = "tracking"; // tracking|nonstationary|random_finite|random_deterministic|file
    std::string env_path;
    int T = 100;
    int shift_step = 50;
    double pre_mean = 0.5, post_mean = -0.5, noise_sigma = 0.05;
    int S = 4, A = 3;
    double min_entry = 0.05;
    std::uint64_t env_seed = 0;

    // baseline
    std::string baseline_type = "mpc"; // mpc | tabular_uniform
    int mpc_k = 10;

    // advice
    std::string advice_type = "exact"; // exact | perturbed | stale | constant
    double epsilon = 0.0;
    advice::PerturbMode perturb_mode = advice::PerturbMode::UniformShift;
    double assumed_mean = 0.0; // stale LTV advice disturbance guess
    std::vector<double> constant_u0;
    double constant_curvature = 1e-4;

    // prop
    prop::PropConfig prop;

    static ExperimentConfig from_toml(const TomlTable& t);
};

struct MetricsRow {
    std::string config_id;
    std::uint64_t seed = 0;
    std::string param = "-";
    double param_value = 0.0;
    double J_alg = 0, J_base = 0, J_star = 0;
    double DR = 0, RoE = 0;
    double eps = 0;
    double mean_trust = 0, mean_abs_td = 0;
};

std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsRow& r);

using RowSink = std::function<void(const MetricsRow&)>;

// One row per seed; deterministic given config. sink (optional) receives rows
// as they complete, already in output order.
std::vector<MetricsRow> run_experiment(const ExperimentConfig& config,
                                       const RowSink& sink = nullptr);

// Cross product of grid x seeds; parameter is "lambda", "beta", or "epsilon".
// Grid points run concurrently on a bounded worker pool; rows are sorted
// (grid order, then seed order) before sinking.
std::vector<MetricsRow> sweep(const ExperimentConfig& config, const std::string& parameter,
                              const std::vector<double>& grid, int workers = 0,
                              const RowSink& sink = nullptr);

// ======================= trajectory summaries =======================

struct TrustTrace {
    std::vector<double> per_step;
    double mean = 0.0;
};
TrustTrace trust_trace(const prop::TrajectoryLog& log);

struct ShiftSummary {
    double pre_trust = 0, post_trust = 0;
    double pre_abs_td = 0, post_abs_td = 0;
    int recovery_step = -1; // first post-shift step with windowed cost <= 1.1x baseline
};
ShiftSummary nonstationary_report(const prop::TrajectoryLog& log,
                                  const prop::TrajectoryLog& baseline_log, int shift_step,
                                  int window = 10);

} // namespace harness
} // namespace proplab
