#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "dynsam/baselines.hpp"
#include "dynsam/environment.hpp"
#include "dynsam/estimator.hpp"
#include "dynsam/selector.hpp"

namespace dynsam {

enum class Strategy { Thompson, Greedy, Random, Dapo };

Strategy strategy_from_string(std::string_view s);
std::string_view to_string(Strategy strategy);

struct ExperimentConfig {
    std::int64_t batch_size = 64;
    int group_size = 8;
    std::int64_t steps = 300;
    Strategy strategy = Strategy::Thompson;
    Objective objective = Objective::Asymmetric;
    EstimatorMode estimator_mode = EstimatorMode::TwoScaleDecay;
    double lambda1 = 0.2;
    double lambda2 = 0.999;
    double holdout_fraction = 0.1;
    double dapo_budget_multiplier = 3.0;
    std::uint64_t seed = 1;
    std::string out = "runs/out";
    EnvironmentConfig environment;

    // Accepts either a nested "environment" object or the environment keys
    // flattened into the root. Fills defaults, resolves the environment
    // seed from the master seed when absent.
    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    void validate() const;

    std::int64_t n_heldout() const;
    std::vector<SampleId> train_ids() const;
    std::vector<SampleId> heldout_ids() const;
};

struct StepMetrics {
    std::int64_t step = 0;
    double effective_ratio = 0.0;
    std::int64_t cumulative_rollouts = 0;
    double validation_proxy = 0.0;
    double batch_signal_proxy = 0.0;
    double regret = 0.0;
};

// Per-step instrumentation hook. Pointees are only valid during the call.
struct StepRecord {
    std::int64_t step = 0;
    const BatchSelection* selection = nullptr;
    const std::vector<RolloutOutcome>* outcomes = nullptr;
    const std::vector<SampleId>* sampled_updates = nullptr;
    const std::vector<SampleId>* unsampled_updates = nullptr;
    double mean_true_p = 0.0;
};

using StepObserver = std::function<void(const StepRecord&)>;

struct RunResult {
    std::vector<StepMetrics> metrics;
    nlohmann::json estimator_snapshot;  // array of {id, alpha, beta}
};

// Full training loop: initialization rollouts for every sample, then per
// step selection, rollouts, environment drift and estimator updates.
// Bit-reproducible for a fixed config. A DAPO run whose budget runs out
// stops early with the metrics recorded so far.
RunResult run_experiment(const ExperimentConfig& config, const StepObserver& observer = {});

// Oracle-best minus realized true info gain (asymmetric objective at
// true_p), candidates defaulting to every sample in the environment.
double compute_regret(const EnvironmentState& env, const BatchSelection& selection,
                      std::int64_t batch_size);
double compute_regret(const EnvironmentState& env, const BatchSelection& selection,
                      std::int64_t batch_size, std::span<const SampleId> candidates);

void write_metrics_csv(std::span<const StepMetrics> metrics, std::ostream& os);
std::string metrics_csv_string(std::span<const StepMetrics> metrics);

// Emits metrics.csv, config.json and estimator_final.json under dir.
void write_outputs(const RunResult& result, const ExperimentConfig& config,
                   const std::filesystem::path& dir);

}  // namespace dynsam
