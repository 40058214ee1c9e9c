#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "dynsam/rng.hpp"
#include "dynsam/rollout.hpp"

namespace dynsam {

// Decayed Beta sufficient statistics for one sample. The posterior used
// for draws is always Beta(alpha + 1, beta + 1).
struct SampleStats {
    double alpha = 0.0;
    double beta = 0.0;
};

// Two decay rates, fast when a sample is trained on and slow otherwise.
// Requires 0 < lambda1 < lambda2 < 1.
class DecayConfig {
   public:
    DecayConfig(double lambda1, double lambda2);

    double lambda1() const { return lambda1_; }
    double lambda2() const { return lambda2_; }

   private:
    double lambda1_;
    double lambda2_;
};

enum class EstimatorMode {
    TwoScaleDecay,  // blend history with the new outcome (default)
    LastUpdate,     // keep only the most recent outcome (ablation)
};

EstimatorMode estimator_mode_from_string(std::string_view s);
std::string_view to_string(EstimatorMode mode);

// Update for a sample that was rolled out this step.
SampleStats update_sampled(const SampleStats& stats, int correct, int group_size,
                           const DecayConfig& decay,
                           EstimatorMode mode = EstimatorMode::TwoScaleDecay);

// Update for a sample that was not selected this step.
SampleStats update_unsampled(const SampleStats& stats, const DecayConfig& decay,
                             EstimatorMode mode = EstimatorMode::TwoScaleDecay);

// Mean of Beta(alpha + 1, beta + 1).
double posterior_mean(const SampleStats& stats);

// alpha / (alpha + beta), the greedy ablation's mean estimate; 0.5 when
// no mass has been observed.
double raw_mean(const SampleStats& stats);

template <class URBG>
double thompson_draw(const SampleStats& stats, URBG& rng) {
    return draw_beta(rng, stats.alpha + 1.0, stats.beta + 1.0);
}

// Per-sample statistics for a whole dataset, ids 0..n-1.
class EstimatorStore {
   public:
    EstimatorStore(std::size_t n_samples, DecayConfig decay, EstimatorMode mode);

    std::size_t size() const { return stats_.size(); }
    const SampleStats& stats(SampleId id) const;
    const std::vector<SampleStats>& all_stats() const { return stats_; }
    const DecayConfig& decay() const { return decay_; }
    EstimatorMode mode() const { return mode_; }

    // Sets alpha = r and beta = G - r from one outcome per sample.
    // Every id in [0, n) must appear exactly once.
    void init_from_rollouts(const std::vector<RolloutOutcome>& outcomes);

    void record_sampled(SampleId id, int correct, int group_size);
    void record_unsampled(SampleId id);

    // One training step: batch ids get the sampled update, every other id
    // the unsampled update. Batch ids must be distinct.
    void apply_step(const std::vector<RolloutOutcome>& batch);

    // JSON snapshot, an array of {id, alpha, beta}.
    nlohmann::json snapshot() const;
    static EstimatorStore from_snapshot(const nlohmann::json& snap, DecayConfig decay,
                                        EstimatorMode mode);

   private:
    SampleStats& stats_mut(SampleId id);

    std::vector<SampleStats> stats_;
    DecayConfig decay_;
    EstimatorMode mode_;
    std::vector<char> touched_;  // scratch for apply_step
};

}  // namespace dynsam
