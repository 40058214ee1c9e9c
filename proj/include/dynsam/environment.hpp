#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dynsam/rng.hpp"
#include "dynsam/rollout.hpp"
#include "dynsam/selector.hpp"

namespace dynsam {

// Simulated stand-in for the evolving policy: ground-truth correctness
// probabilities plus their drift law.
struct EnvironmentConfig {
    std::int64_t n_samples = 2000;
    double eta1 = 0.03;    // direct learning rate for trained samples
    double eta2 = 0.0005;  // transfer rate for untrained samples
    double noise = 0.0;    // scale of zero-mean drift noise
    std::string init_dist = "mix:0.7*uniform(0.998,1.0);0.3*uniform(0.22,0.62)";
    std::uint64_t seed = 1;
};

// Parses an initial-difficulty spec and samples n values from it.
// Grammar: components joined by ';', each "[w*]base" where base is
// uniform(lo,hi), beta(a,b[,lo,hi]) or const(x). Weights default to 1 and
// are normalized. Component membership is shuffled across ids.
std::vector<double> sample_init_dist(const std::string& spec, std::int64_t n, Rng& rng);

class EnvironmentState {
   public:
    explicit EnvironmentState(const EnvironmentConfig& config);
    EnvironmentState(std::vector<double> true_p, double eta1, double eta2, double noise,
                     std::uint64_t seed);

    std::int64_t size() const { return static_cast<std::int64_t>(true_p_.size()); }
    double true_p(SampleId id) const;
    std::span<const double> true_p() const { return true_p_; }
    double mean_true_p() const;

    // correct ~ Binomial(group_size, true_p[id]).
    RolloutOutcome rollout(SampleId id, int group_size);

    // Drift law. Trained samples with a non-degenerate outcome move toward
    // 1 at rate eta1; degenerate outcomes carry no signal and leave the
    // sample unchanged. Every untrained sample receives transfer
    // eta2 * f * (1 - p) plus noise, where f is the batch's effective
    // ratio. All values clamped to [0, 1].
    void apply_training_update(const BatchSelection& batch,
                               std::span<const RolloutOutcome> outcomes);

   private:
    std::vector<double> true_p_;
    double eta1_;
    double eta2_;
    double noise_;
    Rng rng_;
};

// Mean true_p over a non-empty held-out id set; the validation score
// stand-in.
double validation_proxy(const EnvironmentState& env, std::span<const SampleId> heldout);

}  // namespace dynsam
