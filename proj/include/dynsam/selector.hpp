#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "dynsam/estimator.hpp"
#include "dynsam/rng.hpp"
#include "dynsam/rollout.hpp"

namespace dynsam {

enum class Objective {
    Asymmetric,  // p (1 - p)^2, maximized at p = 1/3
    Symmetric,   // p (1 - p), maximized at p = 1/2
};

Objective objective_from_string(std::string_view s);
std::string_view to_string(Objective objective);

// Expected single-step training utility of a sample with correctness
// probability p. Requires p in [0, 1].
double info_gain(double p, Objective objective);

struct SelectionEntry {
    SampleId id = 0;
    std::optional<double> prob;   // drawn (or point) probability
    std::optional<double> score;  // info gain of prob; absent for random
};

struct BatchSelection {
    std::int64_t step = 0;
    std::int64_t batch_size = 0;
    std::vector<SelectionEntry> entries;  // sorted by score desc, id asc

    std::vector<SampleId> ids() const;
};

using DrawFn = std::function<double(SampleId, const SampleStats&)>;

// Shared top-B machinery: draw one probability per candidate, score it,
// keep the B best. Ties break toward the lower sample id, so selection is
// a set function of the scores and never depends on candidate order.
BatchSelection select_scored(const EstimatorStore& store, std::span<const SampleId> candidates,
                             std::int64_t batch_size, Objective objective, const DrawFn& draw,
                             std::int64_t step);

// Thompson selection: one posterior draw per candidate from a substream
// keyed by (seed, step, id).
BatchSelection select_thompson(const EstimatorStore& store, std::span<const SampleId> candidates,
                               std::int64_t batch_size, Objective objective, std::uint64_t seed,
                               std::int64_t step);
BatchSelection select_thompson(const EstimatorStore& store, std::int64_t batch_size,
                               Objective objective, std::uint64_t seed, std::int64_t step);

// Greedy ablation: scores the raw mean instead of a draw. Deterministic.
BatchSelection select_greedy(const EstimatorStore& store, std::span<const SampleId> candidates,
                             std::int64_t batch_size, Objective objective, std::int64_t step = 0);
BatchSelection select_greedy(const EstimatorStore& store, std::int64_t batch_size,
                             Objective objective, std::int64_t step = 0);

// Uniform without replacement; probabilities and scores left empty.
BatchSelection select_random(std::span<const SampleId> candidates, std::int64_t batch_size,
                             Rng& rng, std::int64_t step = 0);

}  // namespace dynsam
