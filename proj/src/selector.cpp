#include "dynsam/selector.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace dynsam {

Objective objective_from_string(std::string_view s) {
    if (s == "asym")
        return Objective::Asymmetric;
    if (s == "sym")
        return Objective::Symmetric;
    throw std::invalid_argument("unknown objective: " + std::string(s));
}

std::string_view to_string(Objective objective) {
    return objective == Objective::Asymmetric ? "asym" : "sym";
}

double info_gain(double p, Objective objective) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("info_gain requires p in [0,1], got " + std::to_string(p));
    const double q = 1.0 - p;
    return objective == Objective::Asymmetric ? p * q * q : p * q;
}

std::vector<SampleId> BatchSelection::ids() const {
    std::vector<SampleId> out;
    out.reserve(entries.size());
    for (const SelectionEntry& e : entries)
        out.push_back(e.id);
    return out;
}

namespace {

void check_batch_size(std::size_t n_candidates, std::int64_t batch_size) {
    if (batch_size < 1 || static_cast<std::size_t>(batch_size) > n_candidates) {
        throw std::invalid_argument("batch size " + std::to_string(batch_size) +
                                    " outside [1, " + std::to_string(n_candidates) +
                                    "] candidates");
    }
}

std::vector<SampleId> all_ids(const EstimatorStore& store) {
    std::vector<SampleId> ids(store.size());
    std::iota(ids.begin(), ids.end(), SampleId{0});
    return ids;
}

}  // namespace

BatchSelection select_scored(const EstimatorStore& store, std::span<const SampleId> candidates,
                             std::int64_t batch_size, Objective objective, const DrawFn& draw,
                             std::int64_t step) {
    check_batch_size(candidates.size(), batch_size);

    std::vector<SelectionEntry> scored;
    scored.reserve(candidates.size());
    for (SampleId id : candidates) {
        const double p = draw(id, store.stats(id));
        scored.push_back({id, p, info_gain(p, objective)});
    }
    // Exact top-B; ties go to the lower id so the result is order free.
    const auto better = [](const SelectionEntry& a, const SelectionEntry& b) {
        if (*a.score != *b.score)
            return *a.score > *b.score;
        return a.id < b.id;
    };
    const auto mid = scored.begin() + static_cast<std::ptrdiff_t>(batch_size);
    std::nth_element(scored.begin(), mid - 1, scored.end(), better);
    std::sort(scored.begin(), mid, better);
    scored.resize(static_cast<std::size_t>(batch_size));

    BatchSelection out;
    out.step = step;
    out.batch_size = batch_size;
    out.entries = std::move(scored);
    return out;
}

BatchSelection select_thompson(const EstimatorStore& store, std::span<const SampleId> candidates,
                               std::int64_t batch_size, Objective objective, std::uint64_t seed,
                               std::int64_t step) {
    const DrawFn draw = [seed, step](SampleId id, const SampleStats& stats) {
        SplitMix64 rng = substream(seed, kThompsonStream, static_cast<std::uint64_t>(step),
                                   static_cast<std::uint64_t>(id));
        return thompson_draw(stats, rng);
    };
    return select_scored(store, candidates, batch_size, objective, draw, step);
}

BatchSelection select_thompson(const EstimatorStore& store, std::int64_t batch_size,
                               Objective objective, std::uint64_t seed, std::int64_t step) {
    return select_thompson(store, all_ids(store), batch_size, objective, seed, step);
}

BatchSelection select_greedy(const EstimatorStore& store, std::span<const SampleId> candidates,
                             std::int64_t batch_size, Objective objective, std::int64_t step) {
    const DrawFn draw = [](SampleId, const SampleStats& stats) { return raw_mean(stats); };
    return select_scored(store, candidates, batch_size, objective, draw, step);
}

BatchSelection select_greedy(const EstimatorStore& store, std::int64_t batch_size,
                             Objective objective, std::int64_t step) {
    return select_greedy(store, all_ids(store), batch_size, objective, step);
}

BatchSelection select_random(std::span<const SampleId> candidates, std::int64_t batch_size,
                             Rng& rng, std::int64_t step) {
    check_batch_size(candidates.size(), batch_size);

    // Partial Fisher-Yates over a copy of the candidate ids.
    std::vector<SampleId> pool(candidates.begin(), candidates.end());
    BatchSelection out;
    out.step = step;
    out.batch_size = batch_size;
    out.entries.reserve(static_cast<std::size_t>(batch_size));
    for (std::int64_t i = 0; i < batch_size; ++i) {
        std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(i),
                                                        pool.size() - 1);
        std::swap(pool[static_cast<std::size_t>(i)], pool[pick(rng)]);
        out.entries.push_back({pool[static_cast<std::size_t>(i)], std::nullopt, std::nullopt});
    }
    return out;
}

}  // namespace dynsam
