#include "dynsam/baselines.hpp"

#include <algorithm>
#include <string>

namespace dynsam {

DapoBatch dapo_fill_batch(EnvironmentState& env, std::span<const SampleId> candidates,
                          std::int64_t batch_size, int group_size, RolloutBudget& budget,
                          Rng& rng) {
    if (batch_size < 1 || static_cast<std::size_t>(batch_size) > candidates.size()) {
        throw std::invalid_argument("dapo batch size " + std::to_string(batch_size) +
                                    " outside [1, " + std::to_string(candidates.size()) + "]");
    }
    if (group_size < 1)
        throw std::invalid_argument("dapo needs group_size >= 1");
    if (budget.remaining() < batch_size * group_size) {
        throw BudgetExhausted("dapo budget cannot cover one batch: remaining " +
                                  std::to_string(budget.remaining()),
                              {});
    }

    const std::int64_t attempt_cap =
        std::min<std::int64_t>(3 * batch_size, static_cast<std::int64_t>(candidates.size()));

    // Uniform without replacement within the step.
    std::vector<SampleId> pool(candidates.begin(), candidates.end());

    DapoBatch out;
    out.outcomes.reserve(static_cast<std::size_t>(batch_size));
    std::vector<RolloutOutcome> degenerate;

    for (std::int64_t i = 0; i < attempt_cap; ++i) {
        if (budget.remaining() < group_size)
            throw BudgetExhausted("dapo budget exhausted mid-step after " +
                                      std::to_string(out.attempts) + " attempts",
                                  out.outcomes);
        std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(i),
                                                        pool.size() - 1);
        std::swap(pool[static_cast<std::size_t>(i)], pool[pick(rng)]);
        const SampleId id = pool[static_cast<std::size_t>(i)];

        const RolloutOutcome o = env.rollout(id, group_size);
        out.attempts += 1;
        budget.consumed += group_size;

        if (o.correct > 0 && o.correct < o.group_size) {
            out.outcomes.push_back(o);
            if (static_cast<std::int64_t>(out.outcomes.size()) == batch_size)
                return out;
        } else {
            degenerate.push_back(o);
        }
    }
    // Attempt cap reached: backfill with the most recent degenerate groups.
    while (static_cast<std::int64_t>(out.outcomes.size()) < batch_size && !degenerate.empty()) {
        out.outcomes.push_back(degenerate.back());
        degenerate.pop_back();
    }
    return out;
}

}  // namespace dynsam
