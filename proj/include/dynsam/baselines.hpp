#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynsam/environment.hpp"
#include "dynsam/rng.hpp"
#include "dynsam/rollout.hpp"

namespace dynsam {

// Generation budget for the filter-style baseline. consumed counts every
// rollout generated during batch assembly, kept or discarded.
struct RolloutBudget {
    std::int64_t consumed = 0;
    std::int64_t cap = 0;

    std::int64_t remaining() const { return cap - consumed; }
};

// Raised when the budget cannot cover another candidate group mid-step.
// Carries the non-degenerate groups collected so far.
class BudgetExhausted : public std::runtime_error {
   public:
    BudgetExhausted(const std::string& what, std::vector<RolloutOutcome> partial)
        : std::runtime_error(what), partial_(std::move(partial)) {}

    const std::vector<RolloutOutcome>& partial() const { return partial_; }

   private:
    std::vector<RolloutOutcome> partial_;
};

struct DapoBatch {
    std::vector<RolloutOutcome> outcomes;
    std::int64_t attempts = 0;  // candidate groups rolled out this step
};

// Generate-then-filter batch assembly: draw uniform candidates without
// replacement, roll out a group each, keep non-degenerate groups until
// batch_size are collected or 3 * batch_size candidates were attempted.
// A shortfall is backfilled with the most recent degenerate groups.
// Charges group_size generations per attempt to the budget.
DapoBatch dapo_fill_batch(EnvironmentState& env, std::span<const SampleId> candidates,
                          std::int64_t batch_size, int group_size, RolloutBudget& budget,
                          Rng& rng);

}  // namespace dynsam
