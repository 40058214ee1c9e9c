#pragma once

#include <span>
#include <vector>

#include "dynsam/rollout.hpp"

namespace dynsam {

// Group-relative advantages for one rollout group. A group where every
// reward is identical is degenerate: its advantages are exactly zero and
// it contributes no training signal.
struct GroupAdvantage {
    std::vector<int> rewards;
    std::vector<double> advantages;
    bool degenerate = false;
};

// (reward - mean) / population std over the group. Length must be >= 2,
// rewards binary.
GroupAdvantage group_advantages(std::span<const int> rewards);
GroupAdvantage group_advantages(const RolloutOutcome& outcome);

// Fraction of groups with 0 < correct < group_size.
double effective_ratio(std::span<const RolloutOutcome> outcomes);

// Root mean square over all advantage entries in the batch; stands in for
// the actor gradient norm. Zero iff every group is degenerate.
double batch_signal_proxy(std::span<const GroupAdvantage> groups);

}  // namespace dynsam
