#pragma once

#include <cstdint>

namespace dynsam {

using SampleId = std::int64_t;

// Result of one group of rollouts: `correct` of `group_size` responses
// were verified correct. Individual binary rewards are recoverable as
// `correct` ones followed by `group_size - correct` zeros.
struct RolloutOutcome {
    SampleId id = 0;
    int group_size = 0;
    int correct = 0;
};

}  // namespace dynsam
