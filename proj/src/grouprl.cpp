#include "dynsam/grouprl.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dynsam {

GroupAdvantage group_advantages(std::span<const int> rewards) {
    if (rewards.size() < 2) {
        throw std::invalid_argument("group needs at least 2 rewards, got " +
                                    std::to_string(rewards.size()));
    }
    GroupAdvantage out;
    out.rewards.assign(rewards.begin(), rewards.end());
    out.advantages.resize(rewards.size());

    int sum = 0;
    for (int r : rewards) {
        if (r != 0 && r != 1)
            throw std::invalid_argument("rewards must be binary, got " + std::to_string(r));
        sum += r;
    }
    const auto n = static_cast<double>(rewards.size());
    out.degenerate = (sum == 0 || sum == static_cast<int>(rewards.size()));
    if (out.degenerate)
        return out;  // zero advantages: no training signal

    const double mean = sum / n;
    // Binary rewards: population variance is mean (1 - mean).
    const double stddev = std::sqrt(mean * (1.0 - mean));
    for (std::size_t i = 0; i < rewards.size(); ++i)
        out.advantages[i] = (rewards[i] - mean) / stddev;
    return out;
}

GroupAdvantage group_advantages(const RolloutOutcome& outcome) {
    std::vector<int> rewards(static_cast<std::size_t>(outcome.group_size), 0);
    for (int i = 0; i < outcome.correct; ++i)
        rewards[static_cast<std::size_t>(i)] = 1;
    return group_advantages(rewards);
}

double effective_ratio(std::span<const RolloutOutcome> outcomes) {
    if (outcomes.empty())
        throw std::invalid_argument("effective_ratio of an empty batch");
    std::size_t effective = 0;
    for (const RolloutOutcome& o : outcomes) {
        if (o.correct > 0 && o.correct < o.group_size)
            ++effective;
    }
    return static_cast<double>(effective) / static_cast<double>(outcomes.size());
}

double batch_signal_proxy(std::span<const GroupAdvantage> groups) {
    double sum_sq = 0.0;
    std::size_t count = 0;
    for (const GroupAdvantage& g : groups) {
        for (double a : g.advantages)
            sum_sq += a * a;
        count += g.advantages.size();
    }
    if (count == 0)
        return 0.0;
    return std::sqrt(sum_sq / static_cast<double>(count));
}

}  // namespace dynsam
