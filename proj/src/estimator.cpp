#include "dynsam/estimator.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dynsam {

DecayConfig::DecayConfig(double lambda1, double lambda2) : lambda1_(lambda1), lambda2_(lambda2) {
    if (!(0.0 < lambda1 && lambda1 < lambda2 && lambda2 < 1.0)) {
        throw std::invalid_argument("DecayConfig requires 0 < lambda1 < lambda2 < 1, got lambda1=" +
                                    std::to_string(lambda1) + " lambda2=" +
                                    std::to_string(lambda2));
    }
}

EstimatorMode estimator_mode_from_string(std::string_view s) {
    if (s == "two-scale-decay")
        return EstimatorMode::TwoScaleDecay;
    if (s == "last-update")
        return EstimatorMode::LastUpdate;
    throw std::invalid_argument("unknown estimator mode: " + std::string(s));
}

std::string_view to_string(EstimatorMode mode) {
    return mode == EstimatorMode::TwoScaleDecay ? "two-scale-decay" : "last-update";
}

namespace {

void check_outcome(int correct, int group_size) {
    if (group_size < 1) {
        throw std::invalid_argument("group_size must be >= 1, got " + std::to_string(group_size));
    }
    if (correct < 0 || correct > group_size) {
        throw std::invalid_argument("correct count " + std::to_string(correct) +
                                    " outside [0, " + std::to_string(group_size) + "]");
    }
}

}  // namespace

SampleStats update_sampled(const SampleStats& stats, int correct, int group_size,
                           const DecayConfig& decay, EstimatorMode mode) {
    check_outcome(correct, group_size);
    if (mode == EstimatorMode::LastUpdate) {
        return {static_cast<double>(correct), static_cast<double>(group_size - correct)};
    }
    return {decay.lambda1() * stats.alpha + correct,
            decay.lambda1() * stats.beta + (group_size - correct)};
}

SampleStats update_unsampled(const SampleStats& stats, const DecayConfig& decay,
                             EstimatorMode mode) {
    if (mode == EstimatorMode::LastUpdate)
        return stats;
    return {decay.lambda2() * stats.alpha, decay.lambda2() * stats.beta};
}

double posterior_mean(const SampleStats& stats) {
    return (stats.alpha + 1.0) / (stats.alpha + stats.beta + 2.0);
}

double raw_mean(const SampleStats& stats) {
    const double total = stats.alpha + stats.beta;
    if (total <= 0.0)
        return 0.5;
    return stats.alpha / total;
}

EstimatorStore::EstimatorStore(std::size_t n_samples, DecayConfig decay, EstimatorMode mode)
    : stats_(n_samples), decay_(decay), mode_(mode), touched_(n_samples, 0) {}

const SampleStats& EstimatorStore::stats(SampleId id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= stats_.size()) {
        throw std::out_of_range("sample id " + std::to_string(id) + " outside store of size " +
                                std::to_string(stats_.size()));
    }
    return stats_[static_cast<std::size_t>(id)];
}

SampleStats& EstimatorStore::stats_mut(SampleId id) {
    return const_cast<SampleStats&>(stats(id));
}

void EstimatorStore::init_from_rollouts(const std::vector<RolloutOutcome>& outcomes) {
    if (outcomes.size() != stats_.size()) {
        throw std::invalid_argument("initialization needs one outcome per sample: got " +
                                    std::to_string(outcomes.size()) + " for " +
                                    std::to_string(stats_.size()) + " samples");
    }
    std::vector<char> seen(stats_.size(), 0);
    for (const RolloutOutcome& o : outcomes) {
        check_outcome(o.correct, o.group_size);
        if (o.id < 0 || static_cast<std::size_t>(o.id) >= stats_.size()) {
            throw std::invalid_argument("initialization outcome for unknown sample id " +
                                        std::to_string(o.id));
        }
        if (seen[static_cast<std::size_t>(o.id)]) {
            throw std::invalid_argument("duplicate initialization outcome for sample id " +
                                        std::to_string(o.id));
        }
        seen[static_cast<std::size_t>(o.id)] = 1;
        stats_[static_cast<std::size_t>(o.id)] = {static_cast<double>(o.correct),
                                                  static_cast<double>(o.group_size - o.correct)};
    }
    for (std::size_t i = 0; i < seen.size(); ++i) {
        if (!seen[i]) {
            throw std::invalid_argument("missing initialization outcome for sample id " +
                                        std::to_string(i));
        }
    }
}

void EstimatorStore::record_sampled(SampleId id, int correct, int group_size) {
    SampleStats& s = stats_mut(id);
    s = update_sampled(s, correct, group_size, decay_, mode_);
}

void EstimatorStore::record_unsampled(SampleId id) {
    SampleStats& s = stats_mut(id);
    s = update_unsampled(s, decay_, mode_);
}

void EstimatorStore::apply_step(const std::vector<RolloutOutcome>& batch) {
    for (const RolloutOutcome& o : batch) {
        if (o.id < 0 || static_cast<std::size_t>(o.id) >= stats_.size()) {
            throw std::invalid_argument("batch outcome for unknown sample id " +
                                        std::to_string(o.id));
        }
        if (touched_[static_cast<std::size_t>(o.id)]) {
            throw std::invalid_argument("duplicate sample id " + std::to_string(o.id) +
                                        " in batch");
        }
        touched_[static_cast<std::size_t>(o.id)] = 1;
    }
    for (const RolloutOutcome& o : batch)
        record_sampled(o.id, o.correct, o.group_size);
    for (std::size_t i = 0; i < stats_.size(); ++i) {
        if (!touched_[i])
            record_unsampled(static_cast<SampleId>(i));
    }
    for (const RolloutOutcome& o : batch)
        touched_[static_cast<std::size_t>(o.id)] = 0;
}

nlohmann::json EstimatorStore::snapshot() const {
    nlohmann::json snap = nlohmann::json::array();
    for (std::size_t i = 0; i < stats_.size(); ++i) {
        snap.push_back({{"id", static_cast<SampleId>(i)},
                        {"alpha", stats_[i].alpha},
                        {"beta", stats_[i].beta}});
    }
    return snap;
}

EstimatorStore EstimatorStore::from_snapshot(const nlohmann::json& snap, DecayConfig decay,
                                             EstimatorMode mode) {
    if (!snap.is_array())
        throw std::invalid_argument("estimator snapshot must be a JSON array");
    EstimatorStore store(snap.size(), decay, mode);
    std::vector<char> seen(snap.size(), 0);
    for (const auto& item : snap) {
        const SampleId id = item.at("id").get<SampleId>();
        if (id < 0 || static_cast<std::size_t>(id) >= store.size()) {
            throw std::invalid_argument("snapshot id " + std::to_string(id) +
                                        " outside [0, " + std::to_string(store.size()) + ")");
        }
        if (seen[static_cast<std::size_t>(id)])
            throw std::invalid_argument("duplicate snapshot id " + std::to_string(id));
        seen[static_cast<std::size_t>(id)] = 1;
        SampleStats s{item.at("alpha").get<double>(), item.at("beta").get<double>()};
        if (!(s.alpha >= 0.0) || !(s.beta >= 0.0) || !std::isfinite(s.alpha) ||
            !std::isfinite(s.beta)) {
            throw std::invalid_argument("snapshot stats for id " + std::to_string(id) +
                                        " violate non-negativity/finiteness");
        }
        store.stats_[static_cast<std::size_t>(id)] = s;
    }
    return store;
}

}  // namespace dynsam
