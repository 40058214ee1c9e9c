#include "dynsam/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "dynsam/grouprl.hpp"

namespace dynsam {

Strategy strategy_from_string(std::string_view s) {
    if (s == "thompson")
        return Strategy::Thompson;
    if (s == "greedy")
        return Strategy::Greedy;
    if (s == "random")
        return Strategy::Random;
    if (s == "dapo")
        return Strategy::Dapo;
    throw std::invalid_argument("unknown strategy: " + std::string(s));
}

std::string_view to_string(Strategy strategy) {
    switch (strategy) {
        case Strategy::Thompson: return "thompson";
        case Strategy::Greedy: return "greedy";
        case Strategy::Random: return "random";
        case Strategy::Dapo: return "dapo";
    }
    return "thompson";
}

namespace {

template <class T>
void read_key(const nlohmann::json& j, const char* key, T& out) {
    if (const auto it = j.find(key); it != j.end())
        out = it->get<T>();
}

EnvironmentConfig environment_from_json(const nlohmann::json& j, std::uint64_t master_seed) {
    EnvironmentConfig env;
    read_key(j, "n_samples", env.n_samples);
    read_key(j, "eta1", env.eta1);
    read_key(j, "eta2", env.eta2);
    read_key(j, "noise", env.noise);
    read_key(j, "init_dist", env.init_dist);
    if (const auto it = j.find("seed"); it != j.end()) {
        env.seed = it->get<std::uint64_t>();
    } else {
        env.seed = substream_seed(master_seed, kEnvStream, 0, 0);
    }
    return env;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    read_key(j, "batch_size", cfg.batch_size);
    read_key(j, "group_size", cfg.group_size);
    read_key(j, "steps", cfg.steps);
    if (const auto it = j.find("strategy"); it != j.end())
        cfg.strategy = strategy_from_string(it->get<std::string>());
    if (const auto it = j.find("objective"); it != j.end())
        cfg.objective = objective_from_string(it->get<std::string>());
    if (const auto it = j.find("estimator_mode"); it != j.end())
        cfg.estimator_mode = estimator_mode_from_string(it->get<std::string>());
    read_key(j, "lambda1", cfg.lambda1);
    read_key(j, "lambda2", cfg.lambda2);
    read_key(j, "holdout_fraction", cfg.holdout_fraction);
    read_key(j, "dapo_budget_multiplier", cfg.dapo_budget_multiplier);
    read_key(j, "seed", cfg.seed);
    read_key(j, "out", cfg.out);
    // Nested environment block preferred; flat keys accepted.
    cfg.environment = environment_from_json(
        j.contains("environment") ? j.at("environment") : j, cfg.seed);
    cfg.validate();
    return cfg;
}

nlohmann::json ExperimentConfig::to_json() const {
    return {
        {"batch_size", batch_size},
        {"group_size", group_size},
        {"steps", steps},
        {"strategy", std::string(to_string(strategy))},
        {"objective", std::string(to_string(objective))},
        {"estimator_mode", std::string(to_string(estimator_mode))},
        {"lambda1", lambda1},
        {"lambda2", lambda2},
        {"holdout_fraction", holdout_fraction},
        {"dapo_budget_multiplier", dapo_budget_multiplier},
        {"seed", seed},
        {"out", out},
        {"environment",
         {{"n_samples", environment.n_samples},
          {"eta1", environment.eta1},
          {"eta2", environment.eta2},
          {"noise", environment.noise},
          {"init_dist", environment.init_dist},
          {"seed", environment.seed}}},
    };
}

void ExperimentConfig::validate() const {
    DecayConfig check_decay(lambda1, lambda2);
    (void)check_decay;
    if (steps < 1)
        throw std::invalid_argument("steps must be >= 1");
    if (group_size < 1)
        throw std::invalid_argument("group_size must be >= 1");
    if (environment.n_samples < 2)
        throw std::invalid_argument("n_samples must be >= 2");
    if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0))
        throw std::invalid_argument("holdout_fraction must lie in (0, 1)");
    if (dapo_budget_multiplier <= 0.0)
        throw std::invalid_argument("dapo_budget_multiplier must be > 0");
    const std::int64_t train = environment.n_samples - n_heldout();
    if (batch_size < 1 || batch_size > train) {
        throw std::invalid_argument("batch_size " + std::to_string(batch_size) +
                                    " exceeds training pool of " + std::to_string(train));
    }
}

std::int64_t ExperimentConfig::n_heldout() const {
    const auto n = static_cast<double>(environment.n_samples);
    std::int64_t held = static_cast<std::int64_t>(std::llround(n * holdout_fraction));
    held = std::clamp<std::int64_t>(held, 1, environment.n_samples - 1);
    return held;
}

std::vector<SampleId> ExperimentConfig::train_ids() const {
    std::vector<SampleId> ids(static_cast<std::size_t>(environment.n_samples - n_heldout()));
    std::iota(ids.begin(), ids.end(), SampleId{0});
    return ids;
}

std::vector<SampleId> ExperimentConfig::heldout_ids() const {
    std::vector<SampleId> ids(static_cast<std::size_t>(n_heldout()));
    std::iota(ids.begin(), ids.end(), environment.n_samples - n_heldout());
    return ids;
}

double compute_regret(const EnvironmentState& env, const BatchSelection& selection,
                      std::int64_t batch_size, std::span<const SampleId> candidates) {
    if (batch_size < 1 || static_cast<std::size_t>(batch_size) > candidates.size())
        throw std::invalid_argument("regret batch size outside candidate range");

    std::vector<double> gains;
    gains.reserve(candidates.size());
    for (SampleId id : candidates)
        gains.push_back(info_gain(env.true_p(id), Objective::Asymmetric));

    const auto mid = gains.begin() + static_cast<std::ptrdiff_t>(batch_size);
    std::nth_element(gains.begin(), mid - 1, gains.end(), std::greater<double>());
    const double oracle = std::accumulate(gains.begin(), mid, 0.0);

    double realized = 0.0;
    for (const SelectionEntry& e : selection.entries)
        realized += info_gain(env.true_p(e.id), Objective::Asymmetric);

    return std::max(0.0, oracle - realized);
}

double compute_regret(const EnvironmentState& env, const BatchSelection& selection,
                      std::int64_t batch_size) {
    std::vector<SampleId> ids(static_cast<std::size_t>(env.size()));
    std::iota(ids.begin(), ids.end(), SampleId{0});
    return compute_regret(env, selection, batch_size, ids);
}

namespace {

BatchSelection selection_from_outcomes(const std::vector<RolloutOutcome>& outcomes,
                                       std::int64_t step, std::int64_t batch_size) {
    BatchSelection sel;
    sel.step = step;
    sel.batch_size = batch_size;
    sel.entries.reserve(outcomes.size());
    for (const RolloutOutcome& o : outcomes)
        sel.entries.push_back({o.id, std::nullopt, std::nullopt});
    return sel;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config, const StepObserver& observer) {
    config.validate();

    EnvironmentState env(config.environment);
    EstimatorStore store(static_cast<std::size_t>(config.environment.n_samples),
                         DecayConfig(config.lambda1, config.lambda2), config.estimator_mode);

    const std::vector<SampleId> train = config.train_ids();
    const std::vector<SampleId> heldout = config.heldout_ids();

    // Initialization rollouts for every sample, held-out ones included;
    // charged to the rollout count for every strategy.
    std::vector<RolloutOutcome> init_outcomes;
    init_outcomes.reserve(static_cast<std::size_t>(env.size()));
    for (SampleId id = 0; id < env.size(); ++id)
        init_outcomes.push_back(env.rollout(id, config.group_size));
    store.init_from_rollouts(init_outcomes);

    std::int64_t cumulative = env.size() * config.group_size;

    RolloutBudget budget;
    budget.cap = static_cast<std::int64_t>(
        std::llround(config.dapo_budget_multiplier * static_cast<double>(config.steps) *
                     static_cast<double>(config.batch_size) * config.group_size));

    RunResult result;
    result.metrics.reserve(static_cast<std::size_t>(config.steps));

    for (std::int64_t step = 1; step <= config.steps; ++step) {
        BatchSelection selection;
        std::vector<RolloutOutcome> outcomes;
        std::int64_t generated = 0;

        switch (config.strategy) {
            case Strategy::Thompson:
                selection = select_thompson(store, train, config.batch_size, config.objective,
                                            config.seed, step);
                break;
            case Strategy::Greedy:
                selection =
                    select_greedy(store, train, config.batch_size, config.objective, step);
                break;
            case Strategy::Random: {
                Rng rng(substream_seed(config.seed, kSelectionStream,
                                       static_cast<std::uint64_t>(step), 0));
                selection = select_random(train, config.batch_size, rng, step);
                break;
            }
            case Strategy::Dapo:
                break;  // selection comes out of batch assembly below
        }

        if (config.strategy == Strategy::Dapo) {
            Rng rng(substream_seed(config.seed, kDapoStream, static_cast<std::uint64_t>(step), 0));
            DapoBatch dapo;
            try {
                dapo = dapo_fill_batch(env, train, config.batch_size, config.group_size, budget,
                                       rng);
            } catch (const BudgetExhausted&) {
                break;  // stop the run; metrics up to the last full step stand
            }
            outcomes = std::move(dapo.outcomes);
            selection = selection_from_outcomes(outcomes, step, config.batch_size);
            generated = dapo.attempts * config.group_size;
        } else {
            outcomes.reserve(selection.entries.size());
            for (const SelectionEntry& e : selection.entries)
                outcomes.push_back(env.rollout(e.id, config.group_size));
            generated = config.batch_size * config.group_size;
        }
        cumulative += generated;

        const double regret = compute_regret(env, selection, config.batch_size, train);
        const double f = effective_ratio(outcomes);

        std::vector<GroupAdvantage> advantages;
        advantages.reserve(outcomes.size());
        for (const RolloutOutcome& o : outcomes)
            advantages.push_back(group_advantages(o));
        const double signal = batch_signal_proxy(advantages);

        env.apply_training_update(selection, outcomes);
        store.apply_step(outcomes);

        result.metrics.push_back({step, f, cumulative, validation_proxy(env, heldout), signal,
                                  regret});

        if (observer) {
            std::vector<SampleId> sampled;
            sampled.reserve(outcomes.size());
            for (const RolloutOutcome& o : outcomes)
                sampled.push_back(o.id);
            std::vector<char> in_batch(static_cast<std::size_t>(env.size()), 0);
            for (SampleId id : sampled)
                in_batch[static_cast<std::size_t>(id)] = 1;
            std::vector<SampleId> unsampled;
            unsampled.reserve(static_cast<std::size_t>(env.size()) - sampled.size());
            for (SampleId id = 0; id < env.size(); ++id) {
                if (!in_batch[static_cast<std::size_t>(id)])
                    unsampled.push_back(id);
            }
            StepRecord record{step,     &selection, &outcomes,
                              &sampled, &unsampled, env.mean_true_p()};
            observer(record);
        }
    }

    result.estimator_snapshot = store.snapshot();
    return result;
}

namespace {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

void write_metrics_csv(std::span<const StepMetrics> metrics, std::ostream& os) {
    os << "step,effective_ratio,cumulative_rollouts,validation_proxy,batch_signal_proxy,regret\n";
    for (const StepMetrics& m : metrics) {
        os << m.step << ',' << format_double(m.effective_ratio) << ',' << m.cumulative_rollouts
           << ',' << format_double(m.validation_proxy) << ','
           << format_double(m.batch_signal_proxy) << ',' << format_double(m.regret) << '\n';
    }
}

std::string metrics_csv_string(std::span<const StepMetrics> metrics) {
    std::ostringstream oss;
    write_metrics_csv(metrics, oss);
    return oss.str();
}

void write_outputs(const RunResult& result, const ExperimentConfig& config,
                   const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw std::runtime_error("cannot create output directory " + dir.string() + ": " +
                                 ec.message());
    }
    const auto open = [&](const char* name) {
        std::ofstream os(dir / name, std::ios::binary);
        if (!os)
            throw std::runtime_error("cannot open " + (dir / name).string() + " for writing");
        return os;
    };

    {
        std::ofstream os = open("metrics.csv");
        write_metrics_csv(result.metrics, os);
    }
    {
        std::ofstream os = open("config.json");
        os << config.to_json().dump(2) << '\n';
    }
    {
        std::ofstream os = open("estimator_final.json");
        os << result.estimator_snapshot.dump() << '\n';
    }
}

}  // namespace dynsam
