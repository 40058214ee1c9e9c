#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "dynsam/environment.hpp"
#include "dynsam/estimator.hpp"

using namespace dynsam;

namespace {

BatchSelection selection_of(const std::vector<SampleId>& ids) {
    BatchSelection sel;
    sel.batch_size = static_cast<std::int64_t>(ids.size());
    for (SampleId id : ids)
        sel.entries.push_back({id, std::nullopt, std::nullopt});
    return sel;
}

}  // namespace

TEST_CASE("init dist parser covers const, uniform, beta and mixtures") {
    Rng rng(5);
    const auto constant = sample_init_dist("const(0.7)", 10, rng);
    for (double p : constant)
        CHECK(p == 0.7);

    const auto uni = sample_init_dist("uniform(0.2,0.4)", 1000, rng);
    for (double p : uni) {
        REQUIRE(p >= 0.2);
        REQUIRE(p <= 0.4);
    }

    const auto scaled = sample_init_dist("beta(2,2,0.5,0.9)", 1000, rng);
    for (double p : scaled) {
        REQUIRE(p >= 0.5);
        REQUIRE(p <= 0.9);
    }

    const auto mixed = sample_init_dist("mix:0.7*uniform(0.9,1.0);0.3*uniform(0.0,0.1)", 1000, rng);
    const auto high = std::count_if(mixed.begin(), mixed.end(), [](double p) { return p > 0.5; });
    CHECK(high == 700);

    CHECK_THROWS_AS(sample_init_dist("nonsense(1)", 10, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_init_dist("beta(-1,2)", 10, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_init_dist("uniform(0.5,0.2)", 10, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_init_dist("", 10, rng), std::invalid_argument);
}

TEST_CASE("degenerate probabilities give degenerate rollouts") {
    EnvironmentState sure({1.0, 0.0}, 0.0, 0.0, 0.0, 42);
    for (int i = 0; i < 50; ++i) {
        CHECK(sure.rollout(0, 8).correct == 8);
        CHECK(sure.rollout(1, 8).correct == 0);
    }
    CHECK_THROWS_AS(sure.rollout(5, 8), std::out_of_range);
    CHECK_THROWS_AS(sure.rollout(0, 0), std::invalid_argument);
}

TEST_CASE("rollout counts follow binomial moments") {
    EnvironmentState env({0.5}, 0.0, 0.0, 0.0, 7);
    const int n = 100000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const RolloutOutcome o = env.rollout(0, 8);
        REQUIRE(o.correct >= 0);
        REQUIRE(o.correct <= 8);
        sum += o.correct;
        sum_sq += static_cast<double>(o.correct) * o.correct;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    CHECK(std::abs(mean - 4.0) < 0.05);
    CHECK(std::abs(var - 2.0) < 0.1);
}

TEST_CASE("degenerate outcomes carry no training signal") {
    EnvironmentState env({0.3, 0.6, 0.9}, 0.1, 0.0, 0.0, 1);
    const std::vector<RolloutOutcome> outcomes = {{0, 8, 0}, {1, 8, 8}, {2, 8, 8}};
    env.apply_training_update(selection_of({0, 1, 2}), outcomes);
    CHECK(env.true_p(0) == 0.3);
    CHECK(env.true_p(1) == 0.6);
    CHECK(env.true_p(2) == 0.9);
}

TEST_CASE("a trained sample moves toward one at rate eta1") {
    EnvironmentState env({0.5, 0.2}, 0.1, 0.0, 0.0, 1);
    env.apply_training_update(selection_of({0}), std::vector<RolloutOutcome>{{0, 8, 4}});
    CHECK(env.true_p(0) == doctest::Approx(0.55).epsilon(1e-12));
    CHECK(env.true_p(1) == 0.2);  // eta2 = 0: untouched
}

TEST_CASE("untrained samples receive transfer scaled by the batch effective ratio") {
    EnvironmentState env({0.5, 0.2}, 0.0, 0.1, 0.0, 1);
    // batch of two groups, one effective -> f = 0.5
    EnvironmentState env2({0.5, 0.5, 0.2}, 0.0, 0.1, 0.0, 1);
    env2.apply_training_update(selection_of({0, 1}),
                               std::vector<RolloutOutcome>{{0, 8, 4}, {1, 8, 8}});
    CHECK(env2.true_p(2) == doctest::Approx(0.2 + 0.1 * 0.5 * 0.8).epsilon(1e-12));
}

TEST_CASE("zero rates freeze the environment") {
    EnvironmentState env({0.25, 0.75}, 0.0, 0.0, 0.0, 9);
    for (int step = 0; step < 20; ++step) {
        const RolloutOutcome o = env.rollout(0, 8);
        env.apply_training_update(selection_of({0}), std::vector<RolloutOutcome>{o});
        CHECK(env.true_p(0) == 0.25);
        CHECK(env.true_p(1) == 0.75);
    }
}

TEST_CASE("mismatched batch and outcomes are rejected") {
    EnvironmentState env({0.5, 0.5}, 0.1, 0.0, 0.0, 1);
    CHECK_THROWS_AS(
        env.apply_training_update(selection_of({0, 1}), std::vector<RolloutOutcome>{{0, 8, 4}}),
        std::invalid_argument);
    CHECK_THROWS_AS(
        env.apply_training_update(selection_of({0}), std::vector<RolloutOutcome>{{1, 8, 4}}),
        std::invalid_argument);
}

TEST_CASE("validation proxy is the held-out mean") {
    EnvironmentState env({0.7, 0.7, 0.7}, 0.0, 0.0, 0.0, 1);
    const std::vector<SampleId> all = {0, 1, 2};
    CHECK(validation_proxy(env, all) == doctest::Approx(0.7).epsilon(1e-15));

    EnvironmentState two({0.2, 0.8}, 0.0, 0.0, 0.0, 1);
    const std::vector<SampleId> both = {0, 1};
    CHECK(validation_proxy(two, both) == doctest::Approx(0.5).epsilon(1e-15));

    CHECK_THROWS_AS(validation_proxy(env, std::vector<SampleId>{}), std::invalid_argument);
}

TEST_CASE("noiseless drift never lowers the validation proxy") {
    Rng seed_rng(31);
    EnvironmentConfig cfg;
    cfg.n_samples = 50;
    cfg.eta1 = 0.05;
    cfg.eta2 = 0.01;
    cfg.noise = 0.0;
    cfg.init_dist = "uniform(0.1,0.9)";
    cfg.seed = 17;
    EnvironmentState env(cfg);
    const std::vector<SampleId> heldout = {45, 46, 47, 48, 49};

    double prev = validation_proxy(env, heldout);
    for (int step = 0; step < 50; ++step) {
        std::vector<SampleId> batch;
        std::vector<RolloutOutcome> outcomes;
        for (int k = 0; k < 5; ++k) {
            const auto id = static_cast<SampleId>((step * 5 + k) % 45);
            batch.push_back(id);
            outcomes.push_back(env.rollout(id, 8));
        }
        env.apply_training_update(selection_of(batch), outcomes);
        const double v = validation_proxy(env, heldout);
        REQUIRE(v >= prev - 1e-15);
        prev = v;
    }
}

TEST_CASE("true probabilities stay inside the unit interval under noisy drift") {
    EnvironmentConfig cfg;
    cfg.n_samples = 40;
    cfg.eta1 = 0.2;
    cfg.eta2 = 0.05;
    cfg.noise = 0.2;  // violent noise; the clamp must hold
    cfg.init_dist = "uniform(0,1)";
    cfg.seed = 3;
    EnvironmentState env(cfg);
    for (int step = 0; step < 100; ++step) {
        std::vector<RolloutOutcome> outcomes;
        std::vector<SampleId> batch;
        for (SampleId id = 0; id < 4; ++id) {
            batch.push_back(id);
            outcomes.push_back(env.rollout(id, 8));
        }
        env.apply_training_update(selection_of(batch), outcomes);
        for (double p : env.true_p()) {
            REQUIRE(p >= 0.0);
            REQUIRE(p <= 1.0);
        }
    }
}

TEST_CASE("identical seeds and batches reproduce the trajectory") {
    const auto run_once = [] {
        EnvironmentConfig cfg;
        cfg.n_samples = 30;
        cfg.eta1 = 0.1;
        cfg.eta2 = 0.01;
        cfg.noise = 0.02;
        cfg.init_dist = "beta(0.6,1.2)";
        cfg.seed = 123;
        EnvironmentState env(cfg);
        for (int step = 0; step < 25; ++step) {
            std::vector<SampleId> batch = {step % 30, (step + 7) % 30};
            if (batch[0] == batch[1])
                batch.pop_back();
            std::vector<RolloutOutcome> outcomes;
            for (SampleId id : batch)
                outcomes.push_back(env.rollout(id, 8));
            env.apply_training_update(selection_of(batch), outcomes);
        }
        return std::vector<double>(env.true_p().begin(), env.true_p().end());
    };
    CHECK(run_once() == run_once());
}

TEST_CASE("stationary mode: the estimator tracks a repeatedly sampled probability") {
    // eta1 = eta2 = noise = 0; one sample rolled out every step with G=8,
    // lambda1=0.2. Averaged over 20 seeds and the last 50 of 200 steps, the
    // posterior mean must land within +-0.05 of the truth.
    const DecayConfig decay(0.2, 0.999);
    for (double truth : {0.35, 0.5, 0.65}) {
        double grand = 0.0;
        for (int seed = 0; seed < 20; ++seed) {
            EnvironmentState env({truth, truth}, 0.0, 0.0, 0.0,
                                 static_cast<std::uint64_t>(1000 + seed));
            SampleStats stats{0.0, 0.0};
            double tail_mean = 0.0;
            for (int step = 1; step <= 200; ++step) {
                const RolloutOutcome o = env.rollout(0, 8);
                stats = update_sampled(stats, o.correct, o.group_size, decay);
                if (step > 150)
                    tail_mean += posterior_mean(stats);
            }
            grand += tail_mean / 50.0;
        }
        grand /= 20.0;
        CHECK(std::abs(grand - truth) <= 0.05);
    }
}
