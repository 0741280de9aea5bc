#include <doctest.h>

#include <filesystem>
#include <memory>
#include <vector>

#include "blicket/errors.hpp"
#include "blicket/qlearning.hpp"
#include "blicket/rollout.hpp"

using namespace blicket;

namespace {
const HypothesisSpace kDefault = enumerate_space(3, Family::Default);
}

TEST_CASE("history_key serializes every observation") {
    std::vector<Observation> h{Observation{}, Observation{ObjectSet{0}, true, false, -1}};
    CHECK(history_key(h, 3) == "00000000|10010000");
}

TEST_CASE("q_select examples") {
    QTable q(3);
    Rng rng(1);
    CHECK(q_select(q, "s", 0.0, rng).code() == 0);
    q.set("s", 9, 1.0);
    CHECK(q_select(q, "s", 0.0, rng).code() == 9);
    q.set("s", 4, 1.0);
    CHECK(q_select(q, "s", 0.0, rng).code() == 4);
    CHECK_THROWS_AS(q_select(q, "s", 1.5, rng), InvalidInput);
}

TEST_CASE("q_select with epsilon 1 is uniform") {
    QTable q(3);
    q.set("s", 3, 5.0);
    Rng rng(42);
    std::vector<int> counts(16, 0);
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) ++counts[q_select(q, "s", 1.0, rng).code()];
    double chi2 = 0.0;
    const double e = draws / 16.0;
    for (int c : counts) chi2 += (c - e) * (c - e) / e;
    // 15 degrees of freedom, p = 0.001
    CHECK(chi2 < 37.70);
}

TEST_CASE("q_update algebra") {
    QTable q(3);
    q_update(q, "s", 2, 1.0, "t", true, 0.95, 0.99);
    CHECK(q.value("s", 2) == doctest::Approx(0.95));
    q_update(q, "u", 1, 0.0, "t", true, 0.95, 0.99);
    CHECK(q.value("u", 1) == 0.0);
    q_update(q, "v", 0, 1.0, "t", true, 1.0, 0.99);
    q_update(q, "v", 0, 1.0, "t", true, 1.0, 0.99);
    CHECK(q.value("v", 0) == 1.0);
    q.set("next", 5, 2.0);
    q_update(q, "w", 0, 0.5, "next", false, 0.5, 0.9);
    CHECK(q.value("w", 0) == doctest::Approx(0.5 * (0.5 + 0.9 * 2.0)));
}

TEST_CASE("train_q with no budget") {
    const auto res = train_q(EnvConfig::fixed(kDefault, kDefault[3]), QHyperparams{}, 0);
    CHECK_FALSE(res.stats.converged);
    CHECK(res.stats.episodes_run == 0);
    CHECK(res.stats.total_env_steps == 0);
    CHECK(res.table.n_states() == 0);
}

TEST_CASE("train_q converges on a fixed hypothesis and replays to reward 3") {
    double sum = 0.0;
    const int seeds = 20;
    for (int s = 0; s < seeds; ++s) {
        const Hypothesis& h = kDefault[static_cast<std::size_t>(s) % kDefault.size()];
        const auto cfg = EnvConfig::fixed(kDefault, h);
        QHyperparams hp;
        hp.seed = static_cast<std::uint64_t>(s);
        const auto res = train_q(cfg, hp, 5000);
        REQUIRE(res.stats.converged);
        sum += res.stats.episodes_to_convergence;
        CHECK(res.stats.env_steps_to_convergence > 0);
        CHECK(res.stats.updates_to_convergence == res.stats.env_steps_to_convergence);

        QPolicy greedy(std::make_shared<const QTable>(res.table), 0.0);
        CHECK(run_episode(cfg, greedy, 1, "q").total_reward == 3.0);
    }
    MESSAGE("mean episodes to convergence: " << sum / seeds);
    CHECK(sum / seeds <= 300.0);
}

TEST_CASE("train_q is bit-reproducible") {
    const auto cfg = EnvConfig::fixed(kDefault, kDefault[0]);
    QHyperparams hp;
    hp.seed = 5;
    const auto a = train_q(cfg, hp, 200);
    const auto b = train_q(cfg, hp, 200);
    CHECK(a.table == b.table);
    CHECK(stats_to_json(a.stats) == stats_to_json(b.stats));
}

TEST_CASE("Q-table persistence") {
    const auto cfg = EnvConfig::fixed(kDefault, kDefault[4]);
    QHyperparams hp;
    hp.convergence_window = 20;
    const auto res = train_q(cfg, hp, 2000);
    const auto path = std::filesystem::temp_directory_path() / "blicket_qtable_test.json";
    res.table.save(path);
    const QTable back = QTable::load(path);
    CHECK(back == res.table);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(QTable::load("/nonexistent/dir/q.json"), IoError);
    CHECK_THROWS_AS(QTable::from_json({{"n_objects", 3}, {"values", {{"k", {1.0}}}}}), InvalidInput);
}

TEST_CASE("hyperparameter validation") {
    QHyperparams hp;
    hp.epsilon = -0.1;
    CHECK_THROWS_AS(hp.validate(), InvalidConfig);
    hp = {};
    hp.learning_rate = 0.0;
    CHECK_THROWS_AS(hp.validate(), InvalidConfig);
}
