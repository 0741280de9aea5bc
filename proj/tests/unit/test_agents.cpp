#include <doctest.h>

#include <array>
#include <cmath>
#include <memory>

#include "blicket/agents.hpp"
#include "blicket/rollout.hpp"
#include "oracles/brute_force.hpp"

using namespace blicket;

namespace {

const HypothesisSpace kDefault = enumerate_space(3, Family::Default);
const HypothesisSpace kExtended = enumerate_space(3, Family::Extended);

EnvConfig with_k(int k) {
    auto c = EnvConfig::uniform(kDefault);
    c.forced_explore_k = k;
    return c;
}

}  // namespace

TEST_CASE("random policy quiz-entry law") {
    const auto eps = run_episodes_parallel(with_k(0), RandomPolicy(3), 2024, 10000);
    std::array<int, 26> entered_at{};
    for (const auto& e : eps) {
        REQUIRE(e.quiz_entry_step >= 1);
        ++entered_at[e.quiz_entry_step];
    }
    int cumulative = 0;
    for (int t = 1; t <= 10; ++t) {
        cumulative += entered_at[t];
        CAPTURE(t);
        CHECK(std::abs(cumulative / 10000.0 - (1.0 - std::pow(2.0, -t))) <= 0.02);
    }
}

TEST_CASE("forced exploration: no quiz entry before step K") {
    for (int k : {5, 10, 15}) {
        CAPTURE(k);
        const auto eps = run_episodes_parallel(with_k(k), RandomPolicy(3, k), 77 + k, 10000);
        int early = 0, at_k = 0;
        for (const auto& e : eps) {
            early += e.quiz_entry_step < k ? 1 : 0;
            at_k += e.quiz_entry_step == k ? 1 : 0;
            CHECK(e.trajectory.steps.size() <= 25);
        }
        CHECK(early == 0);
        CHECK(at_k > 0);
    }
}

TEST_CASE("random answers average zero reward") {
    const auto eps = run_episodes_parallel(with_k(0), RandomPolicy(3), 5, 10000);
    const auto m = summarize(eps, "default", "random");
    CHECK(std::abs(m.mean_reward) <= 0.1);
    CHECK(std::abs(m.fca - 0.5) <= 0.05);
    for (const auto& e : eps) CHECK(e.trajectory.steps.size() <= 25);
}

TEST_CASE("always-no on disjunctive hypotheses scores one") {
    for (int i = 0; i < 3; ++i) {
        const auto c = EnvConfig::fixed(kDefault, kDefault[i]);
        ConstantAnswerPolicy no(3, false);
        const auto r = run_episode(c, no, 1, "x");
        CHECK(r.total_reward == 1.0);
    }
}

TEST_CASE("Bayes agent identifies every hypothesis") {
    for (const auto* space : {&kDefault, &kExtended}) {
        for (BayesExploration mode : {BayesExploration::Greedy, BayesExploration::MinStep}) {
            const BayesAgent proto(Belief::uniform(*space), mode);
            for (const auto& h : space->hypotheses()) {
                CAPTURE(h.to_string());
                auto agent = proto.clone();
                const auto r = run_episode(EnvConfig::fixed(*space, h), *agent, 9, "b");
                CHECK(r.total_reward == 3.0);
                CHECK(r.modality_correct);
                const auto& bayes = static_cast<const BayesAgent&>(*agent);
                CHECK(bayes.checks_made() <= static_cast<int>(space->size()) - 1);
            }
        }
    }
}

TEST_CASE("Bayes agent on the modality quiz") {
    for (const auto& h : kExtended.hypotheses()) {
        auto c = EnvConfig::fixed(kExtended, h);
        c.reward_mode = RewardMode::ModalityQuiz;
        BayesAgent agent(Belief::uniform(kExtended), BayesExploration::MinStep);
        const auto r = run_episode(c, agent, 3, "m");
        CHECK(r.total_reward == 1.0);
        CHECK(r.modality_correct);
    }
}

TEST_CASE("minimum-step Bayes agent averages the planner value") {
    std::vector<int> idx;
    for (int i = 0; i < 6; ++i) idx.push_back(i);
    const double oracle_value =
        boost::rational_cast<double>(oracle::expectimax(oracle::default_space(3), idx, 3));
    double total = 0.0;
    for (const auto& h : kDefault.hypotheses()) {
        BayesAgent agent(Belief::uniform(kDefault), BayesExploration::MinStep);
        run_episode(EnvConfig::fixed(kDefault, h), agent, 0, "s");
        total += agent.checks_made();
    }
    CHECK(std::abs(total / 6.0 - oracle_value) <= 1e-9);
    CHECK(std::abs(total / 6.0 - 8.0 / 3.0) <= 1e-9);
}

TEST_CASE("Bayes agent evaluation: mean 3 and FCA 1") {
    const BayesAgent agent(Belief::uniform(kDefault), BayesExploration::Greedy);
    const auto rep = evaluate(agent, {{"default", EnvConfig::uniform(kDefault)}}, 100, 17);
    CHECK(rep.pooled.mean_reward == 3.0);
    CHECK(rep.pooled.std_reward == 0.0);
    CHECK(rep.pooled.fca == 1.0);
}
