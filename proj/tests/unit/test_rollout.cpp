#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "blicket/errors.hpp"
#include "blicket/rollout.hpp"
#include "blicket/trajectory.hpp"

using namespace blicket;

namespace {

const HypothesisSpace kDefault = enumerate_space(3, Family::Default);

class WrongWidthPolicy : public AgentPolicy {
public:
    void reset(const EpisodeContext&) override {}
    Action act(std::span<const Observation>) override { return Action(Bits{true}); }
    std::unique_ptr<AgentPolicy> clone() const override { return std::make_unique<WrongWidthPolicy>(*this); }
    std::string name() const override { return "wrong-width"; }
};

std::filesystem::path scratch(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("blicket_test_" + name);
    std::filesystem::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("serial and parallel rollouts agree") {
    auto cfg = EnvConfig::uniform(enumerate_space(3, Family::Extended));
    const RandomPolicy random(3);
    const auto s = run_episodes_serial(cfg, random, 31, 600);
    const auto p = run_episodes_parallel(cfg, random, 31, 600);
    REQUIRE(s.size() == p.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(trajectory_to_json(s[i].trajectory) == trajectory_to_json(p[i].trajectory));
        CHECK(s[i].total_reward == p[i].total_reward);
    }
    const BayesAgent bayes(Belief::uniform(cfg.space), BayesExploration::MinStep);
    const auto rs = evaluate(bayes, {{"ext", cfg}}, 200, 4, Execution::Serial);
    const auto rp = evaluate(bayes, {{"ext", cfg}}, 200, 4, Execution::Parallel);
    CHECK(rs.pooled.mean_reward == rp.pooled.mean_reward);
    CHECK(rs.pooled.fca == rp.pooled.fca);
}

TEST_CASE("malformed actions abort the episode") {
    WrongWidthPolicy bad;
    const auto r = run_episode(EnvConfig::uniform(kDefault), bad, 1, "bad");
    REQUIRE(r.trajectory.error.has_value());
    CHECK(r.trajectory.steps.empty());
    CHECK_FALSE(r.trajectory.complete());
    CHECK_FALSE(r.modality_correct);
}

TEST_CASE("logged trajectories replay exactly") {
    auto cfg = EnvConfig::uniform(kDefault);
    cfg.forced_explore_k = 3;
    const auto eps = run_episodes_parallel(cfg, RandomPolicy(3, 3), 8, 1000);
    for (const auto& e : eps) {
        const auto rep = replay(e.trajectory);
        CHECK(rep.ok);
        CHECK(e.trajectory.complete());
        CHECK(e.trajectory.quiz_entry_step() == e.quiz_entry_step);
    }
}

TEST_CASE("replay detects tampering") {
    BayesAgent agent(Belief::uniform(kDefault), BayesExploration::Greedy);
    auto t = run_episode(EnvConfig::fixed(kDefault, kDefault[4]), agent, 1, "t").trajectory;
    CHECK(replay(t).ok);
    t.steps.back().reward = -t.steps.back().reward;
    const auto rep = replay(t);
    CHECK_FALSE(rep.ok);
    CHECK(rep.first_mismatch == static_cast<int>(t.steps.size()) - 1);
}

TEST_CASE("JSONL round trip") {
    const auto eps = run_episodes_serial(EnvConfig::uniform(kDefault), RandomPolicy(3), 3, 5);
    std::stringstream ss;
    for (const auto& e : eps) write_jsonl(ss, e.trajectory);
    const auto back = read_jsonl(ss);
    REQUIRE(back.size() == eps.size());
    for (std::size_t i = 0; i < eps.size(); ++i)
        CHECK(trajectory_to_json(back[i]) == trajectory_to_json(eps[i].trajectory));

    std::stringstream first_line;
    write_jsonl(first_line, eps[0].trajectory);
    std::string header;
    std::getline(first_line, header);
    const auto hj = nlohmann::json::parse(header);
    CHECK(hj.at("type") == "header");
    CHECK(hj.contains("hidden_hypothesis"));
    CHECK(hj.contains("config_digest"));
    CHECK(hj.contains("seed"));
    std::string step;
    std::getline(first_line, step);
    const auto sj = nlohmann::json::parse(step);
    for (const char* key : {"episode_id", "step", "phase", "action_bits", "observation_bits", "reward", "done"})
        CHECK(sj.contains(key));

    std::stringstream orphan("{\"type\":\"step\",\"episode_id\":\"x\"}\n");
    CHECK_THROWS_AS(read_jsonl(orphan), InvalidInput);
}

TEST_CASE("dataset export, import and replay") {
    const auto eps = run_episodes_parallel(EnvConfig::uniform(kDefault), RandomPolicy(3), 12, 100);
    std::vector<Trajectory> trajs;
    for (const auto& e : eps) trajs.push_back(e.trajectory);
    const auto dir = scratch("export");
    const auto m = export_dataset(trajs, dir);
    CHECK(m.count == 100);
    CHECK(m.max_episode_length <= 25);
    CHECK(m.config_digests.size() == 1);
    std::size_t hist_total = 0;
    for (const auto& [k, v] : m.reward_histogram) hist_total += v;
    CHECK(hist_total == 100);
    CHECK(std::filesystem::exists(dir / "manifest.json"));

    const auto back = import_dataset(dir);
    REQUIRE(back.size() == trajs.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(replay(back[i]).ok);
        CHECK(back[i].total_reward() == trajs[i].total_reward());
    }
    std::filesystem::remove_all(dir);

    CHECK_THROWS_AS(export_dataset({}, scratch("empty")), InvalidInput);
    CHECK_THROWS_AS(export_dataset(trajs, "/proc/blicket_cannot_write_here"), IoError);
}

TEST_CASE("forced-exploration dataset quiz entries") {
    auto cfg = EnvConfig::uniform(kDefault);
    cfg.forced_explore_k = 15;
    const auto eps = run_episodes_parallel(cfg, RandomPolicy(3, 15), 21, 500);
    for (const auto& e : eps) CHECK(e.trajectory.quiz_entry_step() >= 15);
}

TEST_CASE("metrics CSV") {
    const BayesAgent bayes(Belief::uniform(kDefault), BayesExploration::Greedy);
    const auto rep = evaluate(bayes,
                              {{"disj", EnvConfig::fixed(kDefault, kDefault[0])},
                               {"conj", EnvConfig::fixed(kDefault, kDefault[5])}},
                              10, 1);
    std::ostringstream os;
    write_metrics_csv(os, rep);
    const std::string csv = os.str();
    CHECK(csv.rfind("config,policy,mean_reward,std_reward,fca,n_episodes\n", 0) == 0);
    CHECK(csv.find("disj,bayes-greedy,3,0,1,10\n") != std::string::npos);
    CHECK(csv.find("pooled,bayes-greedy,3,0,1,20\n") != std::string::npos);
    CHECK_THROWS_AS(evaluate(bayes, {{"d", EnvConfig::uniform(kDefault)}}, 0, 1), InvalidInput);
}
