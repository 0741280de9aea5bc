#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include <omp.h>

#include <CLI11.hpp>

#include "blicket/rollout.hpp"

using namespace blicket;

namespace {

double seconds(const std::function<void()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Serial vs parallel episode rollouts"};
    int episodes = 200000;
    int repeats = 3;
    app.add_option("--episodes", episodes);
    app.add_option("--repeats", repeats);
    CLI11_PARSE(app, argc, argv);

    const auto space = enumerate_space(3, Family::Extended);
    const auto config = EnvConfig::uniform(space);
    const RandomPolicy random(3);
    const BayesAgent greedy(Belief::uniform(space), BayesExploration::Greedy);
    const BayesAgent minstep(Belief::uniform(space), BayesExploration::MinStep);

    std::printf("threads=%d episodes=%d repeats=%d\n", omp_get_max_threads(), episodes, repeats);
    std::printf("%-14s %10s %10s %8s %s\n", "policy", "serial_s", "parallel_s", "speedup", "identical");
    int failures = 0;
    for (const AgentPolicy* p : {static_cast<const AgentPolicy*>(&random), static_cast<const AgentPolicy*>(&greedy),
                                 static_cast<const AgentPolicy*>(&minstep)}) {
        double best_s = 1e300, best_p = 1e300;
        std::vector<EpisodeResult> s, q;
        for (int r = 0; r < repeats; ++r) {
            best_s = std::min(best_s, seconds([&] { s = run_episodes_serial(config, *p, 7, episodes); }));
            best_p = std::min(best_p, seconds([&] { q = run_episodes_parallel(config, *p, 7, episodes); }));
        }
        bool same = s.size() == q.size();
        for (std::size_t i = 0; same && i < s.size(); ++i)
            same = s[i].total_reward == q[i].total_reward && s[i].trajectory.steps.size() == q[i].trajectory.steps.size();
        failures += same ? 0 : 1;
        std::printf("%-14s %10.3f %10.3f %8.2f %s\n", p->name().c_str(), best_s, best_p, best_s / best_p,
                    same ? "yes" : "NO");
    }
    return failures == 0 ? 0 : 1;
}
