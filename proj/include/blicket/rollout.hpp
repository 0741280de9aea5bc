#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "blicket/agents.hpp"
#include "blicket/env.hpp"
#include "blicket/trajectory.hpp"

namespace blicket {

struct EpisodeResult {
    Trajectory trajectory;
    double total_reward = 0.0;
    std::optional<Form> modality_guess;
    bool modality_correct = false;
    int quiz_entry_step = -1;
};

// Rolls one episode. The env draws its hidden hypothesis from `seed`, and the
// policy is reset with the same seed. A malformed action aborts the episode
// and is recorded in the trajectory.
EpisodeResult run_episode(const EnvConfig& config, AgentPolicy& policy, std::uint64_t seed,
                          const std::string& episode_id);
// Same, with the config digest precomputed by the caller.
EpisodeResult run_episode(const EnvConfig& config, const std::string& digest, AgentPolicy& policy,
                          std::uint64_t seed, const std::string& episode_id);

// Episode i uses episode_seed(base_seed, i) and a fresh clone of `prototype`,
// so both variants produce identical results in identical order.
std::vector<EpisodeResult> run_episodes_serial(const EnvConfig& config, const AgentPolicy& prototype,
                                               std::uint64_t base_seed, int n_episodes);
std::vector<EpisodeResult> run_episodes_parallel(const EnvConfig& config, const AgentPolicy& prototype,
                                                 std::uint64_t base_seed, int n_episodes);

enum class Execution { Serial, Parallel };

struct ConfigMetrics {
    std::string config;
    std::string policy;
    double mean_reward = 0.0;
    double std_reward = 0.0;
    double fca = 0.0;
    int n_episodes = 0;
};

struct LabeledConfig {
    std::string label;
    EnvConfig config;
};

struct EvaluationReport {
    std::vector<ConfigMetrics> per_config;
    ConfigMetrics pooled;
    std::vector<EpisodeResult> episodes;  // all configs, in order
};

ConfigMetrics summarize(const std::vector<EpisodeResult>& episodes, std::string config, std::string policy);

EvaluationReport evaluate(const AgentPolicy& policy, const std::vector<LabeledConfig>& configs, int n_episodes,
                          std::uint64_t seed, Execution exec = Execution::Parallel);

// Columns: config,policy,mean_reward,std_reward,fca,n_episodes
void write_metrics_csv(std::ostream& os, const EvaluationReport& report);

}  // namespace blicket
