#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "blicket/env.hpp"

namespace blicket {

// Everything needed to replay an episode without the original config file.
struct TrajectoryHeader {
    std::string episode_id;
    Hypothesis hidden{Form::Disjunctive, ObjectSet{0}};
    std::string config_digest;
    std::uint64_t seed = 0;
    int n_objects = 3;
    int max_steps = 25;
    int forced_explore_k = 0;
    RewardMode reward_mode = RewardMode::BlicketQuiz;
    std::string policy;
    std::string owner = "agent";  // agent | human
};

struct StepRecord {
    int step = 0;
    Phase phase = Phase::Explore;  // phase in which the action was taken
    Bits action_bits;
    Bits observation_bits;  // observation after the action
    double reward = 0.0;
    bool done = false;
};

struct Trajectory {
    TrajectoryHeader header;
    std::vector<StepRecord> steps;
    std::optional<std::string> error;  // set when the episode was aborted

    double total_reward() const;
    // Step at which the quiz began, or -1.
    int quiz_entry_step() const;
    bool complete() const { return !steps.empty() && steps.back().done; }
};

TrajectoryHeader make_header(const EnvConfig& config, const Hypothesis& hidden, std::uint64_t seed,
                             std::string episode_id, std::string policy);
TrajectoryHeader make_header(const EnvConfig& config, const Hypothesis& hidden, std::uint64_t seed,
                             std::string episode_id, std::string policy, std::string digest);

nlohmann::json header_to_json(const TrajectoryHeader& h);
nlohmann::json step_to_json(const std::string& episode_id, const StepRecord& s);
// Full trajectory as a single JSON document (session transcripts).
nlohmann::json trajectory_to_json(const Trajectory& t);
Trajectory trajectory_from_json(const nlohmann::json& j);

// One header line followed by one line per step.
void write_jsonl(std::ostream& os, const Trajectory& t);
std::vector<Trajectory> read_jsonl(std::istream& is);

struct ReplayReport {
    bool ok = true;
    int first_mismatch = -1;  // index into steps
    std::string detail;
};

// Re-runs the logged actions against the logged hidden hypothesis and
// compares observations, rewards and done flags bit for bit.
ReplayReport replay(const Trajectory& t);

struct DatasetManifest {
    std::size_t count = 0;
    std::vector<std::string> config_digests;
    std::map<std::string, std::size_t> reward_histogram;
    std::size_t total_steps = 0;
    int max_episode_length = 0;
};

nlohmann::json manifest_to_json(const DatasetManifest& m);

// Writes <dir>/trajectories.jsonl and <dir>/manifest.json.
DatasetManifest export_dataset(const std::vector<Trajectory>& trajectories, const std::filesystem::path& dir);
std::vector<Trajectory> import_dataset(const std::filesystem::path& dir);

}  // namespace blicket
