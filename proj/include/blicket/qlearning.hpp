#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "blicket/agents.hpp"
#include "blicket/env.hpp"
#include "blicket/rng.hpp"

namespace blicket {

struct QHyperparams {
    double epsilon = 0.1;
    double learning_rate = 0.95;
    double discount = 0.99;
    int convergence_window = 500;
    std::uint64_t seed = 0;

    void validate() const;
};

// Canonical key for a full observation history: each observation's bits as
// '0'/'1', observations separated by '|'.
std::string history_key(std::span<const Observation> history, int n_objects);

// Tabular action values keyed by history. Unseen keys read as zero.
class QTable {
public:
    explicit QTable(int n_objects = 3);

    int n_objects() const { return n_objects_; }
    std::size_t n_actions() const { return std::size_t{1} << (n_objects_ + 1); }
    std::size_t n_states() const { return values_.size(); }

    double value(const std::string& key, std::uint32_t action) const;
    double max_value(const std::string& key) const;
    // Lowest action code among the maximizers.
    std::uint32_t argmax(const std::string& key) const;
    void set(const std::string& key, std::uint32_t action, double v);

    nlohmann::json to_json() const;
    static QTable from_json(const nlohmann::json& j);
    void save(const std::filesystem::path& path) const;
    static QTable load(const std::filesystem::path& path);

    friend bool operator==(const QTable&, const QTable&) = default;

private:
    int n_objects_;
    std::unordered_map<std::string, std::vector<double>> values_;
};

Action q_select(const QTable& q, const std::string& key, double epsilon, Rng& rng);

void q_update(QTable& q, const std::string& s, std::uint32_t a, double r, const std::string& next, bool terminal,
              double learning_rate, double discount);

struct QStats {
    bool converged = false;
    int episodes_run = 0;
    // First episode of the sustained run of greedy maximum-reward episodes.
    int episodes_to_convergence = -1;
    // Environment steps / table updates up to and including that episode.
    long long env_steps_to_convergence = -1;
    long long updates_to_convergence = -1;
    long long total_env_steps = 0;
    long long total_updates = 0;
};

nlohmann::json stats_to_json(const QStats& s);

struct QTrainResult {
    QTable table;
    QStats stats;
};

// Epsilon-greedy tabular Q-learning. After every training episode the greedy
// policy is rolled out against each sampler hypothesis; convergence means it
// scores the maximum on all of them for `convergence_window` consecutive
// episodes.
QTrainResult train_q(const EnvConfig& config, const QHyperparams& hyper, int max_episodes);

// Greedy (or epsilon-greedy) policy backed by a fixed table.
class QPolicy : public AgentPolicy {
public:
    QPolicy(std::shared_ptr<const QTable> table, double epsilon = 0.0)
        : table_(std::move(table)), epsilon_(epsilon) {}

    void reset(const EpisodeContext& ctx) override { rng_.seed(ctx.seed); }
    Action act(std::span<const Observation> history) override;
    std::unique_ptr<AgentPolicy> clone() const override { return std::make_unique<QPolicy>(*this); }
    std::string name() const override { return "q"; }

private:
    std::shared_ptr<const QTable> table_;
    double epsilon_;
    Rng rng_{0};
};

}  // namespace blicket
