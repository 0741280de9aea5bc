#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "blicket/hypotheses.hpp"

namespace blicket {

enum class Phase { Explore, Quiz, Done };
enum class RewardMode { BlicketQuiz, ModalityQuiz };

const char* phase_name(Phase p);
Phase parse_phase(const std::string& s);
const char* reward_mode_name(RewardMode m);
RewardMode parse_reward_mode(const std::string& s);

using Bits = std::vector<bool>;

// n+1 bits: bits[0..n) are placement flags, bits[n] requests the quiz in the
// explore phase. In the quiz phase bits[0] is the yes/no answer.
class Action {
public:
    Action() = default;
    explicit Action(Bits bits) : bits_(std::move(bits)) {}

    static Action check(ObjectSet placed, int n_objects, bool enter_quiz = false);
    static Action answer(bool yes, int n_objects);
    // Bit i of `code` is bits[i].
    static Action from_code(std::uint32_t code, int n_objects);

    const Bits& bits() const { return bits_; }
    std::size_t width() const { return bits_.size(); }
    std::uint32_t code() const;
    ObjectSet placement(int n_objects) const;
    bool quiz_bit(int n_objects) const { return bits_.at(n_objects); }

    friend bool operator==(const Action&, const Action&) = default;

private:
    Bits bits_;
};

// Width 2n+2: placed[n], lit, phase (quiz=true), quiz_query[n].
struct Observation {
    ObjectSet placed;
    bool lit = false;
    bool quiz = false;
    int query = -1;  // queried object in the quiz phase, else -1

    Bits bits(int n_objects) const;
    static Observation from_bits(const Bits& bits, int n_objects);

    friend bool operator==(const Observation&, const Observation&) = default;
};

struct EnvConfig {
    HypothesisSpace space = enumerate_space(3, Family::Default);
    std::vector<Hypothesis> sampler;  // hidden hypotheses are drawn from here
    std::vector<double> prior;        // one weight per sampler entry
    int max_steps = 25;
    int forced_explore_k = 0;
    RewardMode reward_mode = RewardMode::BlicketQuiz;
    std::uint64_t seed = 0;

    int n_objects() const { return space.n_objects(); }
    // Throws InvalidConfig.
    void validate() const;

    // Uniform prior over the whole space.
    static EnvConfig uniform(HypothesisSpace space);
    // Point-mass sampler on one hypothesis of `space`.
    static EnvConfig fixed(HypothesisSpace space, const Hypothesis& hidden);
};

void to_json(nlohmann::json& j, const EnvConfig& c);
EnvConfig env_config_from_json(const nlohmann::json& j);
std::string config_digest(const EnvConfig& c);

Hypothesis sample_hypothesis(const EnvConfig& config, std::uint64_t seed);

struct EpisodeState {
    explicit EpisodeState(Hypothesis h) : hidden(h) {}

    Hypothesis hidden;
    Phase phase = Phase::Explore;
    int step = 0;
    Evidence history;
    int quiz_cursor = 0;
    double accumulated_reward = 0.0;
    int quiz_entry_step = -1;  // step index at which the quiz began
};

Observation encode_observation(const EpisodeState& state, RewardMode mode);

struct StepResult {
    Observation observation;
    double reward = 0.0;
    bool done = false;
};

class BlicketEnv {
public:
    explicit BlicketEnv(EnvConfig config);

    Observation reset(std::uint64_t seed);
    // Starts an episode with a known hidden hypothesis (replay, presets).
    Observation reset_with(const Hypothesis& hidden);
    StepResult step(const Action& action);

    const EnvConfig& config() const { return config_; }
    const EpisodeState& state() const { return state_; }
    int n_objects() const { return config_.n_objects(); }
    double max_episode_reward() const;

private:
    EnvConfig config_;
    EpisodeState state_;
    bool started_ = false;
};

}  // namespace blicket
