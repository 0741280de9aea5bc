#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include "blicket/belief.hpp"
#include "blicket/env.hpp"
#include "blicket/rng.hpp"

namespace blicket {

// Public task information an agent receives at the start of an episode.
struct EpisodeContext {
    std::uint64_t seed = 0;
    int n_objects = 3;
    RewardMode reward_mode = RewardMode::BlicketQuiz;
};

class AgentPolicy {
public:
    virtual ~AgentPolicy() = default;

    virtual void reset(const EpisodeContext& ctx) = 0;
    // `history` holds every observation of the episode so far, oldest first.
    virtual Action act(std::span<const Observation> history) = 0;
    virtual void notify(double /*reward*/) {}
    // Explicit conjunctive/disjunctive judgement, if the policy forms one.
    virtual std::optional<Form> modality_guess() const { return std::nullopt; }

    virtual std::unique_ptr<AgentPolicy> clone() const = 0;
    virtual std::string name() const = 0;
};

// Every action bit independent and uniform. With forced_k > 0 the quiz bit is
// withheld for the first forced_k - 1 checks, so the earliest possible entry
// is check forced_k.
class RandomPolicy : public AgentPolicy {
public:
    RandomPolicy(int n_objects, int forced_k = 0) : n_objects_(n_objects), forced_k_(forced_k) {}

    void reset(const EpisodeContext& ctx) override;
    Action act(std::span<const Observation> history) override;
    std::unique_ptr<AgentPolicy> clone() const override { return std::make_unique<RandomPolicy>(*this); }
    std::string name() const override { return forced_k_ > 0 ? "random-k" + std::to_string(forced_k_) : "random"; }

private:
    int n_objects_;
    int forced_k_;
    int checks_ = 0;
    Rng rng_{0};
};

// Requests the quiz immediately and gives the same answer to every question.
class ConstantAnswerPolicy : public AgentPolicy {
public:
    ConstantAnswerPolicy(int n_objects, bool answer) : n_objects_(n_objects), answer_(answer) {}

    void reset(const EpisodeContext& ctx) override { n_objects_ = ctx.n_objects; }
    Action act(std::span<const Observation> history) override;
    std::unique_ptr<AgentPolicy> clone() const override { return std::make_unique<ConstantAnswerPolicy>(*this); }
    std::string name() const override { return answer_ ? "always-yes" : "always-no"; }

private:
    int n_objects_;
    bool answer_;
};

enum class BayesExploration { Greedy, MinStep };

// Keeps an exact posterior, checks until a single hypothesis remains, then
// answers the quiz from the posterior.
class BayesAgent : public AgentPolicy {
public:
    BayesAgent(Belief prior, BayesExploration mode);

    void reset(const EpisodeContext& ctx) override;
    Action act(std::span<const Observation> history) override;
    std::optional<Form> modality_guess() const override;
    std::unique_ptr<AgentPolicy> clone() const override { return std::make_unique<BayesAgent>(*this); }
    std::string name() const override { return mode_ == BayesExploration::Greedy ? "bayes-greedy" : "bayes-minstep"; }

    const Belief& belief() const { return belief_; }
    int checks_made() const { return checks_; }

private:
    ObjectSet next_check() const;

    Belief prior_;
    BayesExploration mode_;
    std::shared_ptr<const PlanResult> plan_;  // MinStep only

    Belief belief_;
    RewardMode reward_mode_ = RewardMode::BlicketQuiz;
    bool awaiting_outcome_ = false;
    int tree_node_ = 0;
    int checks_ = 0;
};

}  // namespace blicket
