#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "blicket/hypotheses.hpp"

namespace blicket {

// Normalized posterior over a hypothesis space. Likelihoods are deterministic,
// so an update only zeroes entries and renormalizes.
class Belief {
public:
    Belief(std::shared_ptr<const HypothesisSpace> space, std::vector<double> weights);

    static Belief uniform(std::shared_ptr<const HypothesisSpace> space);
    static Belief uniform(HypothesisSpace space);
    // Prior restricted to `sampler` (weights per sampler entry); other hypotheses get 0.
    static Belief from_prior(std::shared_ptr<const HypothesisSpace> space, std::span<const Hypothesis> sampler,
                             std::span<const double> weights);

    const HypothesisSpace& space() const { return *space_; }
    const std::shared_ptr<const HypothesisSpace>& space_ptr() const { return space_; }
    std::span<const double> weights() const { return weights_; }
    double weight(std::size_t i) const { return weights_[i]; }

    std::vector<std::size_t> support() const;
    std::size_t support_size() const;
    // Only valid for spaces of at most 64 hypotheses.
    std::uint64_t support_mask() const;

    double probability_lit(ObjectSet placed) const;

private:
    std::shared_ptr<const HypothesisSpace> space_;
    std::vector<double> weights_;
};

Belief update(const Belief& b, ObjectSet placed, bool lit);
double entropy(const Belief& b);
double info_gain(const Belief& b, ObjectSet placed);

// Placement maximizing info_gain; ties go to the smaller, then
// lexicographically first subset. Throws NothingToLearn on a point mass.
ObjectSet greedy_policy(const Belief& b);

// Decision tree over check outcomes. Node 0 is the root.
class PolicyTree {
public:
    struct Node {
        bool terminal = true;
        int hypothesis = -1;  // identified hypothesis (terminal nodes)
        ObjectSet check;      // internal nodes
        int on_lit = -1;
        int on_dark = -1;
    };

    PolicyTree() = default;
    explicit PolicyTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {}

    const Node& root() const { return nodes_.front(); }
    const Node& node(int i) const { return nodes_.at(i); }
    const std::vector<Node>& nodes() const { return nodes_; }
    bool empty() const { return nodes_.size() <= 1; }

    int depth() const;
    int leaf_count() const;
    std::vector<int> leaf_hypotheses() const;

    // Left-to-right indented observation tree.
    std::string to_text(const HypothesisSpace& space) const;
    nlohmann::json to_json(const HypothesisSpace& space) const;

private:
    std::vector<Node> nodes_;
};

struct PlanResult {
    double value = 0.0;  // expected number of checks until identification
    PolicyTree tree;
};

// Exact expectimax over belief supports.
PlanResult min_expected_steps(const Belief& b);

// The greedy policy unrolled into a tree, with its exact expected step count.
PlanResult greedy_plan(const Belief& b);

struct QuizAnswers {
    std::vector<bool> is_blicket;
    Form modality = Form::Disjunctive;
};

QuizAnswers map_quiz_answers(const Belief& b);

}  // namespace blicket
