#include "blicket/agents.hpp"

#include "blicket/errors.hpp"

namespace blicket {

void RandomPolicy::reset(const EpisodeContext& ctx) {
    n_objects_ = ctx.n_objects;
    checks_ = 0;
    rng_.seed(ctx.seed);
}

Action RandomPolicy::act(std::span<const Observation> history) {
    Bits bits(n_objects_ + 1);
    for (auto&& b : bits) b = coin(rng_);
    const bool exploring = history.empty() || !history.back().quiz;
    if (exploring) {
        ++checks_;
        if (checks_ < forced_k_) bits[n_objects_] = false;
    }
    return Action(std::move(bits));
}

Action ConstantAnswerPolicy::act(std::span<const Observation> history) {
    if (history.empty() || !history.back().quiz) return Action::check({}, n_objects_, true);
    return Action::answer(answer_, n_objects_);
}

BayesAgent::BayesAgent(Belief prior, BayesExploration mode)
    : prior_(std::move(prior)), mode_(mode), belief_(prior_) {
    if (mode_ == BayesExploration::MinStep)
        plan_ = std::make_shared<const PlanResult>(min_expected_steps(prior_));
}

void BayesAgent::reset(const EpisodeContext& ctx) {
    if (ctx.n_objects != prior_.space().n_objects())
        throw InvalidConfig("agent hypothesis space does not match the environment's object count");
    belief_ = prior_;
    reward_mode_ = ctx.reward_mode;
    awaiting_outcome_ = false;
    tree_node_ = 0;
    checks_ = 0;
}

ObjectSet BayesAgent::next_check() const {
    if (mode_ == BayesExploration::MinStep) {
        const auto& node = plan_->tree.node(tree_node_);
        if (!node.terminal) return node.check;
    }
    return greedy_policy(belief_);
}

Action BayesAgent::act(std::span<const Observation> history) {
    const int n = prior_.space().n_objects();
    if (history.empty()) throw InvalidInput("bayes agent needs the initial observation");
    const Observation& obs = history.back();

    if (awaiting_outcome_) {
        belief_ = update(belief_, obs.placed, obs.lit);
        if (mode_ == BayesExploration::MinStep) {
            const auto& node = plan_->tree.node(tree_node_);
            if (!node.terminal && node.check == obs.placed) tree_node_ = obs.lit ? node.on_lit : node.on_dark;
        }
        awaiting_outcome_ = false;
    }

    if (!obs.quiz) {
        if (belief_.support_size() > 1) {
            const ObjectSet check = next_check();
            if (belief_.probability_lit(check) > 0.0 && belief_.probability_lit(check) < 1.0) {
                ++checks_;
                awaiting_outcome_ = true;
                return Action::check(check, n);
            }
        }
        // Identified (or nothing left to distinguish): empty check plus quiz request.
        awaiting_outcome_ = true;
        return Action::check({}, n, true);
    }

    const QuizAnswers answers = map_quiz_answers(belief_);
    if (reward_mode_ == RewardMode::ModalityQuiz) return Action::answer(answers.modality == Form::Conjunctive, n);
    if (obs.query < 0 || obs.query >= n) throw InvalidInput("quiz observation without a query");
    return Action::answer(answers.is_blicket[obs.query], n);
}

std::optional<Form> BayesAgent::modality_guess() const { return map_quiz_answers(belief_).modality; }

}  // namespace blicket
