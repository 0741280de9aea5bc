#include "blicket/env.hpp"

#include <cmath>
#include <numeric>

#include "blicket/digest.hpp"
#include "blicket/errors.hpp"
#include "blicket/rng.hpp"

namespace blicket {

const char* phase_name(Phase p) {
    switch (p) {
        case Phase::Explore: return "explore";
        case Phase::Quiz: return "quiz";
        case Phase::Done: return "done";
    }
    return "done";
}

Phase parse_phase(const std::string& s) {
    if (s == "explore") return Phase::Explore;
    if (s == "quiz") return Phase::Quiz;
    if (s == "done") return Phase::Done;
    throw InvalidInput("unknown phase: " + s);
}

const char* reward_mode_name(RewardMode m) { return m == RewardMode::BlicketQuiz ? "blicket" : "modality"; }

RewardMode parse_reward_mode(const std::string& s) {
    if (s == "blicket") return RewardMode::BlicketQuiz;
    if (s == "modality") return RewardMode::ModalityQuiz;
    throw InvalidConfig("unknown reward mode: " + s);
}

Action Action::check(ObjectSet placed, int n_objects, bool enter_quiz) {
    Bits bits(n_objects + 1, false);
    for (ObjectId id : placed.members()) {
        if (id >= n_objects) throw InvalidInput("placement outside object universe");
        bits[id] = true;
    }
    bits[n_objects] = enter_quiz;
    return Action(std::move(bits));
}

Action Action::answer(bool yes, int n_objects) {
    Bits bits(n_objects + 1, false);
    bits[0] = yes;
    return Action(std::move(bits));
}

Action Action::from_code(std::uint32_t code, int n_objects) {
    Bits bits(n_objects + 1, false);
    for (int i = 0; i <= n_objects; ++i) bits[i] = (code >> i) & 1u;
    return Action(std::move(bits));
}

std::uint32_t Action::code() const {
    std::uint32_t c = 0;
    for (std::size_t i = 0; i < bits_.size(); ++i)
        if (bits_[i]) c |= 1u << i;
    return c;
}

ObjectSet Action::placement(int n_objects) const {
    ObjectSet s;
    for (int i = 0; i < n_objects; ++i)
        if (bits_.at(i)) s = s.with(i);
    return s;
}

Bits Observation::bits(int n_objects) const {
    Bits out(2 * n_objects + 2, false);
    for (int i = 0; i < n_objects; ++i) out[i] = placed.contains(i);
    out[n_objects] = lit;
    out[n_objects + 1] = quiz;
    if (query >= 0) out[n_objects + 2 + query] = true;
    return out;
}

Observation Observation::from_bits(const Bits& bits, int n_objects) {
    if (bits.size() != static_cast<std::size_t>(2 * n_objects + 2))
        throw InvalidInput("observation width mismatch");
    Observation o;
    for (int i = 0; i < n_objects; ++i)
        if (bits[i]) o.placed = o.placed.with(i);
    o.lit = bits[n_objects];
    o.quiz = bits[n_objects + 1];
    for (int i = 0; i < n_objects; ++i) {
        if (!bits[n_objects + 2 + i]) continue;
        if (o.query >= 0) throw InvalidInput("quiz query is not one-hot");
        o.query = i;
    }
    return o;
}

void EnvConfig::validate() const {
    const int n = n_objects();
    if (sampler.empty()) throw InvalidConfig("empty hypothesis sampler");
    if (prior.size() != sampler.size()) throw InvalidConfig("prior must have one weight per sampler hypothesis");
    double total = 0.0;
    for (double w : prior) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidConfig("prior weights must be finite and nonnegative");
        total += w;
    }
    if (total <= 0.0) throw InvalidConfig("prior weights are all zero");
    for (const auto& h : sampler)
        if (!h.blickets().subset_of(ObjectSet::all(n)))
            throw InvalidConfig("sampler hypothesis " + h.to_string() + " outside object universe");
    if (max_steps < n + 1) throw InvalidConfig("max_steps must leave room for one check plus the quiz");
    if (forced_explore_k < 0) throw InvalidConfig("forced_explore_k must be >= 0");
}

EnvConfig EnvConfig::uniform(HypothesisSpace space) {
    EnvConfig c;
    c.sampler = space.hypotheses();
    c.prior.assign(c.sampler.size(), 1.0);
    c.space = std::move(space);
    return c;
}

EnvConfig EnvConfig::fixed(HypothesisSpace space, const Hypothesis& hidden) {
    EnvConfig c;
    c.sampler = {hidden};
    c.prior = {1.0};
    c.space = std::move(space);
    return c;
}

void to_json(nlohmann::json& j, const EnvConfig& c) {
    j = nlohmann::json{{"space", c.space},
                       {"sampler", c.sampler},
                       {"prior", c.prior},
                       {"max_steps", c.max_steps},
                       {"forced_explore_k", c.forced_explore_k},
                       {"reward_mode", reward_mode_name(c.reward_mode)},
                       {"seed", c.seed}};
}

EnvConfig env_config_from_json(const nlohmann::json& j) {
    try {
        EnvConfig c;
        if (j.contains("space")) c.space = space_from_json(j.at("space"));
        if (j.contains("sampler")) {
            for (const auto& h : j.at("sampler")) c.sampler.push_back(hypothesis_from_json(h));
        } else if (j.contains("split")) {
            const auto& s = j.at("split");
            SplitSpec spec{parse_split_mode(s.value("mode", std::string("none"))),
                           s.value("held_out", std::vector<int>{})};
            Split split = split_space(c.space, spec);
            c.sampler = s.value("use", std::string("train")) == "test" ? split.test : split.train;
        } else {
            c.sampler = c.space.hypotheses();
        }
        if (j.contains("prior"))
            c.prior = j.at("prior").get<std::vector<double>>();
        else
            c.prior.assign(c.sampler.size(), 1.0);
        c.max_steps = j.value("max_steps", 25);
        c.forced_explore_k = j.value("forced_explore_k", 0);
        c.reward_mode = parse_reward_mode(j.value("reward_mode", std::string("blicket")));
        c.seed = j.value("seed", std::uint64_t{0});
        c.validate();
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidConfig(std::string("malformed env config: ") + e.what());
    } catch (const InvalidInput& e) {
        throw InvalidConfig(e.what());
    }
}

std::string config_digest(const EnvConfig& c) { return json_digest(nlohmann::json(c)); }

Hypothesis sample_hypothesis(const EnvConfig& config, std::uint64_t seed) {
    if (config.sampler.empty()) throw InvalidConfig("empty hypothesis sampler");
    Rng rng(seed);
    const double total = std::accumulate(config.prior.begin(), config.prior.end(), 0.0);
    const double u = uniform01(rng) * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < config.sampler.size(); ++i) {
        acc += config.prior[i];
        if (u < acc && config.prior[i] > 0.0) return config.sampler[i];
    }
    // u landed on the rounding edge; take the last positive-weight entry.
    for (std::size_t i = config.sampler.size(); i-- > 0;)
        if (config.prior[i] > 0.0) return config.sampler[i];
    throw InvalidConfig("prior weights are all zero");
}

Observation encode_observation(const EpisodeState& state, RewardMode mode) {
    Observation o;
    if (!state.history.empty()) {
        o.placed = state.history.back().placed;
        o.lit = state.history.back().lit;
    }
    if (state.phase == Phase::Quiz) {
        o.quiz = true;
        o.query = mode == RewardMode::BlicketQuiz ? state.quiz_cursor : 0;
    }
    return o;
}

BlicketEnv::BlicketEnv(EnvConfig config)
    : config_((config.validate(), std::move(config))), state_{config_.sampler.front()} {}

Observation BlicketEnv::reset(std::uint64_t seed) { return reset_with(sample_hypothesis(config_, seed)); }

Observation BlicketEnv::reset_with(const Hypothesis& hidden) {
    if (!hidden.blickets().subset_of(ObjectSet::all(n_objects())))
        throw InvalidConfig("hidden hypothesis outside object universe");
    state_ = EpisodeState{hidden};
    started_ = true;
    return encode_observation(state_, config_.reward_mode);
}

double BlicketEnv::max_episode_reward() const {
    return config_.reward_mode == RewardMode::BlicketQuiz ? n_objects() : 1.0;
}

StepResult BlicketEnv::step(const Action& action) {
    if (!started_) throw InvalidInput("step before reset");
    if (state_.phase == Phase::Done) throw EpisodeFinished();
    const int n = n_objects();
    if (action.width() != static_cast<std::size_t>(n + 1))
        throw InvalidInput("action width " + std::to_string(action.width()) + ", expected " + std::to_string(n + 1));

    double reward = 0.0;
    ++state_.step;
    if (state_.phase == Phase::Explore) {
        const ObjectSet placed = action.placement(n);
        state_.history.push_back({placed, detector_lit(state_.hidden, placed, n)});
        const bool requested = action.quiz_bit(n) && state_.step >= config_.forced_explore_k;
        if (requested || state_.step >= config_.max_steps - n) {
            state_.phase = Phase::Quiz;
            state_.quiz_cursor = 0;
            state_.quiz_entry_step = state_.step;
        }
    } else {
        const bool yes = action.bits()[0];
        bool correct;
        if (config_.reward_mode == RewardMode::BlicketQuiz) {
            correct = yes == state_.hidden.blickets().contains(state_.quiz_cursor);
            ++state_.quiz_cursor;
            if (state_.quiz_cursor == n) state_.phase = Phase::Done;
        } else {
            correct = yes == (state_.hidden.form() == Form::Conjunctive);
            state_.quiz_cursor = 1;
            state_.phase = Phase::Done;
        }
        reward = correct ? 1.0 : -1.0;
        state_.accumulated_reward += reward;
    }
    return {encode_observation(state_, config_.reward_mode), reward, state_.phase == Phase::Done};
}

}  // namespace blicket
