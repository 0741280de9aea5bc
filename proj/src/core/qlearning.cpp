#include "blicket/qlearning.hpp"

#include <cmath>
#include <algorithm>
#include <fstream>
#include <map>

#include "blicket/errors.hpp"

namespace blicket {

void QHyperparams::validate() const {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw InvalidConfig("epsilon must be in [0, 1]");
    if (!(learning_rate > 0.0 && learning_rate <= 1.0)) throw InvalidConfig("learning rate must be in (0, 1]");
    if (!(discount >= 0.0 && discount <= 1.0)) throw InvalidConfig("discount must be in [0, 1]");
    if (convergence_window < 1) throw InvalidConfig("convergence window must be >= 1");
}

std::string history_key(std::span<const Observation> history, int n_objects) {
    std::string key;
    key.reserve(history.size() * (2 * n_objects + 3));
    for (std::size_t i = 0; i < history.size(); ++i) {
        if (i) key += '|';
        for (bool b : history[i].bits(n_objects)) key += b ? '1' : '0';
    }
    return key;
}

QTable::QTable(int n_objects) : n_objects_(n_objects) {
    if (n_objects < 1 || n_objects > 8) throw InvalidConfig("tabular Q-learning supports 1..8 objects");
}

double QTable::value(const std::string& key, std::uint32_t action) const {
    auto it = values_.find(key);
    return it == values_.end() ? 0.0 : it->second.at(action);
}

double QTable::max_value(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return 0.0;
    double best = it->second.front();
    for (double v : it->second) best = std::max(best, v);
    return best;
}

std::uint32_t QTable::argmax(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return 0;
    std::uint32_t best = 0;
    for (std::uint32_t a = 1; a < it->second.size(); ++a)
        if (it->second[a] > it->second[best]) best = a;
    return best;
}

void QTable::set(const std::string& key, std::uint32_t action, double v) {
    if (!std::isfinite(v)) throw InvalidInput("Q-values must be finite");
    auto& row = values_[key];
    if (row.empty()) row.assign(n_actions(), 0.0);
    row.at(action) = v;
}

nlohmann::json QTable::to_json() const {
    // std::map gives the serialized table a canonical key order.
    std::map<std::string, std::vector<double>> sorted(values_.begin(), values_.end());
    return {{"n_objects", n_objects_}, {"values", sorted}};
}

QTable QTable::from_json(const nlohmann::json& j) {
    try {
        QTable q(j.at("n_objects").get<int>());
        for (const auto& [key, row] : j.at("values").items()) {
            auto v = row.get<std::vector<double>>();
            if (v.size() != q.n_actions()) throw InvalidInput("Q-table row has wrong width");
            for (double x : v)
                if (!std::isfinite(x)) throw InvalidInput("Q-values must be finite");
            q.values_[key] = std::move(v);
        }
        return q;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("malformed Q-table: ") + e.what());
    }
}

void QTable::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << to_json().dump() << '\n';
    if (!out) throw IoError("failed writing " + path.string());
}

QTable QTable::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    try {
        return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidInput(std::string("malformed Q-table file: ") + e.what());
    }
}

Action q_select(const QTable& q, const std::string& key, double epsilon, Rng& rng) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw InvalidInput("epsilon must be in [0, 1]");
    if (epsilon > 0.0 && uniform01(rng) < epsilon)
        return Action::from_code(static_cast<std::uint32_t>(uniform_below(rng, q.n_actions())), q.n_objects());
    return Action::from_code(q.argmax(key), q.n_objects());
}

void q_update(QTable& q, const std::string& s, std::uint32_t a, double r, const std::string& next, bool terminal,
              double learning_rate, double discount) {
    const double target = r + (terminal ? 0.0 : discount * q.max_value(next));
    const double old = q.value(s, a);
    q.set(s, a, old + learning_rate * (target - old));
}

nlohmann::json stats_to_json(const QStats& s) {
    return {{"converged", s.converged},
            {"episodes_run", s.episodes_run},
            {"episodes_to_convergence", s.episodes_to_convergence},
            {"env_steps_to_convergence", s.env_steps_to_convergence},
            {"updates_to_convergence", s.updates_to_convergence},
            {"total_env_steps", s.total_env_steps},
            {"total_updates", s.total_updates}};
}

namespace {

bool greedy_scores_max(const QTable& q, BlicketEnv& env, const Hypothesis& hidden) {
    std::vector<Observation> hist{env.reset_with(hidden)};
    Rng unused(0);
    for (;;) {
        const Action a = q_select(q, history_key(hist, env.n_objects()), 0.0, unused);
        const StepResult r = env.step(a);
        hist.push_back(r.observation);
        if (r.done) break;
    }
    return env.state().accumulated_reward == env.max_episode_reward();
}

}  // namespace

QTrainResult train_q(const EnvConfig& config, const QHyperparams& hyper, int max_episodes) {
    hyper.validate();
    config.validate();
    QTrainResult res{QTable(config.n_objects()), {}};
    QTable& q = res.table;
    QStats& st = res.stats;

    std::vector<Hypothesis> eval_set;
    for (std::size_t i = 0; i < config.sampler.size(); ++i)
        if (config.prior[i] > 0.0) eval_set.push_back(config.sampler[i]);

    BlicketEnv env(config);
    BlicketEnv eval_env(config);
    Rng rng(hyper.seed);
    const int n = config.n_objects();
    int streak = 0;
    std::vector<long long> steps_at(max_episodes > 0 ? max_episodes + 1 : 1, 0);
    std::vector<long long> updates_at(steps_at.size(), 0);

    for (int ep = 1; ep <= max_episodes; ++ep) {
        std::vector<Observation> hist{env.reset(episode_seed(hyper.seed, static_cast<std::uint64_t>(ep)))};
        std::string key = history_key(hist, n);
        for (;;) {
            const Action a = q_select(q, key, hyper.epsilon, rng);
            const StepResult r = env.step(a);
            hist.push_back(r.observation);
            std::string next = history_key(hist, n);
            q_update(q, key, a.code(), r.reward, next, r.done, hyper.learning_rate, hyper.discount);
            ++st.total_env_steps;
            ++st.total_updates;
            key = std::move(next);
            if (r.done) break;
        }
        st.episodes_run = ep;
        steps_at[ep] = st.total_env_steps;
        updates_at[ep] = st.total_updates;

        bool all_max = true;
        for (const auto& h : eval_set) all_max = all_max && greedy_scores_max(q, eval_env, h);
        streak = all_max ? streak + 1 : 0;
        if (streak >= hyper.convergence_window) {
            st.converged = true;
            st.episodes_to_convergence = ep - hyper.convergence_window + 1;
            st.env_steps_to_convergence = steps_at[st.episodes_to_convergence];
            st.updates_to_convergence = updates_at[st.episodes_to_convergence];
            break;
        }
    }
    return res;
}

Action QPolicy::act(std::span<const Observation> history) {
    return q_select(*table_, history_key(history, table_->n_objects()), epsilon_, rng_);
}

}  // namespace blicket
