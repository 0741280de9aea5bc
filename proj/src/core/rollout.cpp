#include "blicket/rollout.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "blicket/errors.hpp"
#include "blicket/rng.hpp"

namespace blicket {

namespace {

// Keeps the policy's random stream independent of the env's hypothesis draw.
constexpr std::uint64_t kPolicySalt = 0x5bd1e9955bd1e995ULL;

std::string episode_name(int i) {
    std::ostringstream os;
    os << "ep" << std::setw(6) << std::setfill('0') << i;
    return os.str();
}

std::optional<Form> guess_from_answers(const Trajectory& t) {
    int quiz_steps = 0;
    int yes = 0;
    for (const auto& s : t.steps) {
        if (s.phase != Phase::Quiz) continue;
        ++quiz_steps;
        yes += s.action_bits.at(0) ? 1 : 0;
    }
    if (quiz_steps == 0) return std::nullopt;
    if (t.header.reward_mode == RewardMode::ModalityQuiz) return yes > 0 ? Form::Conjunctive : Form::Disjunctive;
    // Claiming two or more blickets only fits a conjunctive detector.
    return yes >= 2 ? Form::Conjunctive : Form::Disjunctive;
}

}  // namespace

EpisodeResult run_episode(const EnvConfig& config, AgentPolicy& policy, std::uint64_t seed,
                          const std::string& episode_id) {
    return run_episode(config, config_digest(config), policy, seed, episode_id);
}

EpisodeResult run_episode(const EnvConfig& config, const std::string& digest, AgentPolicy& policy,
                          std::uint64_t seed, const std::string& episode_id) {
    BlicketEnv env(config);
    const int n = config.n_objects();
    std::vector<Observation> history{env.reset(seed)};
    policy.reset({seed ^ kPolicySalt, n, config.reward_mode});

    EpisodeResult res;
    Trajectory& traj = res.trajectory;
    traj.header = make_header(config, env.state().hidden, seed, episode_id, policy.name(), digest);

    for (;;) {
        const Phase phase = env.state().phase;
        const Action action = policy.act(history);
        StepResult r;
        try {
            r = env.step(action);
        } catch (const InvalidInput& e) {
            traj.error = e.what();
            break;
        }
        traj.steps.push_back({env.state().step, phase, action.bits(), r.observation.bits(n), r.reward, r.done});
        history.push_back(r.observation);
        policy.notify(r.reward);
        if (r.done) break;
    }

    res.total_reward = traj.total_reward();
    res.quiz_entry_step = env.state().quiz_entry_step;
    if (config.reward_mode == RewardMode::BlicketQuiz)
        res.modality_guess = policy.modality_guess();
    if (!res.modality_guess) res.modality_guess = guess_from_answers(traj);
    res.modality_correct = !traj.error && res.modality_guess && *res.modality_guess == env.state().hidden.form();
    return res;
}

std::vector<EpisodeResult> run_episodes_serial(const EnvConfig& config, const AgentPolicy& prototype,
                                               std::uint64_t base_seed, int n_episodes) {
    std::vector<EpisodeResult> out;
    out.reserve(static_cast<std::size_t>(std::max(n_episodes, 0)));
    auto policy = prototype.clone();
    const std::string digest = config_digest(config);
    for (int i = 0; i < n_episodes; ++i)
        out.push_back(run_episode(config, digest, *policy, episode_seed(base_seed, static_cast<std::uint64_t>(i)),
                                  episode_name(i)));
    return out;
}

std::vector<EpisodeResult> run_episodes_parallel(const EnvConfig& config, const AgentPolicy& prototype,
                                                 std::uint64_t base_seed, int n_episodes) {
    std::vector<EpisodeResult> out(static_cast<std::size_t>(std::max(n_episodes, 0)));
    std::exception_ptr failure;
    const std::string digest = config_digest(config);
#pragma omp parallel
    {
        auto policy = prototype.clone();
#pragma omp for schedule(dynamic, 32)
        for (int i = 0; i < n_episodes; ++i) {
            try {
                out[i] = run_episode(config, digest, *policy, episode_seed(base_seed, static_cast<std::uint64_t>(i)),
                                     episode_name(i));
            } catch (...) {
#pragma omp critical(blicket_rollout_failure)
                if (!failure) failure = std::current_exception();
            }
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

ConfigMetrics summarize(const std::vector<EpisodeResult>& episodes, std::string config, std::string policy) {
    ConfigMetrics m;
    m.config = std::move(config);
    m.policy = std::move(policy);
    m.n_episodes = static_cast<int>(episodes.size());
    if (episodes.empty()) return m;
    double sum = 0.0;
    int correct = 0;
    for (const auto& e : episodes) {
        sum += e.total_reward;
        correct += e.modality_correct ? 1 : 0;
    }
    m.mean_reward = sum / m.n_episodes;
    double sq = 0.0;
    for (const auto& e : episodes) sq += (e.total_reward - m.mean_reward) * (e.total_reward - m.mean_reward);
    m.std_reward = std::sqrt(sq / m.n_episodes);
    m.fca = static_cast<double>(correct) / m.n_episodes;
    return m;
}

EvaluationReport evaluate(const AgentPolicy& policy, const std::vector<LabeledConfig>& configs, int n_episodes,
                          std::uint64_t seed, Execution exec) {
    if (n_episodes < 1) throw InvalidInput("evaluation needs at least one episode");
    EvaluationReport rep;
    for (std::size_t c = 0; c < configs.size(); ++c) {
        const std::uint64_t base = episode_seed(seed, 0x10000 + c);
        auto eps = exec == Execution::Parallel ? run_episodes_parallel(configs[c].config, policy, base, n_episodes)
                                               : run_episodes_serial(configs[c].config, policy, base, n_episodes);
        for (auto& e : eps) e.trajectory.header.episode_id = configs[c].label + "-" + e.trajectory.header.episode_id;
        rep.per_config.push_back(summarize(eps, configs[c].label, policy.name()));
        for (auto& e : eps) rep.episodes.push_back(std::move(e));
    }
    rep.pooled = summarize(rep.episodes, "pooled", policy.name());
    return rep;
}

void write_metrics_csv(std::ostream& os, const EvaluationReport& report) {
    os << "config,policy,mean_reward,std_reward,fca,n_episodes\n";
    auto row = [&](const ConfigMetrics& m) {
        os << m.config << ',' << m.policy << ',' << std::setprecision(10) << m.mean_reward << ',' << m.std_reward << ','
           << m.fca << ',' << m.n_episodes << '\n';
    };
    for (const auto& m : report.per_config) row(m);
    if (report.per_config.size() > 1) row(report.pooled);
}

}  // namespace blicket
