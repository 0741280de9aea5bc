#include <iostream>

#include <CLI11.hpp>

#include "blicket/harness.hpp"

using namespace blicket;

namespace {

struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> episodes;
    std::optional<std::string> out;
    std::optional<std::string> policy;
    std::optional<std::string> space;
    std::optional<std::string> reward_mode;
    std::optional<int> forced_k;
    std::optional<std::string> q_table;
    std::optional<int> max_episodes;
    std::vector<std::string> conditions;
    std::optional<std::string> endpoint;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "JSON run config")->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "Base seed");
    cmd->add_option("--out", o.out, "Output directory");
    cmd->add_option("--space", o.space, "Hypothesis space (uniform prior)")->check(CLI::IsMember({"default", "extended"}));
    cmd->add_option("--reward-mode", o.reward_mode, "Quiz type")->check(CLI::IsMember({"blicket", "modality"}));
    cmd->add_option("--forced-k", o.forced_k, "Forced exploration steps before the quiz");
}

RunConfig resolve(const Overrides& o) {
    RunConfig c = o.config.empty() ? RunConfig{} : load_run_config(o.config);
    if (o.space) {
        EnvConfig env = EnvConfig::uniform(enumerate_space(3, parse_family(*o.space)));
        env.max_steps = c.env.max_steps;
        env.forced_explore_k = c.env.forced_explore_k;
        env.reward_mode = c.env.reward_mode;
        env.seed = c.env.seed;
        c.env = std::move(env);
    }
    if (o.reward_mode) c.env.reward_mode = parse_reward_mode(*o.reward_mode);
    if (o.forced_k) c.env.forced_explore_k = *o.forced_k;
    if (o.seed) c.seed = c.env.seed = *o.seed;
    if (o.episodes) c.episodes = *o.episodes;
    if (o.out) c.out = *o.out;
    if (o.policy) c.policy = *o.policy;
    if (o.q_table) c.q_table = *o.q_table;
    if (o.max_episodes) c.q_max_episodes = *o.max_episodes;
    if (!o.conditions.empty()) c.conditions = o.conditions;
    if (o.endpoint) c.endpoint = prompt::endpoint_from_json(nlohmann::json::parse(*o.endpoint));
    c.validate();
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Blicket detector benchmark"};
    app.require_subcommand(1);
    Overrides o;

    auto* run = app.add_subcommand("run", "Evaluate a policy and write metrics and trajectories");
    add_common(run, o);
    run->add_option("--episodes", o.episodes, "Episodes per config");
    run->add_option("--policy", o.policy, "random | random-k | q | bayes-greedy | bayes-minstep");
    run->add_option("--q-table", o.q_table, "Table for policy q");

    auto* train = app.add_subcommand("train-q", "Train tabular Q-learning and save the table");
    add_common(train, o);
    train->add_option("--max-episodes", o.max_episodes, "Training budget");

    auto* plan = app.add_subcommand("plan", "Write minimum-step and greedy policy trees");
    add_common(plan, o);

    auto* prompts = app.add_subcommand("prompts", "Render prompts and score replies");
    add_common(prompts, o);
    prompts->add_option("--condition", o.conditions, "Condition slug, repeatable");
    prompts->add_option("--endpoint", o.endpoint, "Endpoint JSON; enables online mode");

    std::string host = "127.0.0.1";
    int port = 8080;
    std::string store = "sessions.jsonl";
    auto* srv = app.add_subcommand("serve", "Run the HTTP session service");
    srv->add_option("--host", host, "Bind address")->capture_default_str();
    srv->add_option("--port", port, "Bind port")->capture_default_str();
    srv->add_option("--store", store, "Trajectory store (JSON-lines)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (srv->parsed()) {
            std::cerr << "listening on " << host << ':' << port << '\n';
            serve(host, port, store);
            return 0;
        }
        const RunConfig c = resolve(o);
        nlohmann::json summary;
        if (run->parsed()) summary = cmd_run(c);
        if (train->parsed()) summary = cmd_train_q(c);
        if (plan->parsed()) summary = cmd_plan(c);
        if (prompts->parsed()) summary = cmd_prompts(c);
        std::cout << summary.dump(2) << '\n';
        return 0;
    } catch (const UnknownPolicy& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const InvalidConfig& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
