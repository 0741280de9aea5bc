#include "blicket/harness.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>

#include "blicket/digest.hpp"
#include "blicket/prompt.hpp"
#include "blicket/rollout.hpp"

namespace blicket {

namespace {

void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("failed writing " + path.string());
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

Belief prior_belief(const EnvConfig& env) {
    return Belief::from_prior(std::make_shared<const HypothesisSpace>(env.space), env.sampler, env.prior);
}

nlohmann::json q_to_json(const RunConfig& c) {
    return {{"epsilon", c.q.epsilon},
            {"learning_rate", c.q.learning_rate},
            {"discount", c.q.discount},
            {"convergence_window", c.q.convergence_window},
            {"max_episodes", c.q_max_episodes}};
}

}  // namespace

void RunConfig::validate() const {
    env.validate();
    q.validate();
    if (episodes < 1) throw InvalidConfig("episodes must be >= 1");
    if (q_max_episodes < 0) throw InvalidConfig("q max_episodes must be >= 0");
    for (const auto& s : conditions) prompt::Condition::from_slug(s);
    if (endpoint) endpoint->validate();
}

nlohmann::json run_config_to_json(const RunConfig& c) {
    nlohmann::json j{{"env", c.env},     {"policy", c.policy},   {"episodes", c.episodes},
                     {"seed", c.seed},   {"q", q_to_json(c)},    {"conditions", c.conditions}};
    if (c.q_table) j["q_table"] = c.q_table->string();
    if (c.endpoint) j["endpoint"] = prompt::endpoint_to_json(*c.endpoint);
    return j;
}

RunConfig run_config_from_json(const nlohmann::json& j) {
    RunConfig c;
    try {
        if (j.contains("env")) c.env = env_config_from_json(j.at("env"));
        c.policy = j.value("policy", c.policy);
        c.episodes = j.value("episodes", c.episodes);
        c.seed = j.value("seed", c.seed);
        if (j.contains("out")) c.out = j.at("out").get<std::string>();
        if (j.contains("q_table")) c.q_table = j.at("q_table").get<std::string>();
        if (j.contains("q")) {
            const auto& q = j.at("q");
            c.q.epsilon = q.value("epsilon", c.q.epsilon);
            c.q.learning_rate = q.value("learning_rate", c.q.learning_rate);
            c.q.discount = q.value("discount", c.q.discount);
            c.q.convergence_window = q.value("convergence_window", c.q.convergence_window);
            c.q_max_episodes = q.value("max_episodes", c.q_max_episodes);
        }
        c.conditions = j.value("conditions", c.conditions);
        if (j.contains("endpoint")) c.endpoint = prompt::endpoint_from_json(j.at("endpoint"));
    } catch (const nlohmann::json::exception& e) {
        throw InvalidConfig(std::string("malformed run config: ") + e.what());
    }
    c.validate();
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    try {
        return run_config_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidConfig(path.string() + ": " + e.what());
    }
}

std::string run_config_digest(const RunConfig& c) { return json_digest(run_config_to_json(c)); }

const std::vector<std::string>& policy_names() {
    static const std::vector<std::string> names{"random", "random-k", "q", "bayes-greedy", "bayes-minstep"};
    return names;
}

std::unique_ptr<AgentPolicy> make_policy(const RunConfig& c) {
    const int n = c.env.n_objects();
    if (c.policy == "random") return std::make_unique<RandomPolicy>(n);
    if (c.policy == "random-k") return std::make_unique<RandomPolicy>(n, c.env.forced_explore_k);
    if (c.policy == "bayes-greedy") return std::make_unique<BayesAgent>(prior_belief(c.env), BayesExploration::Greedy);
    if (c.policy == "bayes-minstep") return std::make_unique<BayesAgent>(prior_belief(c.env), BayesExploration::MinStep);
    if (c.policy == "q") {
        if (!c.q_table) throw InvalidConfig("policy q needs a q_table path");
        auto table = std::make_shared<const QTable>(QTable::load(*c.q_table));
        if (table->n_objects() != n) throw InvalidConfig("Q-table object count does not match the env");
        return std::make_unique<QPolicy>(std::move(table), 0.0);
    }
    throw UnknownPolicy("unknown policy '" + c.policy + "'");
}

nlohmann::json cmd_run(const RunConfig& c) {
    c.validate();
    const auto policy = make_policy(c);
    const std::string digest = run_config_digest(c);
    const auto report = evaluate(*policy, {{family_name(c.env.space.family()), c.env}}, c.episodes, c.seed);

    ensure_dir(c.out);
    std::ofstream csv(c.out / "metrics.csv");
    if (!csv) throw IoError("cannot write " + (c.out / "metrics.csv").string());
    write_metrics_csv(csv, report);
    csv.close();

    std::vector<Trajectory> trajs;
    trajs.reserve(report.episodes.size());
    for (const auto& e : report.episodes) trajs.push_back(e.trajectory);
    const auto manifest = export_dataset(trajs, c.out);

    nlohmann::json summary{{"run_digest", digest},
                           {"policy", policy->name()},
                           {"mean_reward", report.pooled.mean_reward},
                           {"std_reward", report.pooled.std_reward},
                           {"fca", report.pooled.fca},
                           {"n_episodes", report.pooled.n_episodes},
                           {"manifest", manifest_to_json(manifest)}};
    write_json(c.out / "run.json", {{"run_digest", digest}, {"config", run_config_to_json(c)}, {"summary", summary}});
    return summary;
}

nlohmann::json cmd_train_q(const RunConfig& c) {
    c.validate();
    QHyperparams hp = c.q;
    hp.seed = c.seed;
    const auto res = train_q(c.env, hp, c.q_max_episodes);
    const std::string digest = run_config_digest(c);

    // Greedy check on every hypothesis the sampler can draw.
    nlohmann::json greedy = nlohmann::json::object();
    QPolicy policy(std::make_shared<const QTable>(res.table), 0.0);
    for (std::size_t i = 0; i < c.env.sampler.size(); ++i) {
        if (c.env.prior[i] <= 0.0) continue;
        EnvConfig fixed = c.env;
        fixed.sampler = {c.env.sampler[i]};
        fixed.prior = {1.0};
        greedy[c.env.sampler[i].to_string()] = run_episode(fixed, policy, c.seed, "greedy").total_reward;
    }

    ensure_dir(c.out);
    res.table.save(c.out / "qtable.json");
    nlohmann::json summary{{"run_digest", digest},
                           {"stats", stats_to_json(res.stats)},
                           {"n_states", res.table.n_states()},
                           {"greedy_rewards", greedy}};
    write_json(c.out / "q_stats.json", summary);
    return summary;
}

nlohmann::json cmd_plan(const RunConfig& c) {
    c.validate();
    const Belief prior = prior_belief(c.env);
    const auto best = min_expected_steps(prior);
    const auto greedy = greedy_plan(prior);
    const std::string digest = run_config_digest(c);

    ensure_dir(c.out);
    write_text(c.out / "plan.txt", best.tree.to_text(c.env.space));
    write_text(c.out / "plan_greedy.txt", greedy.tree.to_text(c.env.space));
    nlohmann::json summary{{"run_digest", digest},
                           {"value", best.value},
                           {"greedy_value", greedy.value},
                           {"leaves", best.tree.leaf_count()},
                           {"depth", best.tree.depth()}};
    nlohmann::json doc = summary;
    doc["tree"] = best.tree.to_json(c.env.space);
    doc["greedy_tree"] = greedy.tree.to_json(c.env.space);
    write_json(c.out / "plan.json", doc);
    return summary;
}

nlohmann::json cmd_prompts(const RunConfig& c) {
    c.validate();
    using namespace prompt;
    std::vector<Condition> conds;
    if (c.conditions.empty())
        conds = all_conditions();
    else
        for (const auto& s : c.conditions) conds.push_back(Condition::from_slug(s));
    if (c.endpoint) {
        const char* key = std::getenv("LLM_API_KEY");
        if (key == nullptr || *key == '\0') throw InvalidConfig("online prompt runs need LLM_API_KEY");
    }
    const std::string digest = run_config_digest(c);

    ensure_dir(c.out / "prompts");
    std::string log;
    nlohmann::json rows = nlohmann::json::array();
    auto record = [&](const Condition& cond, const PromptDoc& doc, const std::string& source, const std::string& reply,
                      const nlohmann::json& decoding) {
        const auto parsed = parse_answer(reply);
        const auto score = score_answer(parsed, doc);
        nlohmann::json line{{"run_digest", digest},
                            {"condition", cond.slug()},
                            {"source", source},
                            {"prompt_digest", sha256_hex(doc.text)},
                            {"reply", reply},
                            {"parsed", parsed_to_json(parsed)},
                            {"score", score_to_json(score)}};
        if (!decoding.is_null()) line["decoding"] = decoding;
        log += line.dump() + "\n";
        rows.push_back({{"condition", cond.slug()}, {"source", source}, {"score", score_to_json(score)}});
    };

    for (const auto& cond : conds) {
        const auto doc = render_prompt(cond);
        write_text(c.out / "prompts" / (cond.slug() + ".txt"), doc.text);
        if (c.endpoint) {
            const auto reply = llm_query(*c.endpoint, doc.text);
            record(cond, doc, c.endpoint->model_name, reply,
                   {{"temperature", c.endpoint->temperature}, {"max_tokens", c.endpoint->max_tokens}});
        } else {
            for (Model m : {Model::Gpt3, Model::Palm})
                if (auto reply = recorded_reply(m, cond)) record(cond, doc, model_name(m), *reply, nullptr);
        }
    }
    write_text(c.out / "prompt_runs.jsonl", log);
    return {{"run_digest", digest}, {"rows", rows}};
}

}  // namespace blicket
