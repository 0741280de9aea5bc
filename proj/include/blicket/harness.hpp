#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "blicket/agents.hpp"
#include "blicket/belief.hpp"
#include "blicket/env.hpp"
#include "blicket/errors.hpp"
#include "blicket/llm_client.hpp"
#include "blicket/qlearning.hpp"
#include "blicket/trajectory.hpp"

namespace httplib {
class Server;
}

namespace blicket {

// Raised for policy names outside the supported set; the CLI maps it to exit code 2.
class UnknownPolicy : public InvalidConfig {
public:
    using InvalidConfig::InvalidConfig;
};

struct RunConfig {
    EnvConfig env = EnvConfig::uniform(enumerate_space(3, Family::Default));
    std::string policy = "random";
    int episodes = 100;
    std::uint64_t seed = 0;
    std::filesystem::path out = "out";
    std::optional<std::filesystem::path> q_table;  // policy "q"
    QHyperparams q;
    int q_max_episodes = 20000;
    std::vector<std::string> conditions;  // prompt slugs; empty means all
    std::optional<prompt::EndpointConfig> endpoint;

    void validate() const;
};

// The output directory is not part of the canonical form, so moving a run
// elsewhere keeps its digest.
nlohmann::json run_config_to_json(const RunConfig& c);
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);
std::string run_config_digest(const RunConfig& c);

const std::vector<std::string>& policy_names();
// Throws UnknownPolicy.
std::unique_ptr<AgentPolicy> make_policy(const RunConfig& c);

// Each command writes into c.out and returns a short JSON summary.
nlohmann::json cmd_run(const RunConfig& c);
nlohmann::json cmd_train_q(const RunConfig& c);
nlohmann::json cmd_plan(const RunConfig& c);
// Offline (no endpoint) scores the recorded replies; online queries the endpoint.
nlohmann::json cmd_prompts(const RunConfig& c);

nlohmann::json observation_to_json(const Observation& o, int n_objects);

std::map<std::string, EnvConfig> session_presets();

struct ApiReply {
    int status = 200;
    nlohmann::json body;
};

// Session bookkeeping behind the HTTP API. Thread-safe.
class SessionService {
public:
    // Completed episodes are appended to `store` (JSON-lines); empty disables it.
    explicit SessionService(std::filesystem::path store = {});

    ApiReply create(const nlohmann::json& request);
    ApiReply get(const std::string& id) const;
    ApiReply act(const std::string& id, const nlohmann::json& request);
    ApiReply transcript(const std::string& id) const;
    ApiReply presets() const;

    std::size_t session_count() const;

private:
    struct Session;

    std::shared_ptr<Session> find(const std::string& id) const;
    void append_to_store(const Trajectory& t);

    std::filesystem::path store_;
    mutable std::mutex sessions_mu_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::mutex store_mu_;
};

void register_routes(httplib::Server& server, SessionService& service);

// Blocks until the server stops. Throws IoError if the port cannot be bound.
void serve(const std::string& host, int port, const std::filesystem::path& store);

}  // namespace blicket
