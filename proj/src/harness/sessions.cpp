#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include <httplib.h>

#include "blicket/harness.hpp"
#include "blicket/rng.hpp"

namespace blicket {

namespace {

std::string new_session_id() {
    std::random_device rd;
    std::ostringstream os;
    os << std::hex;
    for (int i = 0; i < 4; ++i) os << std::setw(8) << std::setfill('0') << rd();
    return os.str();
}

std::uint64_t fresh_seed() {
    std::random_device rd;
    return (std::uint64_t{rd()} << 32) | rd();
}

std::string now_iso() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

ApiReply error_reply(int status, const std::string& message) { return {status, {{"error", message}}}; }

Bits parse_bits(const nlohmann::json& j, int width) {
    if (!j.is_array()) throw InvalidInput("bits must be an array");
    if (static_cast<int>(j.size()) != width)
        throw InvalidInput("bits must have " + std::to_string(width) + " entries");
    Bits out;
    for (const auto& b : j) {
        if (b.is_boolean())
            out.push_back(b.get<bool>());
        else if (b.is_number_integer() && (b.get<int>() == 0 || b.get<int>() == 1))
            out.push_back(b.get<int>() == 1);
        else
            throw InvalidInput("bits entries must be booleans or 0/1");
    }
    return out;
}

}  // namespace

struct SessionService::Session {
    Session(EnvConfig config, std::uint64_t seed, bool debug_flag, std::string owner_tag)
        : env(std::move(config)), debug(debug_flag) {
        env.reset(seed);
        transcript.header = make_header(env.config(), env.state().hidden, seed, "", "");
        transcript.header.owner = std::move(owner_tag);
        if (debug)
            posterior = Belief::from_prior(std::make_shared<const HypothesisSpace>(env.config().space),
                                           env.config().sampler, env.config().prior);
        created = updated = now_iso();
    }

    mutable std::mutex mu;
    BlicketEnv env;
    Trajectory transcript;
    std::optional<Belief> posterior;
    Observation last;
    bool debug;
    std::string created;
    std::string updated;
};

nlohmann::json observation_to_json(const Observation& o, int n_objects) {
    std::vector<bool> placed, query;
    for (int i = 0; i < n_objects; ++i) {
        placed.push_back(o.placed.contains(i));
        query.push_back(o.query == i);
    }
    std::vector<int> bits;
    for (bool b : o.bits(n_objects)) bits.push_back(b ? 1 : 0);
    return {{"placed", placed}, {"lit", o.lit}, {"quiz", o.quiz}, {"query", query}, {"bits", bits}};
}

std::map<std::string, EnvConfig> session_presets() {
    const auto def = enumerate_space(3, Family::Default);
    std::map<std::string, EnvConfig> p;
    p.emplace("default", EnvConfig::uniform(def));
    p.emplace("extended", EnvConfig::uniform(enumerate_space(3, Family::Extended)));
    p.emplace("conj-ab", EnvConfig::fixed(def, Hypothesis(Form::Conjunctive, ObjectSet{0, 1})));
    const auto ext = enumerate_space(3, Family::Extended);
    p.emplace("disj-ab", EnvConfig::fixed(ext, Hypothesis(Form::Disjunctive, ObjectSet{0, 1})));
    auto modality = EnvConfig::uniform(def);
    modality.reward_mode = RewardMode::ModalityQuiz;
    p.emplace("modality", modality);
    return p;
}

SessionService::SessionService(std::filesystem::path store) : store_(std::move(store)) {}

std::size_t SessionService::session_count() const {
    std::lock_guard lock(sessions_mu_);
    return sessions_.size();
}

std::shared_ptr<SessionService::Session> SessionService::find(const std::string& id) const {
    std::lock_guard lock(sessions_mu_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
}

namespace {

nlohmann::json debug_fields(const BlicketEnv& env, const std::optional<Belief>& posterior) {
    nlohmann::json post = nlohmann::json::array();
    if (posterior)
        for (std::size_t i = 0; i < posterior->space().size(); ++i)
            post.push_back({{"hypothesis", posterior->space()[i].to_string()}, {"weight", posterior->weight(i)}});
    return {{"hidden", env.state().hidden}, {"posterior", post}};
}

}  // namespace

ApiReply SessionService::create(const nlohmann::json& request) {
    EnvConfig config;
    std::uint64_t seed = 0;
    bool debug = false;
    std::string owner = "human";
    try {
        if (!request.is_object()) throw InvalidInput("request body must be a JSON object");
        if (request.contains("config")) {
            config = env_config_from_json(request.at("config"));
        } else {
            const auto presets = session_presets();
            const std::string name = request.value("preset", std::string("default"));
            auto it = presets.find(name);
            if (it == presets.end()) return error_reply(400, "unknown preset '" + name + "'");
            config = it->second;
        }
        seed = request.contains("seed") ? request.at("seed").get<std::uint64_t>() : fresh_seed();
        debug = request.value("debug", false);
        owner = request.value("owner", owner);
        if (owner != "human" && owner != "agent") throw InvalidInput("owner must be human or agent");
    } catch (const nlohmann::json::exception& e) {
        return error_reply(400, e.what());
    } catch (const Error& e) {
        return error_reply(400, e.what());
    }

    auto session = std::make_shared<Session>(std::move(config), seed, debug, owner);
    std::string id;
    {
        std::lock_guard lock(sessions_mu_);
        do id = new_session_id();
        while (sessions_.count(id));
        session->transcript.header.episode_id = id;
        sessions_.emplace(id, session);
    }
    std::lock_guard lock(session->mu);
    const int n = session->env.n_objects();
    session->last = encode_observation(session->env.state(), session->env.config().reward_mode);
    nlohmann::json body{{"session_id", id},
                        {"observation", observation_to_json(session->last, n)},
                        {"phase", phase_name(session->env.state().phase)},
                        {"step", 0},
                        {"n_objects", n},
                        {"max_steps", session->env.config().max_steps},
                        {"reward_mode", reward_mode_name(session->env.config().reward_mode)}};
    if (debug) body["debug"] = debug_fields(session->env, session->posterior);
    return {201, body};
}

ApiReply SessionService::get(const std::string& id) const {
    auto s = find(id);
    if (!s) return error_reply(404, "unknown session");
    std::lock_guard lock(s->mu);
    const auto& st = s->env.state();
    nlohmann::json body{{"session_id", id},
                        {"phase", phase_name(st.phase)},
                        {"step", st.step},
                        {"observation", observation_to_json(s->last, s->env.n_objects())},
                        {"cumulative_reward", st.accumulated_reward},
                        {"owner", s->transcript.header.owner},
                        {"created", s->created},
                        {"updated", s->updated}};
    if (s->debug) body["debug"] = debug_fields(s->env, s->posterior);
    return {200, body};
}

ApiReply SessionService::act(const std::string& id, const nlohmann::json& request) {
    auto s = find(id);
    if (!s) return error_reply(404, "unknown session");
    std::unique_lock lock(s->mu);
    const int n = s->env.n_objects();
    if (s->env.state().phase == Phase::Done) return error_reply(409, "episode already finished");

    Action action;
    try {
        if (!request.is_object() || !request.contains("bits")) throw InvalidInput("request needs a bits array");
        action = Action(parse_bits(request.at("bits"), n + 1));
    } catch (const Error& e) {
        return error_reply(400, e.what());
    }

    const Phase phase = s->env.state().phase;
    StepResult r;
    try {
        r = s->env.step(action);
    } catch (const EpisodeFinished& e) {
        return error_reply(409, e.what());
    } catch (const Error& e) {
        return error_reply(400, e.what());
    }
    s->last = r.observation;
    s->updated = now_iso();
    s->transcript.steps.push_back({s->env.state().step, phase, action.bits(), r.observation.bits(n), r.reward, r.done});
    if (s->posterior && phase == Phase::Explore) {
        const auto& trial = s->env.state().history.back();
        *s->posterior = update(*s->posterior, trial.placed, trial.lit);
    }

    nlohmann::json body{{"observation", observation_to_json(r.observation, n)},
                        {"reward", r.reward},
                        {"done", r.done},
                        {"cumulative_reward", s->env.state().accumulated_reward},
                        {"phase", phase_name(s->env.state().phase)},
                        {"step", s->env.state().step}};
    if (s->debug) body["debug"] = debug_fields(s->env, s->posterior);
    const Trajectory finished = r.done ? s->transcript : Trajectory{};
    lock.unlock();

    if (r.done) {
        try {
            append_to_store(finished);
        } catch (const IoError& e) {
            body["store_error"] = e.what();
        }
    }
    return {200, body};
}

ApiReply SessionService::transcript(const std::string& id) const {
    auto s = find(id);
    if (!s) return error_reply(404, "unknown session");
    std::lock_guard lock(s->mu);
    nlohmann::json j = trajectory_to_json(s->transcript);
    if (!s->debug) j["header"].erase("hidden_hypothesis");
    return {200, j};
}

ApiReply SessionService::presets() const {
    nlohmann::json body = nlohmann::json::object();
    for (const auto& [name, cfg] : session_presets()) {
        nlohmann::json c = cfg;
        // Fixed presets would otherwise reveal their hidden hypothesis.
        if (cfg.sampler.size() == 1) {
            c.erase("sampler");
            c.erase("prior");
        }
        body[name] = c;
    }
    return {200, body};
}

void SessionService::append_to_store(const Trajectory& t) {
    if (store_.empty()) return;
    std::ostringstream os;
    write_jsonl(os, t);
    const std::string text = os.str();
    std::lock_guard lock(store_mu_);
    if (store_.has_parent_path()) std::filesystem::create_directories(store_.parent_path());
    std::ofstream out(store_, std::ios::app | std::ios::binary);
    if (!out) throw IoError("cannot append to " + store_.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) throw IoError("failed appending to " + store_.string());
}

void register_routes(httplib::Server& server, SessionService& service) {
    auto send = [](httplib::Response& res, const ApiReply& r) {
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    };
    auto parse_body = [](const httplib::Request& req) {
        if (req.body.empty()) return nlohmann::json::object();
        return nlohmann::json::parse(req.body, nullptr, false);
    };

    server.Post("/sessions", [&service, send, parse_body](const httplib::Request& req, httplib::Response& res) {
        const auto body = parse_body(req);
        if (body.is_discarded()) return send(res, error_reply(400, "malformed JSON"));
        send(res, service.create(body));
    });
    server.Get(R"(/sessions/([0-9a-f]+))", [&service, send](const httplib::Request& req, httplib::Response& res) {
        send(res, service.get(req.matches[1]));
    });
    server.Post(R"(/sessions/([0-9a-f]+)/act)",
                [&service, send, parse_body](const httplib::Request& req, httplib::Response& res) {
                    const auto body = parse_body(req);
                    if (body.is_discarded()) return send(res, error_reply(400, "malformed JSON"));
                    send(res, service.act(req.matches[1], body));
                });
    server.Get(R"(/sessions/([0-9a-f]+)/transcript)",
               [&service, send](const httplib::Request& req, httplib::Response& res) {
                   send(res, service.transcript(req.matches[1]));
               });
    server.Get("/presets", [&service, send](const httplib::Request&, httplib::Response& res) {
        send(res, service.presets());
    });
    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (res.body.empty()) res.set_content(nlohmann::json{{"error", "not found"}}.dump(), "application/json");
    });
}

void serve(const std::string& host, int port, const std::filesystem::path& store) {
    SessionService service(store);
    httplib::Server server;
    register_routes(server, service);
    if (!server.bind_to_port(host, port)) throw IoError("cannot bind " + host + ":" + std::to_string(port));
    server.listen_after_bind();
}

}  // namespace blicket
