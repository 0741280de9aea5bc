#include "blicket/trajectory.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "blicket/errors.hpp"

namespace blicket {

namespace {

std::vector<int> to_ints(const Bits& bits) {
    std::vector<int> out(bits.size());
    std::transform(bits.begin(), bits.end(), out.begin(), [](bool b) { return b ? 1 : 0; });
    return out;
}

Bits from_ints(const nlohmann::json& j) {
    Bits out;
    for (const auto& v : j) out.push_back(v.is_boolean() ? v.get<bool>() : v.get<int>() != 0);
    return out;
}

std::string reward_key(double r) {
    std::ostringstream os;
    os << r;
    return os.str();
}

}  // namespace

double Trajectory::total_reward() const {
    double r = 0.0;
    for (const auto& s : steps) r += s.reward;
    return r;
}

int Trajectory::quiz_entry_step() const {
    for (const auto& s : steps)
        if (s.phase == Phase::Quiz) return s.step - 1;
    return -1;
}

TrajectoryHeader make_header(const EnvConfig& config, const Hypothesis& hidden, std::uint64_t seed,
                             std::string episode_id, std::string policy) {
    return make_header(config, hidden, seed, std::move(episode_id), std::move(policy), config_digest(config));
}

TrajectoryHeader make_header(const EnvConfig& config, const Hypothesis& hidden, std::uint64_t seed,
                             std::string episode_id, std::string policy, std::string digest) {
    TrajectoryHeader h;
    h.episode_id = std::move(episode_id);
    h.hidden = hidden;
    h.config_digest = std::move(digest);
    h.seed = seed;
    h.n_objects = config.n_objects();
    h.max_steps = config.max_steps;
    h.forced_explore_k = config.forced_explore_k;
    h.reward_mode = config.reward_mode;
    h.policy = std::move(policy);
    return h;
}

nlohmann::json header_to_json(const TrajectoryHeader& h) {
    return {{"type", "header"},
            {"episode_id", h.episode_id},
            {"hidden_hypothesis", h.hidden},
            {"config_digest", h.config_digest},
            {"seed", h.seed},
            {"n_objects", h.n_objects},
            {"max_steps", h.max_steps},
            {"forced_explore_k", h.forced_explore_k},
            {"reward_mode", reward_mode_name(h.reward_mode)},
            {"policy", h.policy},
            {"owner", h.owner}};
}

nlohmann::json step_to_json(const std::string& episode_id, const StepRecord& s) {
    return {{"type", "step"},
            {"episode_id", episode_id},
            {"step", s.step},
            {"phase", phase_name(s.phase)},
            {"action_bits", to_ints(s.action_bits)},
            {"observation_bits", to_ints(s.observation_bits)},
            {"reward", s.reward},
            {"done", s.done}};
}

namespace {

TrajectoryHeader header_from_json(const nlohmann::json& j) {
    TrajectoryHeader h;
    h.episode_id = j.at("episode_id").get<std::string>();
    h.hidden = hypothesis_from_json(j.at("hidden_hypothesis"));
    h.config_digest = j.value("config_digest", std::string());
    h.seed = j.value("seed", std::uint64_t{0});
    h.n_objects = j.value("n_objects", 3);
    h.max_steps = j.value("max_steps", 25);
    h.forced_explore_k = j.value("forced_explore_k", 0);
    h.reward_mode = parse_reward_mode(j.value("reward_mode", std::string("blicket")));
    h.policy = j.value("policy", std::string());
    h.owner = j.value("owner", std::string("agent"));
    return h;
}

StepRecord step_from_json(const nlohmann::json& j) {
    StepRecord s;
    s.step = j.at("step").get<int>();
    s.phase = parse_phase(j.at("phase").get<std::string>());
    s.action_bits = from_ints(j.at("action_bits"));
    s.observation_bits = from_ints(j.at("observation_bits"));
    s.reward = j.at("reward").get<double>();
    s.done = j.at("done").get<bool>();
    return s;
}

}  // namespace

nlohmann::json trajectory_to_json(const Trajectory& t) {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : t.steps) steps.push_back(step_to_json(t.header.episode_id, s));
    nlohmann::json j{{"header", header_to_json(t.header)}, {"steps", steps}};
    if (t.error) j["error"] = *t.error;
    return j;
}

Trajectory trajectory_from_json(const nlohmann::json& j) {
    try {
        Trajectory t;
        t.header = header_from_json(j.at("header"));
        for (const auto& s : j.at("steps")) t.steps.push_back(step_from_json(s));
        if (j.contains("error")) t.error = j.at("error").get<std::string>();
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("malformed trajectory: ") + e.what());
    }
}

void write_jsonl(std::ostream& os, const Trajectory& t) {
    nlohmann::json header = header_to_json(t.header);
    if (t.error) header["error"] = *t.error;
    os << header.dump() << '\n';
    for (const auto& s : t.steps) os << step_to_json(t.header.episode_id, s).dump() << '\n';
}

std::vector<Trajectory> read_jsonl(std::istream& is) {
    std::vector<Trajectory> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            const std::string type = j.at("type").get<std::string>();
            if (type == "header") {
                out.emplace_back();
                out.back().header = header_from_json(j);
                if (j.contains("error")) out.back().error = j.at("error").get<std::string>();
            } else if (type == "step") {
                if (out.empty() || j.at("episode_id").get<std::string>() != out.back().header.episode_id)
                    throw InvalidInput("step line without a matching header");
                out.back().steps.push_back(step_from_json(j));
            } else {
                throw InvalidInput("unknown record type: " + type);
            }
        } catch (const nlohmann::json::exception& e) {
            throw InvalidInput("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

ReplayReport replay(const Trajectory& t) {
    const auto& h = t.header;
    EnvConfig cfg = EnvConfig::fixed(HypothesisSpace(h.n_objects, {h.hidden}), h.hidden);
    cfg.max_steps = h.max_steps;
    cfg.forced_explore_k = h.forced_explore_k;
    cfg.reward_mode = h.reward_mode;
    BlicketEnv env(cfg);
    env.reset_with(h.hidden);

    ReplayReport rep;
    auto fail = [&](std::size_t i, std::string what) {
        rep.ok = false;
        rep.first_mismatch = static_cast<int>(i);
        rep.detail = std::move(what);
        return rep;
    };
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
        const auto& rec = t.steps[i];
        if (env.state().phase != rec.phase) return fail(i, "phase differs");
        StepResult r;
        try {
            r = env.step(Action(rec.action_bits));
        } catch (const Error& e) {
            return fail(i, e.what());
        }
        if (env.state().step != rec.step) return fail(i, "step index differs");
        if (r.observation.bits(h.n_objects) != rec.observation_bits) return fail(i, "observation differs");
        if (r.reward != rec.reward) return fail(i, "reward differs");
        if (r.done != rec.done) return fail(i, "done flag differs");
    }
    return rep;
}

nlohmann::json manifest_to_json(const DatasetManifest& m) {
    return {{"count", m.count},
            {"config_digests", m.config_digests},
            {"reward_histogram", m.reward_histogram},
            {"total_steps", m.total_steps},
            {"max_episode_length", m.max_episode_length}};
}

DatasetManifest export_dataset(const std::vector<Trajectory>& trajectories, const std::filesystem::path& dir) {
    if (trajectories.empty()) throw InvalidInput("cannot export an empty dataset");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    std::ofstream out(dir / "trajectories.jsonl");
    if (!out) throw IoError("cannot write " + (dir / "trajectories.jsonl").string());

    DatasetManifest m;
    std::set<std::string> digests;
    for (const auto& t : trajectories) {
        write_jsonl(out, t);
        ++m.count;
        digests.insert(t.header.config_digest);
        ++m.reward_histogram[reward_key(t.total_reward())];
        m.total_steps += t.steps.size();
        m.max_episode_length = std::max(m.max_episode_length, static_cast<int>(t.steps.size()));
    }
    m.config_digests.assign(digests.begin(), digests.end());
    out.close();
    if (!out) throw IoError("failed writing " + (dir / "trajectories.jsonl").string());

    std::ofstream mf(dir / "manifest.json");
    if (!mf) throw IoError("cannot write " + (dir / "manifest.json").string());
    mf << manifest_to_json(m).dump(2) << '\n';
    if (!mf) throw IoError("failed writing manifest");
    return m;
}

std::vector<Trajectory> import_dataset(const std::filesystem::path& dir) {
    std::ifstream in(dir / "trajectories.jsonl");
    if (!in) throw IoError("cannot read " + (dir / "trajectories.jsonl").string());
    return read_jsonl(in);
}

}  // namespace blicket
