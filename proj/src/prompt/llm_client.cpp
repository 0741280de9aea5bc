#include "blicket/llm_client.hpp"

#include <chrono>
#include <cstdlib>
#include <regex>
#include <thread>

#include <httplib.h>

#include "blicket/errors.hpp"

namespace blicket::prompt {

namespace {

struct Url {
    std::string origin;  // scheme://host[:port]
    std::string prefix;  // path without trailing slash
};

Url split_url(const std::string& base) {
    static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(base, m, re)) throw InvalidConfig("endpoint base_url must be http(s)://host[:port][/path]");
    std::string prefix = m[2].matched ? m[2].str() : "";
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {m[1].str(), prefix};
}

bool retryable(int status) { return status == 408 || status == 429 || status >= 500; }

}  // namespace

void EndpointConfig::validate() const {
    split_url(base_url);
    if (model_name.empty()) throw InvalidConfig("endpoint model_name is empty");
    if (!(temperature >= 0.0 && temperature <= 2.0)) throw InvalidConfig("temperature must be in [0, 2]");
    if (max_tokens < 1) throw InvalidConfig("max_tokens must be >= 1");
    if (retries < 0) throw InvalidConfig("retries must be >= 0");
    if (!(timeout_seconds > 0.0)) throw InvalidConfig("timeout must be positive");
}

EndpointConfig EndpointConfig::gpt_style() { return {}; }

EndpointConfig EndpointConfig::greedy() {
    EndpointConfig c;
    c.temperature = 0.0;
    return c;
}

nlohmann::json endpoint_to_json(const EndpointConfig& c) {
    return {{"base_url", c.base_url},
            {"model_name", c.model_name},
            {"temperature", c.temperature},
            {"max_tokens", c.max_tokens},
            {"retries", c.retries},
            {"timeout_seconds", c.timeout_seconds}};
}

EndpointConfig endpoint_from_json(const nlohmann::json& j) {
    EndpointConfig c;
    try {
        c.base_url = j.value("base_url", c.base_url);
        c.model_name = j.value("model_name", c.model_name);
        c.temperature = j.value("temperature", c.temperature);
        c.max_tokens = j.value("max_tokens", c.max_tokens);
        c.retries = j.value("retries", c.retries);
        c.timeout_seconds = j.value("timeout_seconds", c.timeout_seconds);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidConfig(std::string("malformed endpoint config: ") + e.what());
    }
    c.validate();
    return c;
}

std::string llm_query(const EndpointConfig& cfg, const std::string& prompt) {
    cfg.validate();
    const char* key = std::getenv("LLM_API_KEY");
    if (key == nullptr || *key == '\0') throw InvalidConfig("LLM_API_KEY is not set");

    const Url url = split_url(cfg.base_url);
    httplib::Client cli(url.origin);
    const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::duration<double>(cfg.timeout_seconds));
    cli.set_connection_timeout(timeout);
    cli.set_read_timeout(timeout);
    cli.set_write_timeout(timeout);
    cli.set_bearer_token_auth(key);

    const nlohmann::json body = {{"model", cfg.model_name},
                                 {"prompt", prompt},
                                 {"temperature", cfg.temperature},
                                 {"max_tokens", cfg.max_tokens}};
    const std::string payload = body.dump();

    std::string last_error = "no attempt made";
    for (int attempt = 0; attempt <= cfg.retries; ++attempt) {
        if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(100 << (attempt - 1)));
        auto res = cli.Post(url.prefix + "/v1/completions", payload, "application/json");
        if (!res) {
            last_error = httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            last_error = "HTTP " + std::to_string(res->status);
            if (retryable(res->status)) continue;
            throw TransportError(last_error + " from " + cfg.base_url);
        }
        std::string text;
        try {
            text = nlohmann::json::parse(res->body).at("choices").at(0).at("text").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw TransportError(std::string("malformed completion response: ") + e.what());
        }
        if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw EmptyReply();
        return text;
    }
    throw TransportError(last_error + " after " + std::to_string(cfg.retries + 1) + " attempts to " + cfg.base_url);
}

}  // namespace blicket::prompt
