#pragma once

#include <string>

#include <json.hpp>

namespace blicket::prompt {

// OpenAI-style completions endpoint. The API key is read from LLM_API_KEY.
struct EndpointConfig {
    std::string base_url = "https://api.openai.com";
    std::string model_name = "text-davinci-002";
    double temperature = 0.7;
    int max_tokens = 256;
    int retries = 2;  // extra attempts after the first
    double timeout_seconds = 30.0;

    void validate() const;

    // Sampling settings used for the freeform GPT-style runs.
    static EndpointConfig gpt_style();
    // Greedy decoding, as used for the PaLM-style runs.
    static EndpointConfig greedy();
};

nlohmann::json endpoint_to_json(const EndpointConfig& c);
EndpointConfig endpoint_from_json(const nlohmann::json& j);

// POST {base_url}/v1/completions and return choices[0].text. Throws
// InvalidConfig without LLM_API_KEY, TransportError once the retry budget is
// spent, EmptyReply on a blank completion.
std::string llm_query(const EndpointConfig& cfg, const std::string& prompt);

}  // namespace blicket::prompt
