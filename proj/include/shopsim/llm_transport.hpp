#pragma once

#include <string>

#include <json.hpp>

#include "shopsim/errors.hpp"

namespace shopsim {

// Chat-completion style endpoint. Implementations throw TransportError on
// connection trouble or unusable responses.
class LlmTransport {
 public:
  virtual ~LlmTransport() = default;
  virtual std::string complete(const std::string& system_prompt,
                               const std::string& user_prompt) = 0;
};

struct HttpLlmConfig {
  std::string url;      // full endpoint URL, e.g. http://host:8000/v1/chat/completions
  std::string api_key;  // optional bearer token
  std::string model;
  std::string response_path = "choices.0.message.content";
  double timeout_s = 30.0;

  // Reads LLM_API_URL, LLM_API_KEY, LLM_MODEL (and optional
  // LLM_RESPONSE_PATH, LLM_TIMEOUT_S) from the environment.
  static HttpLlmConfig from_env();
};

class HttpLlmTransport : public LlmTransport {
 public:
  explicit HttpLlmTransport(HttpLlmConfig config);
  std::string complete(const std::string& system_prompt,
                       const std::string& user_prompt) override;

 private:
  HttpLlmConfig config_;
};

// Walks a dotted path ("choices.0.message.content") through a JSON document.
// Throws TransportError when the path does not resolve to a string.
std::string extract_json_path(const nlohmann::json& j, const std::string& path);

// First balanced {...} block inside free-form text; throws FormatError.
std::string extract_first_json_object(const std::string& text);

}  // namespace shopsim
