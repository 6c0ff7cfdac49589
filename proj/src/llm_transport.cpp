#include "shopsim/llm_transport.hpp"

#include <cstdlib>
#include <sstream>

#include <httplib.h>

namespace shopsim {

HttpLlmConfig HttpLlmConfig::from_env() {
  HttpLlmConfig cfg;
  if (const char* v = std::getenv("LLM_API_URL")) cfg.url = v;
  if (const char* v = std::getenv("LLM_API_KEY")) cfg.api_key = v;
  if (const char* v = std::getenv("LLM_MODEL")) cfg.model = v;
  if (const char* v = std::getenv("LLM_RESPONSE_PATH")) cfg.response_path = v;
  if (const char* v = std::getenv("LLM_TIMEOUT_S")) cfg.timeout_s = std::atof(v);
  return cfg;
}

HttpLlmTransport::HttpLlmTransport(HttpLlmConfig config) : config_(std::move(config)) {
  if (config_.url.empty()) {
    throw TransportError("LLM_API_URL is not configured");
  }
}

namespace {

// Splits a URL into "scheme://host[:port]" and the request path.
std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw TransportError("malformed LLM URL: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

std::string HttpLlmTransport::complete(const std::string& system_prompt,
                                       const std::string& user_prompt) {
  const auto [base, path] = split_url(config_.url);
  httplib::Client client(base);
  client.set_connection_timeout(static_cast<time_t>(config_.timeout_s), 0);
  client.set_read_timeout(static_cast<time_t>(config_.timeout_s), 0);
  client.set_write_timeout(static_cast<time_t>(config_.timeout_s), 0);

  nlohmann::json body;
  body["model"] = config_.model;
  body["messages"] = nlohmann::json::array(
      {{{"role", "system"}, {"content", system_prompt}},
       {{"role", "user"}, {"content", user_prompt}}});

  httplib::Headers headers;
  if (!config_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + config_.api_key);
  }
  auto res = client.Post(path, headers, body.dump(), "application/json");
  if (!res) {
    throw TransportError("LLM endpoint unreachable: " + config_.url);
  }
  if (res->status != 200) {
    throw TransportError("LLM endpoint returned HTTP " + std::to_string(res->status));
  }
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::parse_error& e) {
    throw TransportError(std::string("LLM response is not JSON: ") + e.what());
  }
  return extract_json_path(parsed, config_.response_path);
}

std::string extract_json_path(const nlohmann::json& j, const std::string& path) {
  const nlohmann::json* cur = &j;
  std::stringstream ss(path);
  std::string part;
  while (std::getline(ss, part, '.')) {
    if (part.empty()) continue;
    if (!part.empty() && part.find_first_not_of("0123456789") == std::string::npos) {
      const std::size_t idx = std::stoul(part);
      if (!cur->is_array() || idx >= cur->size()) {
        throw TransportError("LLM response path '" + path + "' missing index " + part);
      }
      cur = &(*cur)[idx];
    } else {
      if (!cur->is_object() || !cur->contains(part)) {
        throw TransportError("LLM response path '" + path + "' missing field " + part);
      }
      cur = &(*cur)[part];
    }
  }
  if (!cur->is_string()) {
    throw TransportError("LLM response path '" + path + "' is not a string");
  }
  return cur->get<std::string>();
}

std::string extract_first_json_object(const std::string& text) {
  const auto start = text.find('{');
  if (start == std::string::npos) {
    throw FormatError("no JSON object found in text");
  }
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = start; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      --depth;
      if (depth == 0) return text.substr(start, i - start + 1);
    }
  }
  throw FormatError("unbalanced JSON object in text");
}

}  // namespace shopsim
