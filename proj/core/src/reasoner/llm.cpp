#include "agentran/reasoner/llm.hpp"

#include <cstdlib>
#include <regex>

#include <httplib.h>

namespace agentran::reasoner {

void to_json(Json& j, const EndpointConfig& c) {
  j = Json{{"url", c.url},           {"model", c.model},         {"max_tokens", c.max_tokens},
           {"temperature", c.temperature}, {"auth_env", c.auth_env}, {"timeout_s", c.timeout_s},
           {"max_reprompts", c.max_reprompts}};
}

void from_json(const Json& j, EndpointConfig& c) {
  c = EndpointConfig{};
  c.url = j.value("url", c.url);
  c.model = j.value("model", c.model);
  c.max_tokens = j.value("max_tokens", c.max_tokens);
  c.temperature = j.value("temperature", c.temperature);
  c.auth_env = j.value("auth_env", c.auth_env);
  c.timeout_s = j.value("timeout_s", c.timeout_s);
  c.max_reprompts = j.value("max_reprompts", c.max_reprompts);
}

Json build_chat_request(const EndpointConfig& cfg, const std::vector<ChatMessage>& messages) {
  Json msgs = Json::array();
  for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
  return Json{{"model", cfg.model}, {"messages", msgs}, {"max_tokens", cfg.max_tokens}, {"temperature", cfg.temperature}};
}

std::optional<std::string> extract_fenced_json(const std::string& content) {
  static const std::regex fence(R"(```json[ \t]*\r?\n([\s\S]*?)```)");
  auto begin = std::sregex_iterator(content.begin(), content.end(), fence);
  auto end = std::sregex_iterator();
  if (std::distance(begin, end) != 1) return std::nullopt;
  return (*begin)[1].str();
}

namespace {

LlmReasoner::PostFn http_post(const EndpointConfig& cfg) {
  static const std::regex url_re(R"(^(https?)://([^/:]+)(?::(\d+))?(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(cfg.url, m, url_re)) throw std::invalid_argument("endpoint url is not http(s): " + cfg.url);
  const std::string scheme = m[1].str();
  const std::string host = m[2].str();
  const int port = m[3].matched ? std::stoi(m[3].str()) : (scheme == "https" ? 443 : 80);
  const std::string path = m[4].matched ? m[4].str() : "/";
  const std::string base = scheme + "://" + host + ":" + std::to_string(port);
  const double timeout = cfg.timeout_s;
  const std::string auth_env = cfg.auth_env;
  return [base, path, timeout, auth_env](const std::string& body) {
    httplib::Client cli(base);
    const auto secs = static_cast<time_t>(timeout);
    const auto usecs = static_cast<time_t>((timeout - static_cast<double>(secs)) * 1e6);
    cli.set_connection_timeout(secs, usecs);
    cli.set_read_timeout(secs, usecs);
    httplib::Headers headers;
    if (const char* key = auth_env.empty() ? nullptr : std::getenv(auth_env.c_str()); key && *key)
      headers.emplace("Authorization", std::string("Bearer ") + key);
    auto res = cli.Post(path, headers, body, "application/json");
    if (!res) throw ReasonerError("chat endpoint unreachable: " + httplib::to_string(res.error()));
    if (res->status != 200) throw ReasonerError("chat endpoint returned HTTP " + std::to_string(res->status));
    return res->body;
  };
}

}  // namespace

LlmReasoner::LlmReasoner(EndpointConfig cfg) : cfg_(std::move(cfg)), post_(http_post(cfg_)) {}

LlmReasoner::LlmReasoner(EndpointConfig cfg, PostFn post) : cfg_(std::move(cfg)), post_(std::move(post)) {
  if (!post_) throw std::invalid_argument("LlmReasoner needs a transport");
}

ReasonerOutput LlmReasoner::decide(const PromptContext& prompt, const ReasonerRequest& request) {
  std::vector<ChatMessage> messages{
      {"system", prompt.system_text() + "\n" + output_schema_text(request.expected)},
      {"user", prompt.user_text()},
  };
  std::string last_problem;
  for (int attempt = 0; attempt <= cfg_.max_reprompts; ++attempt) {
    std::string body;
    try {
      body = post_(build_chat_request(cfg_, messages).dump());
    } catch (const ReasonerError&) {
      throw;
    } catch (const std::exception& e) {
      throw ReasonerError(std::string("chat endpoint failed: ") + e.what());
    }
    std::string content;
    try {
      content = Json::parse(body).at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const std::exception& e) {
      throw ReasonerError(std::string("malformed chat completion: ") + e.what());
    }
    try {
      const auto block = extract_fenced_json(content);
      if (!block) throw ValidationError("output", "expected exactly one ```json fenced block");
      Json raw;
      try {
        raw = Json::parse(*block);
      } catch (const Json::exception& e) {
        throw ValidationError("output", std::string("fenced block is not JSON: ") + e.what());
      }
      ReasonerOutput out = validate_output(raw, request.expected);
      out.retries = attempt;
      out.backend = name();
      return out;
    } catch (const ValidationError& e) {
      last_problem = e.what();
      messages.push_back({"assistant", content});
      messages.push_back({"user", "Your reply did not match the required schema (" + last_problem + "). " +
                                      output_schema_text(request.expected)});
    }
  }
  throw ReasonerError("no valid output after " + std::to_string(cfg_.max_reprompts + 1) +
                      " attempts: " + last_problem);
}

}  // namespace agentran::reasoner
