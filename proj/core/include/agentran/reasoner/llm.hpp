#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "agentran/reasoner/reasoner.hpp"

namespace agentran::reasoner {

struct EndpointConfig {
  std::string url = "http://127.0.0.1:8000/v1/chat/completions";
  std::string model = "gpt-4o-mini";
  int max_tokens = 1024;
  double temperature = 0.0;
  std::string auth_env = "AGENTRAN_LLM_API_KEY";  // sent as "Authorization: Bearer <value>" when set
  double timeout_s = 30.0;
  int max_reprompts = 2;

  friend bool operator==(const EndpointConfig&, const EndpointConfig&) = default;
};

void to_json(Json& j, const EndpointConfig& c);
void from_json(const Json& j, EndpointConfig& c);

struct ChatMessage {
  std::string role;  // "system", "user", "assistant"
  std::string content;
};

// {"model", "messages": [{"role", "content"}], "max_tokens", "temperature"}
Json build_chat_request(const EndpointConfig& cfg, const std::vector<ChatMessage>& messages);

// The body of the single ```json fenced block; nullopt when there is none or
// more than one.
std::optional<std::string> extract_fenced_json(const std::string& content);

// Chat-completion backend. A reply that fails to parse or validate is answered
// with a schema reminder, at most max_reprompts times.
class LlmReasoner final : public Reasoner {
 public:
  // Posts a serialized request, returns the response body; throws on transport errors.
  using PostFn = std::function<std::string(const std::string& body)>;

  explicit LlmReasoner(EndpointConfig cfg);
  LlmReasoner(EndpointConfig cfg, PostFn post);

  std::string name() const override { return "llm"; }
  ReasonerOutput decide(const PromptContext& prompt, const ReasonerRequest& request) override;
  const EndpointConfig& config() const { return cfg_; }

 private:
  EndpointConfig cfg_;
  PostFn post_;
};

}  // namespace agentran::reasoner
