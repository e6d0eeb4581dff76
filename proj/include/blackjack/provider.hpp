#pragma once

#include <nlohmann/json.hpp>

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace blackjack {

enum class ProviderKind { Live, Mock, FallbackOnly };

std::string_view providerKindName(ProviderKind kind);
ProviderKind parseProviderKind(std::string_view text);

inline constexpr const char *kApiKeyVariable = "BLACKJACK_LLM_API_KEY";
inline constexpr const char *kEndpointVariable = "BLACKJACK_LLM_ENDPOINT";

struct LlmConfig {
  ProviderKind provider = ProviderKind::Mock;
  std::string modelName = "gemini-2.0-flash";
  double temperature = 0.2;
  double topP = 0.9;
  int maxRetries = 3;
  std::chrono::seconds timeout{30};
  /** OpenAI-compatible chat-completions URL. */
  std::string endpoint = "https://generativelanguage.googleapis.com/v1beta/openai/chat/completions";
  std::string apiKey;
};

/** Missing or contradictory configuration. */
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/** Network failure, HTTP error status, or an unusable response envelope. */
class TransportError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/** The mock script has no responses left. */
class ScriptExhausted : public std::runtime_error {
public:
  ScriptExhausted() : std::runtime_error("mock script exhausted") {}
};

struct ChatRequest {
  std::string model;
  std::string system;
  std::string user;
  double temperature = 0.2;
  double topP = 0.9;

  /** Chat-completions wire body. */
  nlohmann::json toJson() const;
};

/** Raw HTTP POST; separated so tests can count or fake network calls. */
class Transport {
public:
  virtual ~Transport() = default;
  virtual std::string post(const std::string &url, const std::map<std::string, std::string> &headers,
                           const std::string &body, std::chrono::seconds timeout) = 0;
};

/** cpp-httplib client with TLS. */
class HttpTransport : public Transport {
public:
  std::string post(const std::string &url, const std::map<std::string, std::string> &headers,
                   const std::string &body, std::chrono::seconds timeout) override;
};

class Provider {
public:
  virtual ~Provider() = default;
  /** Raw completion text. Throws TransportError or ScriptExhausted. */
  virtual std::string complete(const ChatRequest &request) = 0;
};

/** Replays canned responses in order. A null entry simulates a transport failure. */
class MockProvider : public Provider {
public:
  explicit MockProvider(std::vector<std::optional<std::string>> script) : script_(std::move(script)) {}

  /** JSON array; strings are used verbatim, objects and arrays are serialized, null fails. */
  static MockProvider fromJson(const nlohmann::json &script);
  static MockProvider fromFile(const std::filesystem::path &path);

  std::string complete(const ChatRequest &request) override;

  size_t calls() const { return next_; }
  size_t remaining() const { return script_.size() - next_; }
  const std::vector<ChatRequest> &requests() const { return requests_; }

private:
  std::vector<std::optional<std::string>> script_;
  size_t next_ = 0;
  std::vector<ChatRequest> requests_;
};

/** Chat-completions endpoint reached through a Transport. */
class LiveProvider : public Provider {
public:
  LiveProvider(LlmConfig cfg, std::shared_ptr<Transport> transport);
  std::string complete(const ChatRequest &request) override;

private:
  LlmConfig cfg_;
  std::shared_ptr<Transport> transport_;
};

/** Reads the API key and endpoint override from the environment for live use. */
LlmConfig withEnvironment(LlmConfig cfg);

/** Provider for the configuration; null for fallback-only. Only the live
 * provider touches `transport`. Throws ConfigError for live without a key. */
std::unique_ptr<Provider> makeProvider(const LlmConfig &cfg, std::shared_ptr<Transport> transport,
                                       const std::filesystem::path &mockScript = {});

} // namespace blackjack
