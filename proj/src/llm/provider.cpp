#include "blackjack/provider.hpp"

#include <cstdlib>
#include <fstream>

namespace blackjack {

std::string_view providerKindName(ProviderKind kind) {
  switch (kind) {
  case ProviderKind::Live: return "live";
  case ProviderKind::Mock: return "mock";
  case ProviderKind::FallbackOnly: return "fallback-only";
  }
  return "?";
}

ProviderKind parseProviderKind(std::string_view text) {
  if (text == "live") return ProviderKind::Live;
  if (text == "mock") return ProviderKind::Mock;
  if (text == "fallback-only") return ProviderKind::FallbackOnly;
  throw ConfigError("llm must be live, mock or fallback-only");
}

nlohmann::json ChatRequest::toJson() const {
  return {{"model", model},
          {"messages", {{{"role", "system"}, {"content", system}}, {{"role", "user"}, {"content", user}}}},
          {"temperature", temperature},
          {"top_p", topP}};
}

MockProvider MockProvider::fromJson(const nlohmann::json &script) {
  if (!script.is_array()) throw ConfigError("mock script must be a JSON array");
  std::vector<std::optional<std::string>> out;
  for (const auto &item : script) {
    if (item.is_null()) {
      out.emplace_back(std::nullopt);
    } else if (item.is_string()) {
      out.emplace_back(item.get<std::string>());
    } else {
      out.emplace_back(item.dump());
    }
  }
  return MockProvider(std::move(out));
}

MockProvider MockProvider::fromFile(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read mock script " + path.string());
  try {
    return fromJson(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error &e) {
    throw ConfigError("mock script " + path.string() + " is not JSON: " + e.what());
  }
}

std::string MockProvider::complete(const ChatRequest &request) {
  requests_.push_back(request);
  if (next_ >= script_.size()) throw ScriptExhausted();
  const auto &item = script_[next_++];
  if (!item) throw TransportError("scripted transport failure");
  return *item;
}

LiveProvider::LiveProvider(LlmConfig cfg, std::shared_ptr<Transport> transport)
    : cfg_(std::move(cfg)), transport_(std::move(transport)) {
  if (cfg_.apiKey.empty()) throw ConfigError(std::string("live LLM provider needs ") + kApiKeyVariable);
  if (!transport_) throw ConfigError("live LLM provider needs a transport");
}

std::string LiveProvider::complete(const ChatRequest &request) {
  const std::string body = request.toJson().dump();
  const std::string raw = transport_->post(
      cfg_.endpoint, {{"Authorization", "Bearer " + cfg_.apiKey}, {"Content-Type", "application/json"}}, body,
      cfg_.timeout);
  try {
    const auto j = nlohmann::json::parse(raw);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception &e) {
    throw TransportError(std::string("unexpected completion envelope: ") + e.what());
  }
}

LlmConfig withEnvironment(LlmConfig cfg) {
  if (cfg.apiKey.empty()) {
    if (const char *key = std::getenv(kApiKeyVariable)) cfg.apiKey = key;
  }
  if (const char *url = std::getenv(kEndpointVariable)) cfg.endpoint = url;
  return cfg;
}

std::unique_ptr<Provider> makeProvider(const LlmConfig &cfg, std::shared_ptr<Transport> transport,
                                       const std::filesystem::path &mockScript) {
  switch (cfg.provider) {
  case ProviderKind::Live: return std::make_unique<LiveProvider>(cfg, std::move(transport));
  case ProviderKind::Mock:
    if (mockScript.empty()) throw ConfigError("mock LLM provider needs a script");
    return std::make_unique<MockProvider>(MockProvider::fromFile(mockScript));
  case ProviderKind::FallbackOnly: return nullptr;
  }
  return nullptr;
}

} // namespace blackjack
