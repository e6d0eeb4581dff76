#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "blackjack/provider.hpp"

namespace blackjack {

std::string HttpTransport::post(const std::string &url, const std::map<std::string, std::string> &headers,
                                const std::string &body, std::chrono::seconds timeout) {
  const size_t scheme = url.find("://");
  if (scheme == std::string::npos) throw TransportError("endpoint must include a scheme: " + url);
  const size_t pathStart = url.find('/', scheme + 3);
  const std::string origin = url.substr(0, pathStart);
  const std::string path = pathStart == std::string::npos ? "/" : url.substr(pathStart);

  httplib::Client client(origin);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  httplib::Headers h;
  std::string contentType = "application/json";
  for (const auto &[k, v] : headers) {
    if (k == "Content-Type") {
      contentType = v;
    } else {
      h.emplace(k, v);
    }
  }
  auto res = client.Post(path, h, body, contentType);
  if (!res) throw TransportError("request to " + origin + " failed: " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300)
    throw TransportError("HTTP " + std::to_string(res->status) + " from " + origin);
  return res->body;
}

} // namespace blackjack
