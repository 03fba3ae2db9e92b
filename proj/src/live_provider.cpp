#include <httplib.h>

#include "texterial/gateway.hpp"
#include "texterial/state.hpp"

namespace texterial {

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;    // base path without trailing slash
};

Endpoint split_base_url(const std::string& base) {
  const auto scheme_end = base.find("://");
  if (scheme_end == std::string::npos) throw Error(ErrorCode::InvalidArgument, "base url needs a scheme: " + base);
  const auto path_start = base.find('/', scheme_end + 3);
  Endpoint e;
  e.origin = base.substr(0, path_start);
  e.path = path_start == std::string::npos ? "" : base.substr(path_start);
  while (!e.path.empty() && e.path.back() == '/') e.path.pop_back();
  return e;
}

}  // namespace

LiveProvider::LiveProvider(LiveProviderConfig config) : config_(std::move(config)) {
  split_base_url(config_.base_url);
}

std::string LiveProvider::complete(const CompletionRequest& request, std::chrono::milliseconds timeout) {
  const Endpoint endpoint = split_base_url(config_.base_url);
  httplib::Client client(endpoint.origin);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  Json body = {{"model", config_.model}, {"messages", {{{"role", "user"}, {"content", request.prompt}}}}};
  if (config_.temperature) body["temperature"] = *config_.temperature;

  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

  auto result = client.Post(endpoint.path + "/chat/completions", headers, body.dump(), "application/json");
  if (!result) {
    const auto err = result.error();
    if (err == httplib::Error::Read || err == httplib::Error::Write || err == httplib::Error::ConnectionTimeout) {
      throw ProviderFailure(ErrorCode::ProviderTimeout, 0, "provider timed out: " + httplib::to_string(err));
    }
    throw ProviderFailure(ErrorCode::ProviderError, 0, "provider unreachable: " + httplib::to_string(err));
  }
  if (result->status != 200) {
    throw ProviderFailure(ErrorCode::ProviderError, result->status,
                          "provider returned status " + std::to_string(result->status));
  }
  try {
    const Json reply = Json::parse(result->body);
    const Json& content = reply.at("choices").at(0).at("message").at("content");
    if (!content.is_string()) throw Error(ErrorCode::EmptyCompletion, "completion content is not text");
    return content.get<std::string>();
  } catch (const Json::exception& e) {
    throw ProviderFailure(ErrorCode::ProviderError, result->status, std::string("unexpected reply shape: ") + e.what());
  }
}

}  // namespace texterial
