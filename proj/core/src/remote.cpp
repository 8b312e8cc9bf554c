#include <httplib.h>

#include "czsum/backends.hpp"

namespace czsum {
namespace {

using nlohmann::json;

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

ParsedUrl parse_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint_url lacks a scheme: " + url);
  const auto path_begin = url.find('/', scheme_end + 3);
  if (path_begin == std::string::npos) return {url, "/"};
  return {url.substr(0, path_begin), url.substr(path_begin)};
}

std::string snippet(const std::string& body) {
  constexpr std::size_t kMax = 200;
  return body.size() <= kMax ? body : body.substr(0, kMax) + "...";
}

/// Chat-completion wire protocol: POST {model, messages, temperature,
/// max_tokens}; read choices[0].message.content and usage.
class RemoteChatBackend final : public Backend {
 public:
  RemoteChatBackend(BackendSpec spec, std::string api_key)
      : spec_(std::move(spec)), api_key_(std::move(api_key)), url_(parse_url(spec_.endpoint_url)) {}

  AttemptOutcome attempt(const Request& request) override {
    AttemptOutcome out;
    json body = {{"model", spec_.model_name},
                 {"messages", json::array({{{"role", "user"}, {"content", request.prompt}}})},
                 {"temperature", spec_.temperature},
                 {"max_tokens", spec_.max_output_tokens}};

    httplib::Client client(url_.origin);
    const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(spec_.request_timeout);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    auto res = client.Post(url_.path, headers, body.dump(-1, ' ', false, json::error_handler_t::replace),
                           "application/json");
    if (!res) {
      out.status = AttemptOutcome::Status::Retryable;
      out.detail = "no response: " + httplib::to_string(res.error());
      return out;
    }
    out.http_status = res->status;
    if (res->status == 408 || res->status == 429 || res->status >= 500) {
      out.status = AttemptOutcome::Status::Retryable;
      out.detail = "HTTP " + std::to_string(res->status);
      return out;
    }
    if (res->status < 200 || res->status >= 300) {
      out.status = AttemptOutcome::Status::Rejected;
      out.detail = snippet(res->body);
      return out;
    }

    json doc = json::parse(res->body, nullptr, false);
    const json* content = nullptr;
    if (!doc.is_discarded() && doc.contains("choices") && doc["choices"].is_array() && !doc["choices"].empty()) {
      const auto& choice = doc["choices"][0];
      if (choice.contains("message") && choice["message"].contains("content") &&
          choice["message"]["content"].is_string()) {
        content = &choice["message"]["content"];
      }
    }
    if (content == nullptr) {
      out.status = AttemptOutcome::Status::Rejected;
      out.detail = "malformed completion body: " + snippet(res->body);
      return out;
    }
    out.status = AttemptOutcome::Status::Ok;
    out.completion.text = content->get<std::string>();
    if (doc.contains("usage") && doc["usage"].is_object()) {
      const auto& usage = doc["usage"];
      if (usage.contains("prompt_tokens") && usage["prompt_tokens"].is_number_integer()) {
        out.completion.input_tokens = usage["prompt_tokens"].get<std::int64_t>();
      }
      if (usage.contains("completion_tokens") && usage["completion_tokens"].is_number_integer()) {
        out.completion.output_tokens = usage["completion_tokens"].get<std::int64_t>();
      }
    }
    return out;
  }

 private:
  BackendSpec spec_;
  std::string api_key_;
  ParsedUrl url_;
};

}  // namespace

std::unique_ptr<Backend> make_remote_backend(const BackendSpec& spec, std::string api_key) {
  return std::make_unique<RemoteChatBackend>(spec, std::move(api_key));
}

}  // namespace czsum
