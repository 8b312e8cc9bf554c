#include "czsum/backends.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <thread>

#include "czsum/baselines.hpp"
#include "czsum/hashing.hpp"
#include "czsum/tokenize.hpp"

namespace czsum {
namespace {

using nlohmann::json;

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

struct Placeholder {
  std::size_t begin;
  std::size_t end;
};

std::vector<Placeholder> find_placeholders(std::string_view text) {
  std::vector<Placeholder> out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '{' || i + 1 >= text.size() || !is_ident_start(text[i + 1])) continue;
    std::size_t j = i + 1;
    while (j < text.size() && is_ident_char(text[j])) ++j;
    if (j < text.size() && text[j] == '}') {
      out.push_back({i, j + 1});
      i = j;
    }
  }
  return out;
}

class MockBackend final : public Backend {
 public:
  explicit MockBackend(MockSpec spec) : spec_(std::move(spec)) {}

  AttemptOutcome attempt(const Request& request) override {
    AttemptOutcome out;
    if (spec_.behavior == MockBehavior::Fail ||
        (!spec_.fail_on.empty() && request.source.find(spec_.fail_on) != std::string::npos)) {
      out.status = AttemptOutcome::Status::Failed;
      out.detail = "mock backend failure";
      return out;
    }
    const std::string& source = request.source;
    switch (spec_.behavior) {
      case MockBehavior::Echo:
        out.completion.text = request.kind == RequestKind::Generate ? request.prompt : source;
        break;
      case MockBehavior::Identity:
        out.completion.text = source;
        break;
      case MockBehavior::Tagged:
        if (request.kind == RequestKind::Translate) {
          out.completion.text = (request.direction == Direction::CsToEn ? "[EN]" : "[CS]") + source;
        } else {
          out.completion.text = source;
        }
        break;
      case MockBehavior::Lead:
        out.completion.text = first_baseline(source, spec_.count);
        break;
      case MockBehavior::Truncate: {
        const TokenSequence seq = tokenize_raw(source);
        if (seq.empty() || spec_.count == 0) break;
        const Token& last = seq[std::min(spec_.count, seq.size()) - 1];
        out.completion.text = source.substr(seq[0].offset, last.offset + last.length - seq[0].offset);
        break;
      }
      case MockBehavior::Fail:
        break;
    }
    return out;
  }

 private:
  MockSpec spec_;
};

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string_view behavior_name(MockBehavior b) {
  switch (b) {
    case MockBehavior::Echo: return "echo";
    case MockBehavior::Identity: return "identity";
    case MockBehavior::Tagged: return "tagged";
    case MockBehavior::Lead: return "lead";
    case MockBehavior::Truncate: return "truncate";
    case MockBehavior::Fail: return "fail";
  }
  return "";
}

MockBehavior parse_behavior(const std::string& s) {
  for (auto b : {MockBehavior::Echo, MockBehavior::Identity, MockBehavior::Tagged, MockBehavior::Lead,
                 MockBehavior::Truncate, MockBehavior::Fail}) {
    if (s == behavior_name(b)) return b;
  }
  throw ConfigError("unknown mock behavior \"" + s + "\"");
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("backend field \"") + key + "\" has the wrong type");
  }
}

std::chrono::milliseconds jittered_backoff(std::chrono::milliseconds base, int retry) {
  thread_local std::mt19937_64 rng{std::random_device{}()};
  std::uniform_real_distribution<double> jitter(0.0, 0.5);
  const double scale = static_cast<double>(1ll << std::min(retry, 20)) * (1.0 + jitter(rng));
  return std::chrono::milliseconds(static_cast<std::int64_t>(static_cast<double>(base.count()) * scale));
}

}  // namespace

std::string_view to_string(Language l) noexcept { return l == Language::Cs ? "cs" : "en"; }
std::string_view to_string(Direction d) noexcept { return d == Direction::CsToEn ? "cs_to_en" : "en_to_cs"; }

PromptTemplate PromptTemplate::parse(std::string text, Language language, std::optional<int> max_sentences) {
  const auto found = find_placeholders(text);
  if (found.size() != 1) {
    throw ConfigError("prompt template must contain exactly one {placeholder}, found " +
                      std::to_string(found.size()));
  }
  if (max_sentences && *max_sentences < 1) throw ConfigError("max_sentences must be >= 1");
  PromptTemplate t;
  t.prefix_ = text.substr(0, found[0].begin);
  t.suffix_ = text.substr(found[0].end);
  t.text_ = std::move(text);
  t.language_ = language;
  t.max_sentences_ = max_sentences;
  return t;
}

std::string PromptTemplate::render(std::string_view source) const {
  std::string out;
  out.reserve(prefix_.size() + source.size() + suffix_.size());
  out += prefix_;
  out += source;
  out += suffix_;
  return out;
}

PromptTemplate czech_journalist_prompt() {
  return PromptTemplate::parse(
      "Vytvoř shrnutí následujícího textu ve stylu novináře. Počet vět <= 5;\n\n{text}", Language::Cs, 5);
}

PromptTemplate english_journalist_prompt() {
  return PromptTemplate::parse(
      "Create a summary of the following text in the style of a journalist. Number of sentences <= 5;\n\n{text}",
      Language::En, 5);
}

PromptTemplate default_translation_prompt(Direction direction) {
  if (direction == Direction::CsToEn) {
    return PromptTemplate::parse("Translate this from Czech to English:\nCzech: {text}\nEnglish:", Language::En);
  }
  return PromptTemplate::parse("Translate this from English to Czech:\nEnglish: {text}\nCzech:", Language::Cs);
}

void BackendSpec::validate() const {
  if (id.empty()) throw ConfigError("backend id must not be empty");
  if (kind == BackendKind::RemoteChat) {
    if (endpoint_url.empty()) throw ConfigError("backend \"" + id + "\": remote_chat requires endpoint_url");
    if (model_name.empty()) throw ConfigError("backend \"" + id + "\": remote_chat requires model_name");
  }
  if (temperature < 0.0) throw ConfigError("backend \"" + id + "\": temperature must be >= 0");
  if (max_output_tokens < 1) throw ConfigError("backend \"" + id + "\": max_output_tokens must be >= 1");
  if (max_retries < 0) throw ConfigError("backend \"" + id + "\": max_retries must be >= 0");
  if (max_in_flight < 1) throw ConfigError("backend \"" + id + "\": max_in_flight must be >= 1");
  if (request_timeout.count() <= 0) throw ConfigError("backend \"" + id + "\": request_timeout must be > 0");
  if (translate_cs_en) PromptTemplate::parse(*translate_cs_en);
  if (translate_en_cs) PromptTemplate::parse(*translate_en_cs);
}

BackendSpec BackendSpec::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("backend entry must be an object");
  for (const char* forbidden : {"api_key", "token", "password", "secret"}) {
    if (j.contains(forbidden)) {
      throw ConfigError(std::string("backend field \"") + forbidden +
                        "\" is not allowed; name an environment variable in api_key_env");
    }
  }
  BackendSpec s;
  s.id = get_or<std::string>(j, "id", "");
  const auto kind = get_or<std::string>(j, "kind", "mock");
  if (kind == "remote_chat") {
    s.kind = BackendKind::RemoteChat;
  } else if (kind == "mock") {
    s.kind = BackendKind::Mock;
  } else {
    throw ConfigError("backend \"" + s.id + "\": unknown kind \"" + kind + "\"");
  }
  s.endpoint_url = get_or<std::string>(j, "endpoint_url", "");
  s.model_name = get_or<std::string>(j, "model_name", s.kind == BackendKind::Mock ? "mock" : "");
  s.api_key_env = get_or<std::string>(j, "api_key_env", "");
  s.temperature = get_or<double>(j, "temperature", 0.0);
  s.max_output_tokens = get_or<int>(j, "max_output_tokens", s.max_output_tokens);
  s.request_timeout = std::chrono::milliseconds(get_or<std::int64_t>(j, "request_timeout_ms", s.request_timeout.count()));
  s.max_retries = get_or<int>(j, "max_retries", s.max_retries);
  s.max_in_flight = get_or<int>(j, "max_in_flight", s.max_in_flight);
  s.retry_backoff = std::chrono::milliseconds(get_or<std::int64_t>(j, "retry_backoff_ms", s.retry_backoff.count()));
  if (auto it = j.find("mock"); it != j.end()) {
    s.mock.behavior = parse_behavior(get_or<std::string>(*it, "behavior", "echo"));
    s.mock.count = get_or<std::size_t>(*it, "count", s.mock.count);
    s.mock.fail_on = get_or<std::string>(*it, "fail_on", "");
  }
  if (auto it = j.find("translate_prompts"); it != j.end()) {
    if (it->contains("cs_to_en")) s.translate_cs_en = get_or<std::string>(*it, "cs_to_en", "");
    if (it->contains("en_to_cs")) s.translate_en_cs = get_or<std::string>(*it, "en_to_cs", "");
  }
  s.validate();
  return s;
}

json BackendSpec::to_json() const {
  json j;
  j["id"] = id;
  j["kind"] = kind == BackendKind::RemoteChat ? "remote_chat" : "mock";
  if (!endpoint_url.empty()) j["endpoint_url"] = endpoint_url;
  j["model_name"] = model_name;
  if (!api_key_env.empty()) j["api_key_env"] = api_key_env;
  j["temperature"] = temperature;
  j["max_output_tokens"] = max_output_tokens;
  j["request_timeout_ms"] = request_timeout.count();
  j["max_retries"] = max_retries;
  j["max_in_flight"] = max_in_flight;
  j["retry_backoff_ms"] = retry_backoff.count();
  if (kind == BackendKind::Mock) {
    j["mock"] = {{"behavior", behavior_name(mock.behavior)}, {"count", mock.count}, {"fail_on", mock.fail_on}};
  }
  if (translate_cs_en || translate_en_cs) {
    j["translate_prompts"] = json::object();
    if (translate_cs_en) j["translate_prompts"]["cs_to_en"] = *translate_cs_en;
    if (translate_en_cs) j["translate_prompts"]["en_to_cs"] = *translate_en_cs;
  }
  return j;
}

std::unique_ptr<Backend> make_mock_backend(const MockSpec& spec) { return std::make_unique<MockBackend>(spec); }

namespace {

std::unique_ptr<Backend> build_impl(const BackendSpec& spec) {
  spec.validate();
  if (spec.kind == BackendKind::Mock) return make_mock_backend(spec.mock);
  std::string key;
  if (!spec.api_key_env.empty()) {
    const char* value = std::getenv(spec.api_key_env.c_str());
    if (value == nullptr || *value == '\0') {
      throw ConfigError("backend \"" + spec.id + "\": credential variable " + spec.api_key_env + " is not set");
    }
    key = value;
  }
  return make_remote_backend(spec, std::move(key));
}

}  // namespace

BackendHandle::BackendHandle(BackendSpec spec, std::shared_ptr<ResponseCache> cache)
    : BackendHandle(spec, std::move(cache), build_impl(spec)) {}

BackendHandle::BackendHandle(BackendSpec spec, std::shared_ptr<ResponseCache> cache, std::unique_ptr<Backend> impl)
    : spec_(std::move(spec)),
      cache_(cache ? std::move(cache) : std::make_shared<ResponseCache>()),
      impl_(std::move(impl)),
      slots_(spec_.max_in_flight) {
  spec_.validate();
}

std::string BackendHandle::cache_key(const std::string& prompt) const {
  return hash_fields({spec_.id, spec_.model_name, prompt, format_double(spec_.temperature),
                      std::to_string(spec_.max_output_tokens)});
}

GenerationResult BackendHandle::generate(const std::string& prompt) {
  return complete(Request{RequestKind::Generate, Direction::CsToEn, prompt, prompt});
}

GenerationResult BackendHandle::translate(const std::string& text, Direction direction) {
  const auto& custom = direction == Direction::CsToEn ? spec_.translate_cs_en : spec_.translate_en_cs;
  const PromptTemplate tmpl = custom ? PromptTemplate::parse(*custom) : default_translation_prompt(direction);
  return complete(Request{RequestKind::Translate, direction, text, tmpl.render(text)});
}

GenerationResult BackendHandle::summarize(const std::string& text, const PromptTemplate& prompt) {
  return complete(Request{RequestKind::Summarize, Direction::CsToEn, text, prompt.render(text)});
}

GenerationResult BackendHandle::complete(const Request& request) {
  const auto started = std::chrono::steady_clock::now();
  ++requests_;
  GenerationResult result;
  const std::string key = cache_key(request.prompt);
  if (auto hit = cache_->get(key)) {
    ++cache_hits_;
    result.text = std::move(hit->text);
    result.input_tokens = hit->input_tokens;
    result.output_tokens = hit->output_tokens;
    result.cache_hit = true;
    result.latency = std::chrono::steady_clock::now() - started;
    return result;
  }

  std::vector<Attempt> history;
  for (int attempt = 0;; ++attempt) {
    AttemptOutcome outcome;
    {
      slots_.acquire();
      const auto now = ++in_flight_;
      auto seen = max_in_flight_.load();
      while (now > seen && !max_in_flight_.compare_exchange_weak(seen, now)) {
      }
      ++attempts_;
      try {
        outcome = impl_->attempt(request);
      } catch (...) {
        --in_flight_;
        slots_.release();
        throw;
      }
      --in_flight_;
      slots_.release();
    }
    history.push_back({outcome.http_status, outcome.detail});
    result.attempts = attempt + 1;

    switch (outcome.status) {
      case AttemptOutcome::Status::Ok: {
        json req = {{"backend_id", spec_.id},
                    {"model_name", spec_.model_name},
                    {"prompt", request.prompt},
                    {"temperature", spec_.temperature},
                    {"max_output_tokens", spec_.max_output_tokens}};
        cache_->put(key, req, outcome.completion);
        result.text = std::move(outcome.completion.text);
        result.input_tokens = outcome.completion.input_tokens;
        result.output_tokens = outcome.completion.output_tokens;
        result.latency = std::chrono::steady_clock::now() - started;
        return result;
      }
      case AttemptOutcome::Status::Rejected:
        throw RequestError("backend \"" + spec_.id + "\" rejected the request (HTTP " +
                               std::to_string(outcome.http_status) + "): " + outcome.detail,
                           outcome.http_status);
      case AttemptOutcome::Status::Failed:
        throw TransportError("backend \"" + spec_.id + "\" failed: " + outcome.detail, std::move(history));
      case AttemptOutcome::Status::Retryable:
        if (attempt >= spec_.max_retries) {
          throw TransportError("backend \"" + spec_.id + "\" gave up after " + std::to_string(attempt + 1) +
                                   " attempt(s): " + outcome.detail,
                               std::move(history));
        }
        std::this_thread::sleep_for(jittered_backoff(spec_.retry_backoff, attempt));
        break;
    }
  }
}

BackendStats BackendHandle::stats() const {
  return {requests_.load(), cache_hits_.load(), attempts_.load(), max_in_flight_.load()};
}

BackendRegistry::BackendRegistry(std::shared_ptr<ResponseCache> cache) : cache_(std::move(cache)) {
  if (!cache_) cache_ = std::make_shared<ResponseCache>();
}

std::shared_ptr<BackendHandle> BackendRegistry::add(BackendSpec spec) {
  auto handle = std::make_shared<BackendHandle>(std::move(spec), cache_);
  add(handle);
  return handle;
}

void BackendRegistry::add(std::shared_ptr<BackendHandle> handle) {
  const std::string id = handle->spec().id;
  if (!handles_.emplace(id, std::move(handle)).second) throw ConfigError("duplicate backend id \"" + id + "\"");
}

std::shared_ptr<BackendHandle> BackendRegistry::get(const std::string& id) const {
  auto it = handles_.find(id);
  if (it == handles_.end()) throw ConfigError("unknown backend id \"" + id + "\"");
  return it->second;
}

}  // namespace czsum
