#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "czsum/errors.hpp"

namespace czsum {

enum class Language { Cs, En };
enum class Direction { CsToEn, EnToCs };

std::string_view to_string(Language l) noexcept;
std::string_view to_string(Direction d) noexcept;

/// Instruction text with exactly one `{name}` placeholder for the source.
class PromptTemplate {
 public:
  /// Throws ConfigError unless `text` holds exactly one placeholder.
  static PromptTemplate parse(std::string text, Language language = Language::Cs,
                              std::optional<int> max_sentences = std::nullopt);

  std::string render(std::string_view source) const;

  const std::string& text() const noexcept { return text_; }
  Language language() const noexcept { return language_; }
  std::optional<int> max_sentences() const noexcept { return max_sentences_; }

 private:
  std::string text_;
  std::string prefix_;
  std::string suffix_;
  Language language_ = Language::Cs;
  std::optional<int> max_sentences_;
};

/// The journalist-style Czech instruction with the five-sentence cap.
PromptTemplate czech_journalist_prompt();
/// English wording of the same instruction, for the pivot summarizer.
PromptTemplate english_journalist_prompt();
PromptTemplate default_translation_prompt(Direction direction);

enum class BackendKind { RemoteChat, Mock };

enum class MockBehavior {
  Echo,      // summarize/translate return the source, generate returns the prompt
  Identity,  // translator returning its input
  Tagged,    // translator prefixing "[EN]" (cs->en) or "[CS]" (en->cs)
  Lead,      // summarizer returning the first `count` sentences
  Truncate,  // summarizer returning the first `count` raw tokens
  Fail,      // every call fails with a transport error
};

struct MockSpec {
  MockBehavior behavior = MockBehavior::Echo;
  std::size_t count = 3;
  // Fail any request whose source text contains this substring.
  std::string fail_on;
};

struct BackendSpec {
  std::string id;
  BackendKind kind = BackendKind::Mock;
  std::string endpoint_url;
  std::string model_name;
  // Name of the environment variable holding the bearer credential; the
  // credential itself never appears in configuration.
  std::string api_key_env;
  double temperature = 0.0;
  int max_output_tokens = 1024;
  std::chrono::milliseconds request_timeout{120000};
  int max_retries = 3;
  int max_in_flight = 4;
  std::chrono::milliseconds retry_backoff{500};
  MockSpec mock;
  std::optional<std::string> translate_cs_en;
  std::optional<std::string> translate_en_cs;

  /// Throws ConfigError on an inconsistent spec.
  void validate() const;

  static BackendSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

enum class RequestKind { Generate, Summarize, Translate };

struct Request {
  RequestKind kind = RequestKind::Generate;
  Direction direction = Direction::CsToEn;
  std::string source;
  std::string prompt;
};

struct Completion {
  std::string text;
  std::optional<std::int64_t> input_tokens;
  std::optional<std::int64_t> output_tokens;
};

/// Outcome of a single attempt against a backend.
struct AttemptOutcome {
  enum class Status { Ok, Retryable, Rejected, Failed };
  Status status = Status::Ok;
  Completion completion;
  int http_status = 0;
  std::string detail;
};

/// One text-generation service. Implementations perform exactly one
/// attempt per call; retries, caching and admission live in BackendHandle.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual AttemptOutcome attempt(const Request& request) = 0;
};

std::unique_ptr<Backend> make_mock_backend(const MockSpec& spec);
/// Chat-completion client. `api_key` may be empty.
std::unique_ptr<Backend> make_remote_backend(const BackendSpec& spec, std::string api_key);

struct CacheEntry {
  Completion completion;
  nlohmann::json request;
};

/// Content-addressed response store: one JSON file per request hash under
/// `directory`, mirrored in memory. Without a directory it is memory-only.
class ResponseCache {
 public:
  explicit ResponseCache(std::optional<std::filesystem::path> directory = std::nullopt);

  std::optional<Completion> get(const std::string& key);
  void put(const std::string& key, const nlohmann::json& request, const Completion& completion);
  const std::optional<std::filesystem::path>& directory() const noexcept { return dir_; }

 private:
  std::optional<std::filesystem::path> dir_;
  std::mutex mu_;
  std::unordered_map<std::string, Completion> memory_;
};

struct GenerationResult {
  std::string text;
  std::optional<std::int64_t> input_tokens;
  std::optional<std::int64_t> output_tokens;
  std::chrono::duration<double> latency{0.0};
  bool cache_hit = false;
  int attempts = 0;
};

struct BackendStats {
  std::uint64_t requests = 0;
  std::uint64_t cache_hits = 0;
  std::uint64_t attempts = 0;
  std::int64_t max_in_flight_observed = 0;
};

/// Thread-safe front of one backend: cache lookup, at most max_in_flight
/// concurrent attempts, retry with exponential backoff and jitter.
class BackendHandle {
 public:
  /// Builds the implementation from the spec. A remote spec whose
  /// credential variable is unset fails here with ConfigError.
  BackendHandle(BackendSpec spec, std::shared_ptr<ResponseCache> cache);
  BackendHandle(BackendSpec spec, std::shared_ptr<ResponseCache> cache, std::unique_ptr<Backend> impl);

  GenerationResult generate(const std::string& prompt);
  GenerationResult translate(const std::string& text, Direction direction);
  GenerationResult summarize(const std::string& text, const PromptTemplate& prompt);
  GenerationResult complete(const Request& request);

  /// Stable hash of (id, model, prompt, temperature, max_output_tokens).
  std::string cache_key(const std::string& prompt) const;

  const BackendSpec& spec() const noexcept { return spec_; }
  BackendStats stats() const;

 private:
  BackendSpec spec_;
  std::shared_ptr<ResponseCache> cache_;
  std::unique_ptr<Backend> impl_;
  std::counting_semaphore<> slots_;
  std::atomic<std::uint64_t> requests_{0};
  std::atomic<std::uint64_t> cache_hits_{0};
  std::atomic<std::uint64_t> attempts_{0};
  std::atomic<std::int64_t> in_flight_{0};
  std::atomic<std::int64_t> max_in_flight_{0};
};

/// Backends by id, sharing one response cache.
class BackendRegistry {
 public:
  explicit BackendRegistry(std::shared_ptr<ResponseCache> cache = std::make_shared<ResponseCache>());

  std::shared_ptr<BackendHandle> add(BackendSpec spec);
  void add(std::shared_ptr<BackendHandle> handle);
  /// Throws ConfigError for an unknown id.
  std::shared_ptr<BackendHandle> get(const std::string& id) const;
  bool contains(const std::string& id) const { return handles_.contains(id); }
  const std::shared_ptr<ResponseCache>& cache() const noexcept { return cache_; }

 private:
  std::shared_ptr<ResponseCache> cache_;
  std::map<std::string, std::shared_ptr<BackendHandle>> handles_;
};

}  // namespace czsum
