#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "czsum/backends.hpp"
#include "czsum/corpus.hpp"

namespace czsum {

enum class Strategy { Direct, Tst };
enum class SentencePolicy { Off, Warn, Truncate };

std::string_view to_string(Strategy s) noexcept;
std::string_view to_string(SentencePolicy p) noexcept;
std::optional<Strategy> parse_strategy(std::string_view s) noexcept;
std::optional<SentencePolicy> parse_sentence_policy(std::string_view s) noexcept;

struct PipelineConfig {
  std::string id;
  Strategy strategy = Strategy::Direct;
  std::string summarizer;
  std::string translator_cs_en;  // tst only
  std::string translator_en_cs;  // tst only
  std::string prompt;            // prompt template id
  // Raw-token budget per translation request.
  std::size_t chunk_token_budget = 3000;
  // Raw-token cap on summarizer input; 0 disables truncation.
  std::size_t summarizer_token_budget = 0;
  SentencePolicy enforce_max_sentences = SentencePolicy::Warn;

  /// Throws ConfigError when the strategy and translator ids disagree.
  void validate() const;

  static PipelineConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct StageRecord {
  std::string name;  // "summarize", "translate_cs_en", "translate_en_cs"
  std::chrono::steady_clock::time_point started;
  std::chrono::steady_clock::time_point finished;
  std::size_t calls = 0;
  std::size_t cache_hits = 0;
  bool ok = false;

  double latency_seconds() const { return std::chrono::duration<double>(finished - started).count(); }
};

struct PipelineRun {
  std::string example_id;
  Strategy strategy = Strategy::Direct;
  std::optional<std::string> translated_source;  // tst only
  std::optional<std::string> english_summary;    // tst only
  std::optional<std::string> final_summary;
  std::optional<std::string> error;
  std::vector<StageRecord> stages;
  std::vector<std::string> warnings;

  bool ok() const noexcept { return final_summary.has_value(); }
  const StageRecord* stage(std::string_view name) const;
};

/// A piece of text handed to a translator, plus the original whitespace
/// that followed it. Concatenating text + separator over all chunks
/// restores the input byte for byte.
struct Chunk {
  std::string text;
  std::string separator;
};

/// Greedy packing of blank-line-delimited paragraphs into chunks of at
/// most `token_budget` raw tokens. A paragraph over budget is split into
/// sentences, and a sentence over budget into fixed token windows.
/// Always returns at least one chunk. Throws std::invalid_argument when
/// token_budget is 0.
std::vector<Chunk> chunk_for_translation(std::string_view text, std::size_t token_budget);
std::string join_chunks(const std::vector<Chunk>& chunks);

/// A configured summarization strategy bound to live backends.
class Pipeline {
 public:
  /// Resolves backend ids in `registry`; throws ConfigError on a dangling
  /// reference.
  Pipeline(PipelineConfig config, const BackendRegistry& registry, PromptTemplate prompt);

  PipelineRun direct_summarize(const std::string& source, std::string example_id = {}) const;
  PipelineRun tst_summarize(const std::string& source, std::string example_id = {}) const;
  /// Dispatches on config().strategy.
  PipelineRun summarize(const std::string& source, std::string example_id = {}) const;

  const PipelineConfig& config() const noexcept { return config_; }
  const PromptTemplate& prompt() const noexcept { return prompt_; }
  /// Hash over the pipeline, prompt and backend specs.
  std::string config_hash() const;

 private:
  std::string prepare_summarizer_input(const std::string& text, PipelineRun& run) const;
  std::string translate_chunked(BackendHandle& backend, const std::string& text, Direction direction,
                                StageRecord& stage) const;
  void apply_sentence_policy(PipelineRun& run) const;

  PipelineConfig config_;
  PromptTemplate prompt_;
  std::shared_ptr<BackendHandle> summarizer_;
  std::shared_ptr<BackendHandle> cs_en_;
  std::shared_ptr<BackendHandle> en_cs_;
};

struct RunOptions {
  std::filesystem::path output;
  std::optional<std::filesystem::path> manifest;  // default: <output>.manifest.json
  std::size_t jobs = 1;
  bool resume = false;
};

struct RunFailure {
  std::string id;
  std::string error;
};

struct RunManifest {
  std::string pipeline_id;
  std::string config_hash;
  std::size_t examples = 0;
  std::size_t predicted = 0;  // including resumed
  std::size_t resumed = 0;
  std::vector<RunFailure> failures;
  std::string started_at;
  std::string finished_at;
  double wall_seconds = 0.0;

  nlohmann::json to_json() const;
};

/// Runs the pipeline over every example with `jobs` workers. Predictions
/// are appended to <output>.partial as they finish; the final <output> is
/// written in corpus order. With `resume`, ids already present in
/// <output> or <output>.partial are not recomputed. Backend failures are
/// recorded per example; I/O failures throw IoError.
RunManifest run_corpus(const Pipeline& pipeline, const Corpus& corpus, const RunOptions& options);

}  // namespace czsum
