#include "czsum/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <ctime>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "czsum/baselines.hpp"
#include "czsum/hashing.hpp"
#include "czsum/io.hpp"
#include "czsum/tokenize.hpp"

namespace czsum {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

/// Byte range [begin, end) of text followed by separator [end, sep_end).
struct Unit {
  std::size_t begin;
  std::size_t end;
  std::size_t sep_end;
};

std::size_t token_count(std::string_view text, const Unit& u) {
  return tokenize_raw(text.substr(u.begin, u.end - u.begin)).size();
}

bool is_ascii_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; }

std::vector<Unit> paragraph_units(std::string_view text) {
  std::vector<Unit> units;
  std::size_t begin = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_ascii_space(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    std::size_t newlines = 0;
    while (j < text.size() && is_ascii_space(text[j])) newlines += text[j++] == '\n';
    if (newlines >= 2 && i > begin) {
      units.push_back({begin, i, j});
      begin = j;
    }
    i = j;
  }
  if (begin < text.size() || units.empty()) units.push_back({begin, text.size(), text.size()});
  return units;
}

std::vector<Unit> sentence_units(std::string_view text, const Unit& para) {
  const auto sentences = split_sentences(text.substr(para.begin, para.end - para.begin));
  if (sentences.size() <= 1) return {para};
  std::vector<Unit> units;
  std::size_t begin = para.begin;
  for (std::size_t k = 0; k < sentences.size(); ++k) {
    const std::size_t end = para.begin + sentences[k].end;
    const std::size_t sep_end = k + 1 < sentences.size() ? para.begin + sentences[k + 1].begin : para.sep_end;
    units.push_back({begin, end, sep_end});
    begin = sep_end;
  }
  return units;
}

std::vector<Unit> window_units(std::string_view text, const Unit& sentence, std::size_t budget) {
  const TokenSequence seq = tokenize_raw(text.substr(sentence.begin, sentence.end - sentence.begin));
  if (seq.size() <= budget) return {sentence};
  std::vector<Unit> units;
  std::size_t begin = sentence.begin;
  for (std::size_t first = 0; first < seq.size(); first += budget) {
    const std::size_t last = std::min(first + budget, seq.size()) - 1;
    const std::size_t end = sentence.begin + seq[last].offset + seq[last].length;
    const std::size_t sep_end = last + 1 < seq.size() ? sentence.begin + seq[last + 1].offset : sentence.sep_end;
    units.push_back({begin, end, sep_end});
    begin = sep_end;
  }
  return units;
}

class Packer {
 public:
  Packer(std::string_view text, std::size_t budget) : text_(text), budget_(budget) {}

  void add(const Unit& u, std::size_t tokens) {
    if (open_ && used_ + tokens > budget_) flush();
    if (!open_) {
      current_ = u;
      used_ = 0;
      open_ = true;
    }
    current_.end = u.end;
    current_.sep_end = u.sep_end;
    used_ += tokens;
  }

  void flush() {
    if (!open_) return;
    out_.push_back({std::string(text_.substr(current_.begin, current_.end - current_.begin)),
                    std::string(text_.substr(current_.end, current_.sep_end - current_.end))});
    open_ = false;
  }

  std::vector<Chunk> take() {
    flush();
    return std::move(out_);
  }

 private:
  std::string_view text_;
  std::size_t budget_;
  Unit current_{0, 0, 0};
  std::size_t used_ = 0;
  bool open_ = false;
  std::vector<Chunk> out_;
};

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void load_done(const std::filesystem::path& path, const Corpus& corpus,
               std::unordered_map<std::string, std::string>& done) {
  if (!std::filesystem::exists(path)) return;
  for (auto& p : read_predictions(path)) {
    if (corpus.find(p.id)) done[p.id] = std::move(p.prediction);
  }
}

}  // namespace

std::string_view to_string(Strategy s) noexcept { return s == Strategy::Direct ? "direct" : "tst"; }

std::string_view to_string(SentencePolicy p) noexcept {
  switch (p) {
    case SentencePolicy::Off: return "off";
    case SentencePolicy::Warn: return "warn";
    case SentencePolicy::Truncate: return "truncate";
  }
  return "";
}

std::optional<Strategy> parse_strategy(std::string_view s) noexcept {
  if (s == "direct") return Strategy::Direct;
  if (s == "tst") return Strategy::Tst;
  return std::nullopt;
}

std::optional<SentencePolicy> parse_sentence_policy(std::string_view s) noexcept {
  for (auto p : {SentencePolicy::Off, SentencePolicy::Warn, SentencePolicy::Truncate}) {
    if (s == to_string(p)) return p;
  }
  return std::nullopt;
}

void PipelineConfig::validate() const {
  if (id.empty()) throw ConfigError("pipeline id must not be empty");
  if (summarizer.empty()) throw ConfigError("pipeline \"" + id + "\": summarizer is required");
  if (prompt.empty()) throw ConfigError("pipeline \"" + id + "\": prompt is required");
  if (chunk_token_budget < 1) throw ConfigError("pipeline \"" + id + "\": chunk_token_budget must be >= 1");
  const bool has_translators = !translator_cs_en.empty() || !translator_en_cs.empty();
  if (strategy == Strategy::Tst && (translator_cs_en.empty() || translator_en_cs.empty())) {
    throw ConfigError("pipeline \"" + id + "\": tst requires translator_cs_en and translator_en_cs");
  }
  if (strategy == Strategy::Direct && has_translators) {
    throw ConfigError("pipeline \"" + id + "\": direct strategy takes no translators");
  }
}

PipelineConfig PipelineConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("pipeline entry must be an object");
  PipelineConfig c;
  try {
    c.id = j.value("id", "");
    const auto strategy = j.value("strategy", "direct");
    auto s = parse_strategy(strategy);
    if (!s) throw ConfigError("pipeline \"" + c.id + "\": unknown strategy \"" + strategy + "\"");
    c.strategy = *s;
    c.summarizer = j.value("summarizer", "");
    c.translator_cs_en = j.value("translator_cs_en", "");
    c.translator_en_cs = j.value("translator_en_cs", "");
    c.prompt = j.value("prompt", "");
    c.chunk_token_budget = j.value("chunk_token_budget", c.chunk_token_budget);
    c.summarizer_token_budget = j.value("summarizer_token_budget", c.summarizer_token_budget);
    const auto policy = j.value("enforce_max_sentences", "warn");
    auto p = parse_sentence_policy(policy);
    if (!p) throw ConfigError("pipeline \"" + c.id + "\": unknown enforce_max_sentences \"" + policy + "\"");
    c.enforce_max_sentences = *p;
  } catch (const json::exception& e) {
    throw ConfigError("pipeline \"" + c.id + "\": " + e.what());
  }
  c.validate();
  return c;
}

json PipelineConfig::to_json() const {
  json j = {{"id", id},
            {"strategy", to_string(strategy)},
            {"summarizer", summarizer},
            {"prompt", prompt},
            {"chunk_token_budget", chunk_token_budget},
            {"summarizer_token_budget", summarizer_token_budget},
            {"enforce_max_sentences", to_string(enforce_max_sentences)}};
  if (strategy == Strategy::Tst) {
    j["translator_cs_en"] = translator_cs_en;
    j["translator_en_cs"] = translator_en_cs;
  }
  return j;
}

const StageRecord* PipelineRun::stage(std::string_view name) const {
  for (const auto& s : stages) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

std::vector<Chunk> chunk_for_translation(std::string_view text, std::size_t token_budget) {
  if (token_budget == 0) throw std::invalid_argument("token_budget must be >= 1");
  Packer packer(text, token_budget);
  for (const Unit& para : paragraph_units(text)) {
    const std::size_t para_tokens = token_count(text, para);
    if (para_tokens <= token_budget) {
      packer.add(para, para_tokens);
      continue;
    }
    packer.flush();
    for (const Unit& sentence : sentence_units(text, para)) {
      const std::size_t sentence_tokens = token_count(text, sentence);
      if (sentence_tokens <= token_budget) {
        packer.add(sentence, sentence_tokens);
        continue;
      }
      packer.flush();
      for (const Unit& window : window_units(text, sentence, token_budget)) {
        packer.add(window, token_count(text, window));
        packer.flush();
      }
    }
    packer.flush();
  }
  return packer.take();
}

std::string join_chunks(const std::vector<Chunk>& chunks) {
  std::string out;
  for (const auto& c : chunks) {
    out += c.text;
    out += c.separator;
  }
  return out;
}

Pipeline::Pipeline(PipelineConfig config, const BackendRegistry& registry, PromptTemplate prompt)
    : config_(std::move(config)), prompt_(std::move(prompt)) {
  config_.validate();
  summarizer_ = registry.get(config_.summarizer);
  if (config_.strategy == Strategy::Tst) {
    cs_en_ = registry.get(config_.translator_cs_en);
    en_cs_ = registry.get(config_.translator_en_cs);
  }
}

std::string Pipeline::config_hash() const {
  json j = {{"pipeline", config_.to_json()},
            {"prompt", {{"text", prompt_.text()}, {"language", to_string(prompt_.language())}}},
            {"summarizer", summarizer_->spec().to_json()}};
  if (prompt_.max_sentences()) j["prompt"]["max_sentences"] = *prompt_.max_sentences();
  if (cs_en_) j["translator_cs_en"] = cs_en_->spec().to_json();
  if (en_cs_) j["translator_en_cs"] = en_cs_->spec().to_json();
  return sha256_hex(j.dump());
}

std::string Pipeline::prepare_summarizer_input(const std::string& text, PipelineRun& run) const {
  if (config_.summarizer_token_budget == 0) return text;
  const TokenSequence seq = tokenize_raw(text);
  if (seq.size() <= config_.summarizer_token_budget) return text;
  const Token& last = seq[config_.summarizer_token_budget - 1];
  run.warnings.push_back("summarizer input truncated from " + std::to_string(seq.size()) + " to " +
                         std::to_string(config_.summarizer_token_budget) + " tokens");
  return text.substr(0, last.offset + last.length);
}

std::string Pipeline::translate_chunked(BackendHandle& backend, const std::string& text, Direction direction,
                                        StageRecord& stage) const {
  std::string out;
  for (const Chunk& chunk : chunk_for_translation(text, config_.chunk_token_budget)) {
    if (is_blank(chunk.text)) {
      out += chunk.text;
    } else {
      const auto result = backend.translate(chunk.text, direction);
      ++stage.calls;
      stage.cache_hits += result.cache_hit ? 1 : 0;
      out += result.text;
    }
    out += chunk.separator;
  }
  return out;
}

void Pipeline::apply_sentence_policy(PipelineRun& run) const {
  const auto limit = prompt_.max_sentences();
  if (!run.final_summary || !limit || config_.enforce_max_sentences == SentencePolicy::Off) return;
  const std::size_t count = count_sentences(*run.final_summary);
  if (count <= static_cast<std::size_t>(*limit)) return;
  if (config_.enforce_max_sentences == SentencePolicy::Truncate) {
    run.final_summary = first_baseline(*run.final_summary, static_cast<std::size_t>(*limit));
    run.warnings.push_back("summary truncated from " + std::to_string(count) + " to " +
                           std::to_string(*limit) + " sentences");
  } else {
    run.warnings.push_back("summary has " + std::to_string(count) + " sentences (limit " +
                           std::to_string(*limit) + ")");
  }
}

PipelineRun Pipeline::direct_summarize(const std::string& source, std::string example_id) const {
  PipelineRun run;
  run.example_id = std::move(example_id);
  run.strategy = Strategy::Direct;
  StageRecord stage{"summarize", Clock::now(), {}, 0, 0, false};
  try {
    const auto result = summarizer_->summarize(prepare_summarizer_input(source, run), prompt_);
    stage.calls = 1;
    stage.cache_hits = result.cache_hit ? 1 : 0;
    stage.ok = true;
    run.final_summary = result.text;
  } catch (const std::exception& e) {
    run.error = std::string("summarize: ") + e.what();
  }
  stage.finished = Clock::now();
  run.stages.push_back(stage);
  apply_sentence_policy(run);
  return run;
}

PipelineRun Pipeline::tst_summarize(const std::string& source, std::string example_id) const {
  if (!cs_en_ || !en_cs_) throw ConfigError("pipeline \"" + config_.id + "\" has no translators configured");
  PipelineRun run;
  run.example_id = std::move(example_id);
  run.strategy = Strategy::Tst;

  auto run_stage = [&](const char* name, auto&& body) {
    StageRecord stage{name, Clock::now(), {}, 0, 0, false};
    try {
      body(stage);
      stage.ok = true;
    } catch (const std::exception& e) {
      run.error = std::string(name) + ": " + e.what();
    }
    stage.finished = Clock::now();
    run.stages.push_back(stage);
    return stage.ok;
  };

  std::string english_summary;
  const bool ok =
      run_stage("translate_cs_en",
                [&](StageRecord& st) {
                  run.translated_source = translate_chunked(*cs_en_, source, Direction::CsToEn, st);
                }) &&
      run_stage("summarize",
                [&](StageRecord& st) {
                  const auto result =
                      summarizer_->summarize(prepare_summarizer_input(*run.translated_source, run), prompt_);
                  st.calls = 1;
                  st.cache_hits = result.cache_hit ? 1 : 0;
                  run.english_summary = result.text;
                }) &&
      run_stage("translate_en_cs", [&](StageRecord& st) {
        run.final_summary = translate_chunked(*en_cs_, *run.english_summary, Direction::EnToCs, st);
      });
  if (ok) apply_sentence_policy(run);
  return run;
}

PipelineRun Pipeline::summarize(const std::string& source, std::string example_id) const {
  return config_.strategy == Strategy::Direct ? direct_summarize(source, std::move(example_id))
                                              : tst_summarize(source, std::move(example_id));
}

json RunManifest::to_json() const {
  json fails = json::array();
  for (const auto& f : failures) fails.push_back({{"id", f.id}, {"error", f.error}});
  return {{"pipeline", pipeline_id},
          {"config_hash", config_hash},
          {"totals",
           {{"examples", examples}, {"predicted", predicted}, {"resumed", resumed}, {"failed", failures.size()}}},
          {"failures", fails},
          {"started_at", started_at},
          {"finished_at", finished_at},
          {"wall_seconds", wall_seconds}};
}

RunManifest run_corpus(const Pipeline& pipeline, const Corpus& corpus, const RunOptions& options) {
  const auto wall_start = Clock::now();
  RunManifest manifest;
  manifest.pipeline_id = pipeline.config().id;
  manifest.config_hash = pipeline.config_hash();
  manifest.examples = corpus.examples.size();
  manifest.started_at = utc_timestamp();

  std::filesystem::path partial = options.output;
  partial += ".partial";
  if (options.output.has_parent_path()) std::filesystem::create_directories(options.output.parent_path());

  std::unordered_map<std::string, std::string> done;
  if (options.resume) {
    load_done(options.output, corpus, done);
    load_done(partial, corpus, done);
  } else {
    std::filesystem::remove(partial);
  }
  manifest.resumed = done.size();

  std::ofstream partial_out(partial, std::ios::binary | std::ios::app);
  if (!partial_out) throw IoError("cannot write " + partial.string());

  const std::size_t n = corpus.examples.size();
  std::vector<std::optional<std::string>> predictions(n);
  std::vector<std::optional<std::string>> errors(n);
  std::atomic<std::size_t> next{0};
  std::mutex write_mu;
  std::exception_ptr io_failure;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      const Example& ex = corpus.examples[i];
      if (auto it = done.find(ex.id); it != done.end()) {
        predictions[i] = it->second;
        continue;
      }
      PipelineRun run = pipeline.summarize(ex.source, ex.id);
      if (!run.ok()) {
        errors[i] = run.error.value_or("unknown error");
        continue;
      }
      predictions[i] = *run.final_summary;
      std::lock_guard lock(write_mu);
      partial_out << prediction_line({ex.id, *run.final_summary});
      partial_out.flush();
      if (!partial_out && !io_failure) {
        io_failure = std::make_exception_ptr(IoError("write failed: " + partial.string()));
      }
    }
  };

  const std::size_t jobs = std::max<std::size_t>(1, std::min(options.jobs, n));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < jobs; ++w) pool.emplace_back(worker);
    worker();
  }
  partial_out.close();
  if (io_failure) std::rethrow_exception(io_failure);

  std::vector<Prediction> ordered;
  for (std::size_t i = 0; i < n; ++i) {
    if (predictions[i]) {
      ordered.push_back({corpus.examples[i].id, *predictions[i]});
    } else if (errors[i]) {
      manifest.failures.push_back({corpus.examples[i].id, *errors[i]});
    }
  }
  write_predictions(options.output, ordered);
  std::filesystem::remove(partial);

  manifest.predicted = ordered.size();
  manifest.finished_at = utc_timestamp();
  manifest.wall_seconds = std::chrono::duration<double>(Clock::now() - wall_start).count();
  std::filesystem::path manifest_path = options.manifest.value_or([&] {
    auto p = options.output;
    p += ".manifest.json";
    return p;
  }());
  write_file_atomic(manifest_path, manifest.to_json().dump(2) + "\n");
  return manifest;
}

}  // namespace czsum
