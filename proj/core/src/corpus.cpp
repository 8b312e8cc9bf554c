#include "czsum/corpus.hpp"

#include <json.hpp>

#include <algorithm>
#include <stdexcept>

#include "czsum/errors.hpp"
#include "czsum/hashing.hpp"
#include "czsum/io.hpp"
#include "czsum/tokenize.hpp"

namespace czsum {
namespace {

using nlohmann::json;

constexpr std::size_t kMaxSummarySentences = 5;

std::optional<Split> split_from_filename(const std::filesystem::path& path) {
  const std::string stem = path.filename().string();
  // Longest label first: "oodtest" contains "test".
  for (Split s : {Split::OodTest, Split::Train, Split::Dev, Split::Test}) {
    if (stem.find(to_string(s)) != std::string::npos) return s;
  }
  return std::nullopt;
}

/// Returns the string at `key`, or records why it is unusable.
std::optional<std::string> string_field(const json& obj, const char* key, bool required_non_blank,
                                        std::string& error) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    error = std::string("missing field \"") + key + "\"";
    return std::nullopt;
  }
  if (!it->is_string()) {
    error = std::string("field \"") + key + "\" is not a string";
    return std::nullopt;
  }
  std::string value = it->get<std::string>();
  if (required_non_blank && is_blank(value)) {
    error = std::string("field \"") + key + "\" is blank";
    return std::nullopt;
  }
  return value;
}

std::string optional_string(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it != obj.end() && it->is_string() ? it->get<std::string>() : std::string();
}

std::optional<std::int64_t> integer_field(const json& obj, const char* key, std::string& error) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    error = std::string("missing field \"") + key + "\"";
    return std::nullopt;
  }
  if (it->is_number_integer()) return it->get<std::int64_t>();
  if (it->is_string()) {
    const auto s = it->get<std::string>();
    if (!s.empty() && s.size() < 19 && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      return std::stoll(s);
    }
  }
  error = std::string("field \"") + key + "\" is not an integer";
  return std::nullopt;
}

std::variant<SumeCzechRecord, std::string> parse_sumeczech_object(const json& obj,
                                                                  std::optional<Split> fallback_split) {
  if (!obj.is_object()) return std::string("line is not a JSON object");
  std::string error;
  SumeCzechRecord r;
  auto url = string_field(obj, "url", false, error);
  if (!url) return error;
  auto headline = string_field(obj, "headline", true, error);
  if (!headline) return error;
  auto abstract = string_field(obj, "abstract", true, error);
  if (!abstract) return error;
  auto text = string_field(obj, "text", true, error);
  if (!text) return error;
  r.url = std::move(*url);
  r.headline = std::move(*headline);
  r.abstract = std::move(*abstract);
  r.text = std::move(*text);
  r.subdomain = optional_string(obj, "subdomain");
  r.section = optional_string(obj, "section");
  r.published = optional_string(obj, "published");

  std::optional<Split> split;
  for (const char* key : {"split", "dataset"}) {
    auto it = obj.find(key);
    if (it == obj.end()) continue;
    if (!it->is_string() || !(split = parse_split(it->get<std::string>()))) {
      return std::string("field \"") + key + "\" is not one of train/dev/test/oodtest";
    }
    break;
  }
  if (!split) split = fallback_split;
  if (!split) return std::string("no split label in record or file name");
  r.split = *split;
  return r;
}

std::variant<PocRecord, std::string> parse_poc_object(const json& obj, PocLevel level) {
  if (!obj.is_object()) return std::string("record is not a JSON object");
  std::string error;
  PocRecord r;
  r.level = level;
  auto text = string_field(obj, "text", true, error);
  if (!text) return error;
  auto summary = string_field(obj, "summary", true, error);
  if (!summary) return error;
  auto year = integer_field(obj, "year", error);
  if (!year) return error;
  auto journal = string_field(obj, "journal", false, error);
  if (!journal) return error;
  auto page_src = string_field(obj, "page_src", false, error);
  if (!page_src) return error;
  auto page_num = integer_field(obj, "page_num", error);
  if (!page_num) return error;
  if (*page_num < 1) return std::string("field \"page_num\" must be >= 1");
  r.text = std::move(*text);
  r.summary = std::move(*summary);
  r.year = *year;
  r.journal = std::move(*journal);
  r.page_src = std::move(*page_src);
  r.page_num = *page_num;
  return r;
}

void finish(Corpus& corpus, const LoadOptions& options, const std::filesystem::path& path) {
  if (options.strict && corpus.error_count() > 0) {
    throw ValidationError(path.string() + ": " + std::to_string(corpus.error_count()) +
                              " record(s) failed validation",
                          corpus.error_count());
  }
}

void add_poc(Corpus& corpus, std::size_t line, const json& obj, const LoadOptions& options) {
  ++corpus.records_seen;
  auto parsed = parse_poc_object(obj, options.level);
  if (auto* err = std::get_if<std::string>(&parsed)) {
    corpus.diagnostics.push_back({line, Severity::Error, *err});
    return;
  }
  const auto& rec = std::get<PocRecord>(parsed);
  const std::size_t sentences = count_sentences(rec.summary);
  if (sentences > kMaxSummarySentences) {
    corpus.diagnostics.push_back(
        {line, Severity::Warning,
         "summary has " + std::to_string(sentences) + " sentences (limit " +
             std::to_string(kMaxSummarySentences) + "), page_src \"" + rec.page_src + "\""});
  }
  if (!corpus.add(poc_example(rec))) {
    corpus.diagnostics.push_back({line, Severity::Error, "duplicate id for page_src \"" + rec.page_src +
                                                             "\" page_num " + std::to_string(rec.page_num)});
  }
}

}  // namespace

std::string_view to_string(Split s) noexcept {
  switch (s) {
    case Split::Train: return "train";
    case Split::Dev: return "dev";
    case Split::Test: return "test";
    case Split::OodTest: return "oodtest";
  }
  return "";
}

std::string_view to_string(Task t) noexcept {
  return t == Task::AbstractGeneration ? "abstract_generation" : "headline_generation";
}

std::string_view to_string(Origin o) noexcept {
  switch (o) {
    case Origin::SumeCzech: return "sumeczech";
    case Origin::PocP: return "poc_p";
    case Origin::PocI: return "poc_i";
  }
  return "";
}

std::string_view to_string(PocLevel l) noexcept { return l == PocLevel::Page ? "page" : "article"; }
std::string_view to_string(Schema s) noexcept { return s == Schema::SumeCzech ? "sumeczech" : "poc"; }

std::optional<Split> parse_split(std::string_view s) noexcept {
  for (Split v : {Split::Train, Split::Dev, Split::Test, Split::OodTest}) {
    if (s == to_string(v)) return v;
  }
  return std::nullopt;
}

std::optional<Task> parse_task(std::string_view s) noexcept {
  if (s == "abstract_generation" || s == "abstract") return Task::AbstractGeneration;
  if (s == "headline_generation" || s == "headline") return Task::HeadlineGeneration;
  return std::nullopt;
}

std::optional<PocLevel> parse_level(std::string_view s) noexcept {
  if (s == "page") return PocLevel::Page;
  if (s == "article") return PocLevel::Article;
  return std::nullopt;
}

std::optional<Schema> parse_schema(std::string_view s) noexcept {
  if (s == "sumeczech") return Schema::SumeCzech;
  if (s == "poc") return Schema::Poc;
  return std::nullopt;
}

std::size_t Corpus::error_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(diagnostics.begin(), diagnostics.end(),
                                                [](const Diagnostic& d) { return d.severity == Severity::Error; }));
}

std::size_t Corpus::warning_count() const noexcept { return diagnostics.size() - error_count(); }

const Example* Corpus::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &examples[it->second];
}

bool Corpus::add(Example ex) {
  auto [it, inserted] = index_.try_emplace(ex.id, examples.size());
  if (!inserted) return false;
  examples.push_back(std::move(ex));
  return true;
}

SumeCzechReader::SumeCzechReader(const std::filesystem::path& path)
    : in_(path, std::ios::binary), split_from_name_(split_from_filename(path)) {
  if (!in_) throw IoError("cannot open " + path.string());
}

std::optional<SumeCzechReader::Item> SumeCzechReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line)) continue;
    Item item;
    item.line = line_;
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded()) {
      item.value = Diagnostic{line_, Severity::Error, "malformed JSON"};
      return item;
    }
    auto parsed = parse_sumeczech_object(obj, split_from_name_);
    if (auto* err = std::get_if<std::string>(&parsed)) {
      item.value = Diagnostic{line_, Severity::Error, std::move(*err)};
    } else {
      item.value = std::move(std::get<SumeCzechRecord>(parsed));
    }
    return item;
  }
  if (in_.bad()) throw IoError("read failed at line " + std::to_string(line_));
  return std::nullopt;
}

std::string example_id(Origin origin, std::string_view key, std::int64_t page_num, Task task) {
  const std::string page = std::to_string(page_num);
  return hash_fields({to_string(origin), key, page, to_string(task)}).substr(0, 16);
}

Example extract_task(const SumeCzechRecord& record, Task task) {
  Example ex;
  ex.id = example_id(Origin::SumeCzech, record.url, 0, task);
  ex.source = record.text;
  ex.reference = task == Task::AbstractGeneration ? record.abstract : record.headline;
  ex.task = task;
  ex.origin = Origin::SumeCzech;
  ex.split = record.split;
  return ex;
}

Example poc_example(const PocRecord& record) {
  Example ex;
  ex.origin = record.level == PocLevel::Page ? Origin::PocP : Origin::PocI;
  ex.task = Task::AbstractGeneration;
  ex.id = example_id(ex.origin, record.page_src, record.page_num, ex.task);
  ex.source = record.text;
  ex.reference = record.summary;
  return ex;
}

Corpus load_sumeczech(const std::filesystem::path& path, const LoadOptions& options) {
  Corpus corpus;
  corpus.origin = Origin::SumeCzech;
  SumeCzechReader reader(path);
  while (auto item = reader.next()) {
    ++corpus.records_seen;
    if (auto* diag = std::get_if<Diagnostic>(&item->value)) {
      corpus.diagnostics.push_back(std::move(*diag));
      continue;
    }
    const auto& rec = std::get<SumeCzechRecord>(item->value);
    ++corpus.split_counts[rec.split];
    if (options.splits && !options.splits->contains(rec.split)) {
      ++corpus.filtered_out;
      continue;
    }
    if (!corpus.add(extract_task(rec, options.task))) {
      corpus.diagnostics.push_back({item->line, Severity::Error, "duplicate id for url \"" + rec.url + "\""});
    }
  }
  finish(corpus, options, path);
  return corpus;
}

Corpus load_poc(const std::filesystem::path& path, const LoadOptions& options) {
  Corpus corpus;
  corpus.origin = options.level == PocLevel::Page ? Origin::PocP : Origin::PocI;
  const std::string contents = read_file(path);
  const auto first = contents.find_first_not_of(" \t\r\n\xEF\xBB\xBF");

  if (first != std::string::npos && contents[first] == '[') {
    json doc = json::parse(contents, nullptr, false);
    if (doc.is_discarded() || !doc.is_array()) {
      corpus.diagnostics.push_back({0, Severity::Error, "malformed JSON array"});
    } else {
      std::size_t index = 0;
      for (const auto& obj : doc) add_poc(corpus, ++index, obj, options);
    }
  } else {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < contents.size()) {
      auto eol = contents.find('\n', pos);
      if (eol == std::string::npos) eol = contents.size();
      std::string_view line(contents.data() + pos, eol - pos);
      pos = eol + 1;
      ++line_no;
      if (is_blank(line)) continue;
      json obj = json::parse(line, nullptr, false);
      if (obj.is_discarded()) {
        ++corpus.records_seen;
        corpus.diagnostics.push_back({line_no, Severity::Error, "malformed JSON"});
        continue;
      }
      add_poc(corpus, line_no, obj, options);
    }
  }
  finish(corpus, options, path);
  return corpus;
}

Corpus load_dataset(const std::filesystem::path& path, Schema schema, const LoadOptions& options) {
  return schema == Schema::SumeCzech ? load_sumeczech(path, options) : load_poc(path, options);
}

CorpusStats corpus_stats(const Corpus& corpus) {
  if (corpus.examples.empty()) throw std::invalid_argument("corpus is empty");
  CorpusStats stats;
  stats.example_count = corpus.examples.size();
  double source = 0.0, reference = 0.0;
  for (const auto& ex : corpus.examples) {
    source += static_cast<double>(count_words(tokenize_raw(ex.source)));
    reference += static_cast<double>(count_words(tokenize_raw(ex.reference)));
    if (ex.split) ++stats.split_counts[*ex.split];
  }
  const auto n = static_cast<double>(corpus.examples.size());
  stats.mean_source_words = source / n;
  stats.mean_reference_words = reference / n;
  return stats;
}

std::vector<Prediction> read_predictions(const std::filesystem::path& path,
                                         std::vector<Diagnostic>* diagnostics) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<Prediction> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object() || !obj.contains("id") || !obj["id"].is_string() ||
        !obj.contains("prediction") || !obj["prediction"].is_string()) {
      if (diagnostics) {
        diagnostics->push_back({line_no, Severity::Error, "expected {\"id\": string, \"prediction\": string}"});
      }
      continue;
    }
    out.push_back({obj["id"].get<std::string>(), obj["prediction"].get<std::string>()});
  }
  return out;
}

std::string prediction_line(const Prediction& p) {
  json obj = json::object();
  obj["id"] = p.id;
  obj["prediction"] = p.prediction;
  return obj.dump(-1, ' ', false, json::error_handler_t::replace) + "\n";
}

void write_predictions(const std::filesystem::path& path, const std::vector<Prediction>& predictions) {
  std::string buf;
  for (const auto& p : predictions) buf += prediction_line(p);
  write_file_atomic(path, buf);
}

}  // namespace czsum
