#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace czsum {

// SumeCzech ships a fourth out-of-domain test split next to train/dev/test.
enum class Split { Train, Dev, Test, OodTest };
enum class Task { AbstractGeneration, HeadlineGeneration };
enum class Origin { SumeCzech, PocP, PocI };
enum class PocLevel { Page, Article };
enum class Schema { SumeCzech, Poc };

std::string_view to_string(Split s) noexcept;
std::string_view to_string(Task t) noexcept;
std::string_view to_string(Origin o) noexcept;
std::string_view to_string(PocLevel l) noexcept;
std::string_view to_string(Schema s) noexcept;
std::optional<Split> parse_split(std::string_view s) noexcept;
std::optional<Task> parse_task(std::string_view s) noexcept;
std::optional<PocLevel> parse_level(std::string_view s) noexcept;
std::optional<Schema> parse_schema(std::string_view s) noexcept;

struct SumeCzechRecord {
  std::string url;
  std::string headline;
  std::string abstract;
  std::string text;
  std::string subdomain;
  std::string section;
  std::string published;
  Split split = Split::Train;
};

struct PocRecord {
  std::string text;
  std::string summary;
  std::int64_t year = 0;
  std::string journal;
  std::string page_src;
  std::int64_t page_num = 1;
  PocLevel level = PocLevel::Page;
};

struct Example {
  std::string id;
  std::string source;
  std::string reference;
  Task task = Task::AbstractGeneration;
  Origin origin = Origin::SumeCzech;
  std::optional<Split> split;
};

enum class Severity { Error, Warning };

/// One validation finding. `line` is the 1-based line for JSONLines input
/// and the 1-based element index for JSON arrays.
struct Diagnostic {
  std::size_t line = 0;
  Severity severity = Severity::Error;
  std::string message;
};

class Corpus {
 public:
  Origin origin = Origin::SumeCzech;
  std::vector<Example> examples;
  std::map<Split, std::size_t> split_counts;
  std::vector<Diagnostic> diagnostics;
  std::size_t records_seen = 0;   // non-blank lines or array elements
  std::size_t filtered_out = 0;   // valid records outside the split filter

  std::size_t error_count() const noexcept;
  std::size_t warning_count() const noexcept;
  const Example* find(std::string_view id) const;

  /// Appends an example; returns false (and adds nothing) on a duplicate id.
  bool add(Example ex);

 private:
  std::unordered_map<std::string, std::size_t> index_;
};

struct LoadOptions {
  Task task = Task::AbstractGeneration;
  std::optional<std::set<Split>> splits;  // nullopt = all splits
  PocLevel level = PocLevel::Page;
  // Throw ValidationError when any record failed validation.
  bool strict = false;
};

/// Streams a SumeCzech JSONLines file one record at a time. Memory use is
/// bounded by the longest line.
class SumeCzechReader {
 public:
  struct Item {
    std::size_t line = 0;
    std::variant<SumeCzechRecord, Diagnostic> value;
  };

  explicit SumeCzechReader(const std::filesystem::path& path);
  std::optional<Item> next();

 private:
  std::ifstream in_;
  std::optional<Split> split_from_name_;
  std::size_t line_ = 0;
};

std::string example_id(Origin origin, std::string_view key, std::int64_t page_num, Task task);

Example extract_task(const SumeCzechRecord& record, Task task);
Example poc_example(const PocRecord& record);

Corpus load_sumeczech(const std::filesystem::path& path, const LoadOptions& options = {});
Corpus load_poc(const std::filesystem::path& path, const LoadOptions& options = {});
Corpus load_dataset(const std::filesystem::path& path, Schema schema, const LoadOptions& options);

struct CorpusStats {
  double mean_source_words = 0.0;
  double mean_reference_words = 0.0;
  std::size_t example_count = 0;
  std::map<Split, std::size_t> split_counts;
};

/// Throws std::invalid_argument on an empty corpus.
CorpusStats corpus_stats(const Corpus& corpus);

struct Prediction {
  std::string id;
  std::string prediction;
};

/// Reads {"id", "prediction"} JSONLines. Malformed lines go to `diagnostics`.
std::vector<Prediction> read_predictions(const std::filesystem::path& path,
                                         std::vector<Diagnostic>* diagnostics = nullptr);
std::string prediction_line(const Prediction& p);
void write_predictions(const std::filesystem::path& path, const std::vector<Prediction>& predictions);

}  // namespace czsum
