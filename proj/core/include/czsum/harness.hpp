#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "czsum/baselines.hpp"
#include "czsum/corpus.hpp"
#include "czsum/metrics.hpp"

namespace czsum {

enum ExitCode : int {
  kExitOk = 0,
  kExitError = 1,
  kExitUsage = 2,
  kExitConfig = 3,
  kExitIo = 4,
  kExitValidation = 5,
  kExitPartial = 6,
};

struct DatasetRef {
  std::filesystem::path path;
  Schema schema = Schema::SumeCzech;
  LoadOptions options;
};

/// Prints one line per diagnostic and a count summary to `out`. Returns
/// kExitOk iff there are no violations (errors or warnings), else
/// kExitValidation. Throws IoError for unreadable input.
int cmd_validate(const DatasetRef& dataset, std::ostream& out);

enum class BaselineMethod { First, Random, TextRank };
std::optional<BaselineMethod> parse_baseline_method(std::string_view s) noexcept;

struct BaselineParams {
  BaselineMethod method = BaselineMethod::First;
  // Sentences per summary; nullopt = 3 for abstracts, 1 for headlines.
  std::optional<std::size_t> sentences;
  std::uint64_t seed = 42;
  TextRankConfig textrank;
  std::size_t jobs = 1;
};

/// Writes one {"id","prediction"} line per example, in corpus order.
/// Returns the number of predictions written.
std::size_t cmd_baseline(const DatasetRef& dataset, const BaselineParams& params,
                         const std::filesystem::path& output);

struct ScoreOptions {
  std::string method;  // row label; defaults to the predictions file stem
  std::optional<std::filesystem::path> per_example;
  std::size_t jobs = 1;
};

struct ScoreResult {
  RougeReport report;
  std::size_t predictions = 0;
  std::vector<std::string> unmatched;  // prediction ids with no reference (or repeated)
  std::size_t references_without_prediction = 0;
  nlohmann::json to_json(const std::string& method) const;
};

/// Joins predictions to references by id and scores the matched set.
/// Throws std::invalid_argument when nothing matches.
ScoreResult score_predictions(const std::vector<Prediction>& predictions, const Corpus& corpus,
                              std::size_t jobs = 1,
                              std::vector<std::pair<std::string, ExampleScores>>* per_example = nullptr);

/// Scores a predictions file and writes the scores JSON to `output`.
ScoreResult cmd_score(const std::filesystem::path& predictions, const DatasetRef& dataset,
                      const std::filesystem::path& output, const ScoreOptions& options);

struct ReportRow {
  std::string method;
  ExampleScores scores;
};

ReportRow read_score_file(const std::filesystem::path& path);
/// Nine numeric columns (P, R, F for each metric), values x100.
std::string render_markdown(const std::vector<ReportRow>& rows, int precision = 1);
std::string render_csv(const std::vector<ReportRow>& rows, int precision = 1);
std::string format_percent(double value, int precision = 1);

/// Reads score files in order and writes the requested renderings.
std::vector<ReportRow> cmd_report(const std::vector<std::filesystem::path>& score_files,
                                  const std::optional<std::filesystem::path>& markdown,
                                  const std::optional<std::filesystem::path>& csv, int precision = 1);

struct RunCommandOptions {
  std::size_t jobs = 1;
  bool resume = false;
  std::optional<std::filesystem::path> output;  // overrides the config
};

/// Loads the config, builds only the backends the pipeline references,
/// and runs it over its corpus. Returns kExitOk, or kExitPartial when any
/// example failed.
int cmd_run(const std::filesystem::path& config_file, const std::string& pipeline_id,
            const RunCommandOptions& options, std::ostream& out);

}  // namespace czsum
