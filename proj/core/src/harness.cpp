#include "czsum/harness.hpp"

#include <atomic>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "czsum/backends.hpp"
#include "czsum/config.hpp"
#include "czsum/errors.hpp"
#include "czsum/io.hpp"
#include "czsum/pipeline.hpp"

namespace czsum {
namespace {

using nlohmann::json;

template <typename Fn>
void parallel_for(std::size_t n, std::size_t jobs, Fn&& fn) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) fn(i);
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, n));
  std::vector<std::jthread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
}

json score_json(const RougeScore& s) { return {{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}}; }

json scores_json(const ExampleScores& scores) {
  json j = json::object();
  for (MetricKind k : kAllMetrics) j[std::string(metric_key(k))] = score_json(scores[k]);
  return j;
}

RougeScore score_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": score entry must be an object");
  try {
    return RougeScore{j.at("precision").get<double>(), j.at("recall").get<double>(), j.at("f1").get<double>()};
  } catch (const json::exception&) {
    throw ConfigError(where + ": score entry needs numeric precision/recall/f1");
  }
}

std::string_view severity_name(Severity s) { return s == Severity::Error ? "error" : "warning"; }

}  // namespace

int cmd_validate(const DatasetRef& dataset, std::ostream& out) {
  LoadOptions options = dataset.options;
  options.strict = false;
  const Corpus corpus = load_dataset(dataset.path, dataset.schema, options);
  std::ostringstream buf;
  for (const auto& d : corpus.diagnostics) {
    buf << dataset.path.filename().string() << ":" << d.line << ": " << severity_name(d.severity) << ": "
        << d.message << "\n";
  }
  const std::size_t violations = corpus.diagnostics.size();
  buf << "records: " << corpus.records_seen << ", examples: " << corpus.examples.size()
      << ", errors: " << corpus.error_count() << ", warnings: " << corpus.warning_count() << "\n";
  if (!corpus.split_counts.empty()) {
    buf << "splits:";
    for (const auto& [split, count] : corpus.split_counts) buf << " " << to_string(split) << "=" << count;
    buf << "\n";
  }
  buf << violations << " violations\n";
  out << buf.str();
  return violations == 0 ? kExitOk : kExitValidation;
}

std::optional<BaselineMethod> parse_baseline_method(std::string_view s) noexcept {
  if (s == "first") return BaselineMethod::First;
  if (s == "random") return BaselineMethod::Random;
  if (s == "textrank") return BaselineMethod::TextRank;
  return std::nullopt;
}

std::size_t cmd_baseline(const DatasetRef& dataset, const BaselineParams& params,
                         const std::filesystem::path& output) {
  const Corpus corpus = load_dataset(dataset.path, dataset.schema, dataset.options);
  const std::size_t k =
      params.sentences.value_or(dataset.options.task == Task::HeadlineGeneration ? std::size_t{1} : std::size_t{3});
  if (k < 1) throw std::invalid_argument("sentence count must be >= 1");
  TextRankConfig textrank = params.textrank;
  textrank.sentence_count = k;
  textrank.validate();

  std::vector<Prediction> predictions(corpus.examples.size());
  parallel_for(corpus.examples.size(), params.jobs, [&](std::size_t i) {
    const Example& ex = corpus.examples[i];
    std::string summary;
    switch (params.method) {
      case BaselineMethod::First: summary = first_baseline(ex.source, k); break;
      case BaselineMethod::Random: summary = random_baseline(ex.source, k, params.seed); break;
      case BaselineMethod::TextRank: summary = textrank_baseline(ex.source, textrank); break;
    }
    predictions[i] = {ex.id, std::move(summary)};
  });
  write_predictions(output, predictions);
  return predictions.size();
}

json ScoreResult::to_json(const std::string& method) const {
  return {{"method", method},
          {"aggregation", "macro"},
          {"example_count", report.example_count},
          {"predictions", predictions},
          {"matched", report.example_count},
          {"unmatched_predictions", unmatched},
          {"references_without_prediction", references_without_prediction},
          {"scores", scores_json(report.per_metric)}};
}

ScoreResult score_predictions(const std::vector<Prediction>& predictions, const Corpus& corpus, std::size_t jobs,
                              std::vector<std::pair<std::string, ExampleScores>>* per_example) {
  ScoreResult result;
  result.predictions = predictions.size();
  std::vector<std::pair<const Prediction*, const Example*>> matched;
  std::unordered_set<std::string> seen;
  for (const auto& p : predictions) {
    const Example* ex = corpus.find(p.id);
    if (ex == nullptr || !seen.insert(p.id).second) {
      result.unmatched.push_back(p.id);
      continue;
    }
    matched.emplace_back(&p, ex);
  }
  if (matched.empty()) throw std::invalid_argument("no prediction id matches a reference id");
  result.references_without_prediction = corpus.examples.size() - matched.size();

  std::vector<ExampleScores> scores(matched.size());
  parallel_for(matched.size(), jobs, [&](std::size_t i) {
    scores[i] = score_example(matched[i].first->prediction, matched[i].second->reference);
  });
  result.report = aggregate(scores);
  if (per_example) {
    per_example->clear();
    for (std::size_t i = 0; i < matched.size(); ++i) per_example->emplace_back(matched[i].first->id, scores[i]);
  }
  return result;
}

ScoreResult cmd_score(const std::filesystem::path& predictions_path, const DatasetRef& dataset,
                      const std::filesystem::path& output, const ScoreOptions& options) {
  const Corpus corpus = load_dataset(dataset.path, dataset.schema, dataset.options);
  const auto predictions = read_predictions(predictions_path);
  std::vector<std::pair<std::string, ExampleScores>> rows;
  ScoreResult result = score_predictions(predictions, corpus, options.jobs, options.per_example ? &rows : nullptr);

  const std::string method = options.method.empty() ? predictions_path.stem().string() : options.method;
  write_file_atomic(output, result.to_json(method).dump(2) + "\n");
  if (options.per_example) {
    std::string buf;
    for (const auto& [id, scores] : rows) {
      json line = scores_json(scores);
      line["id"] = id;
      buf += line.dump() + "\n";
    }
    write_file_atomic(*options.per_example, buf);
  }
  return result;
}

ReportRow read_score_file(const std::filesystem::path& path) {
  json doc = json::parse(read_file(path), nullptr, false);
  const std::string where = path.string();
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("scores")) {
    throw ConfigError(where + ": not a score file");
  }
  ReportRow row;
  row.method = doc.value("method", path.stem().string());
  for (MetricKind k : kAllMetrics) {
    const auto key = std::string(metric_key(k));
    if (!doc["scores"].contains(key)) throw ConfigError(where + ": missing " + key);
    row.scores[k] = score_from_json(doc["scores"][key], where);
  }
  return row;
}

std::string format_percent(double value, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, value * 100.0);
  return buf;
}

std::string render_markdown(const std::vector<ReportRow>& rows, int precision) {
  std::string out = "| Method |";
  std::string rule = "|---|";
  for (MetricKind k : kAllMetrics) {
    for (const char* part : {"P", "R", "F"}) {
      out += " " + std::string(metric_label(k)) + " " + part + " |";
      rule += "---:|";
    }
  }
  out += "\n" + rule + "\n";
  for (const auto& row : rows) {
    out += "| " + row.method + " |";
    for (MetricKind k : kAllMetrics) {
      const auto& s = row.scores[k];
      for (double v : {s.precision, s.recall, s.f1}) out += " " + format_percent(v, precision) + " |";
    }
    out += "\n";
  }
  return out;
}

std::string render_csv(const std::vector<ReportRow>& rows, int precision) {
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  };
  std::string out = "method";
  for (MetricKind k : kAllMetrics) {
    for (const char* part : {"p", "r", "f"}) out += "," + std::string(metric_key(k)) + "_" + part;
  }
  out += "\n";
  for (const auto& row : rows) {
    out += quote(row.method);
    for (MetricKind k : kAllMetrics) {
      const auto& s = row.scores[k];
      for (double v : {s.precision, s.recall, s.f1}) out += "," + format_percent(v, precision);
    }
    out += "\n";
  }
  return out;
}

std::vector<ReportRow> cmd_report(const std::vector<std::filesystem::path>& score_files,
                                  const std::optional<std::filesystem::path>& markdown,
                                  const std::optional<std::filesystem::path>& csv, int precision) {
  if (score_files.empty()) throw std::invalid_argument("report needs at least one score file");
  std::vector<ReportRow> rows;
  for (const auto& p : score_files) rows.push_back(read_score_file(p));
  if (markdown) write_file_atomic(*markdown, render_markdown(rows, precision));
  if (csv) write_file_atomic(*csv, render_csv(rows, precision));
  return rows;
}

int cmd_run(const std::filesystem::path& config_file, const std::string& pipeline_id,
            const RunCommandOptions& options, std::ostream& out) {
  const RunConfigFile cfg = RunConfigFile::load(config_file);
  const PipelineEntry& entry = cfg.pipeline(pipeline_id);
  const CorpusEntry& corpus_entry = cfg.corpora.at(entry.corpus);

  // Construct every referenced backend first: a missing credential fails
  // here, before any request is sent.
  auto cache = std::make_shared<ResponseCache>(cfg.cache_dir);
  BackendRegistry registry(cache);
  for (const std::string* id :
       {&entry.config.summarizer, &entry.config.translator_cs_en, &entry.config.translator_en_cs}) {
    if (!id->empty() && !registry.contains(*id)) registry.add(cfg.backend(*id));
  }
  Pipeline pipeline(entry.config, registry, cfg.prompts.at(entry.config.prompt));

  const Corpus corpus = load_dataset(corpus_entry.path, corpus_entry.schema, corpus_entry.options);
  RunOptions run_options;
  run_options.output = options.output.value_or(entry.output);
  run_options.jobs = options.jobs;
  run_options.resume = options.resume;
  const RunManifest manifest = run_corpus(pipeline, corpus, run_options);

  out << "pipeline " << manifest.pipeline_id << ": " << manifest.predicted << "/" << manifest.examples
      << " predicted (" << manifest.resumed << " resumed), " << manifest.failures.size() << " failed\n";
  for (const auto& f : manifest.failures) out << "  failed " << f.id << ": " << f.error << "\n";
  return manifest.failures.empty() ? kExitOk : kExitPartial;
}

}  // namespace czsum
