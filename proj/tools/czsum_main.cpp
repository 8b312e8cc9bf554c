// czsum: dataset validation, extractive baselines, pipeline runs, ROUGE_RAW
// scoring and table rendering.

#include <CLI11.hpp>

#include <iostream>
#include <thread>

#include "czsum/config.hpp"
#include "czsum/errors.hpp"
#include "czsum/harness.hpp"

namespace {

using namespace czsum;

struct DatasetArgs {
  std::string dataset;
  std::string schema = "sumeczech";
  std::string task = "abstract_generation";
  std::string level = "page";
  std::vector<std::string> splits;

  void attach(CLI::App* cmd) {
    cmd->add_option("-d,--dataset", dataset, "Dataset file, or a corpus id from --config")->required();
    cmd->add_option("--schema", schema, "sumeczech | poc")->check(CLI::IsMember({"sumeczech", "poc"}));
    cmd->add_option("--task", task, "abstract_generation | headline_generation")
        ->check(CLI::IsMember({"abstract_generation", "headline_generation", "abstract", "headline"}));
    cmd->add_option("--level", level, "POC level: page | article")->check(CLI::IsMember({"page", "article"}));
    cmd->add_option("--split", splits, "Keep only these SumeCzech splits")
        ->check(CLI::IsMember({"train", "dev", "test", "oodtest"}));
  }

  DatasetRef resolve(const std::string& config_path, bool strict) const {
    DatasetRef ref;
    if (!config_path.empty()) {
      const auto cfg = RunConfigFile::load(config_path);
      if (auto it = cfg.corpora.find(dataset); it != cfg.corpora.end()) {
        ref.path = it->second.path;
        ref.schema = it->second.schema;
        ref.options = it->second.options;
        ref.options.strict = ref.options.strict || strict;
        return ref;
      }
    }
    ref.path = dataset;
    ref.schema = *parse_schema(schema);
    ref.options.task = *parse_task(task);
    ref.options.level = *parse_level(level);
    if (!splits.empty()) {
      ref.options.splits.emplace();
      for (const auto& s : splits) ref.options.splits->insert(*parse_split(s));
    }
    ref.options.strict = strict;
    return ref;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Czech summarization evaluation toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
  bool strict = false;
  std::uint64_t seed = 42;
  bool resume = false;
  app.add_option("--config", config_path, "Run configuration (JSON)");
  app.add_option("-j,--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--strict", strict, "Fail when any record fails validation");
  app.add_option("--seed", seed, "Seed for the random baseline");
  app.add_flag("--resume", resume, "Skip examples already present in the output");

  auto* validate = app.add_subcommand("validate", "Check a dataset against its schema");
  DatasetArgs validate_args;
  validate_args.attach(validate);

  auto* baseline = app.add_subcommand("baseline", "Generate extractive baseline predictions");
  DatasetArgs baseline_args;
  baseline_args.attach(baseline);
  std::string method;
  std::string baseline_out;
  std::optional<std::size_t> sentences;
  TextRankConfig textrank;
  baseline->add_option("-m,--method", method, "first | random | textrank")
      ->required()
      ->check(CLI::IsMember({"first", "random", "textrank"}));
  baseline->add_option("-o,--out", baseline_out, "Predictions JSONLines")->required();
  baseline->add_option("-k,--sentences", sentences, "Sentences per summary (default 3, headlines 1)");
  baseline->add_option("--damping", textrank.damping, "TextRank damping factor");
  baseline->add_option("--tol", textrank.convergence_tol, "PageRank L1 convergence tolerance");
  baseline->add_option("--max-iterations", textrank.max_iterations, "PageRank iteration cap");

  auto* run = app.add_subcommand("run", "Run a configured pipeline over its corpus");
  std::string pipeline_id;
  std::string run_out;
  run->add_option("-p,--pipeline", pipeline_id, "Pipeline id from --config")->required();
  run->add_option("-o,--out", run_out, "Override the predictions path");

  auto* score = app.add_subcommand("score", "Score predictions against references");
  DatasetArgs score_args;
  score_args.attach(score);
  std::string predictions_path;
  std::string score_out;
  std::string per_example;
  std::string method_name;
  score->add_option("-P,--predictions", predictions_path, "Predictions JSONLines")->required();
  score->add_option("-o,--out", score_out, "Scores JSON")->required();
  score->add_option("--per-example", per_example, "Per-example scores JSONLines");
  score->add_option("--method", method_name, "Row label (default: predictions file stem)");

  auto* report = app.add_subcommand("report", "Render score files as a table");
  std::vector<std::string> score_files;
  std::string markdown_out;
  std::string csv_out;
  int precision = 1;
  report->add_option("scores", score_files, "Score JSON files, one row each")->required();
  report->add_option("--markdown", markdown_out, "Write Markdown table here");
  report->add_option("--csv", csv_out, "Write CSV table here");
  report->add_option("--precision", precision, "Decimals after x100 scaling")->check(CLI::Range(0, 6));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*validate) {
      return cmd_validate(validate_args.resolve(config_path, false), std::cout);
    }
    if (*baseline) {
      BaselineParams params;
      params.method = *parse_baseline_method(method);
      params.sentences = sentences;
      params.seed = seed;
      params.textrank = textrank;
      params.jobs = jobs;
      const auto n = cmd_baseline(baseline_args.resolve(config_path, strict), params, baseline_out);
      std::cout << "wrote " << n << " predictions to " << baseline_out << "\n";
      return kExitOk;
    }
    if (*run) {
      if (config_path.empty()) {
        std::cerr << "run requires --config\n";
        return kExitUsage;
      }
      RunCommandOptions options;
      options.jobs = jobs;
      options.resume = resume;
      if (!run_out.empty()) options.output = run_out;
      return cmd_run(config_path, pipeline_id, options, std::cout);
    }
    if (*score) {
      ScoreOptions options;
      options.method = method_name;
      options.jobs = jobs;
      if (!per_example.empty()) options.per_example = per_example;
      const auto result = cmd_score(predictions_path, score_args.resolve(config_path, strict), score_out, options);
      std::cout << "scored " << result.report.example_count << " examples";
      if (!result.unmatched.empty()) {
        std::cout << ", " << result.unmatched.size() << " unmatched prediction id(s):";
        for (const auto& id : result.unmatched) std::cout << " " << id;
      }
      std::cout << "\n";
      return kExitOk;
    }
    if (*report) {
      std::vector<std::filesystem::path> files(score_files.begin(), score_files.end());
      std::optional<std::filesystem::path> md, csv;
      if (!markdown_out.empty()) md = markdown_out;
      if (!csv_out.empty()) csv = csv_out;
      const auto rows = cmd_report(files, md, csv, precision);
      if (!md && !csv) std::cout << render_markdown(rows, precision);
      return kExitOk;
    }
  } catch (const ValidationError& e) {
    std::cerr << "validation: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ConfigError& e) {
    std::cerr << "config: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "io: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "io: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitUsage;
}
