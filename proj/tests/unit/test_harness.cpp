#include <doctest.h>

#include <sstream>

#include "czsum/errors.hpp"
#include "czsum/harness.hpp"
#include "czsum/io.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

using namespace czsum;
using nlohmann::json;

namespace {

const std::filesystem::path kFixtures = CZSUM_FIXTURE_DIR;

DatasetRef sumeczech(const std::filesystem::path& p) { return {p, Schema::SumeCzech, {}}; }

oracle::Symbols words(const std::string& s) {
  oracle::Symbols out;
  std::istringstream in(s);
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

ReportRow row(std::string method, double value) {
  ReportRow r{std::move(method), {}};
  for (auto m : kAllMetrics) r.scores[m] = RougeScore::from_pr(value, value);
  return r;
}

}  // namespace

TEST_CASE("cmd_validate") {
  std::ostringstream clean;
  CHECK(cmd_validate(sumeczech(kFixtures / "sumeczech_test.jsonl"), clean) == kExitOk);
  CHECK(clean.str().find("0 violations") != std::string::npos);

  std::ostringstream six;
  CHECK(cmd_validate({kFixtures / "poc_six_sentences.json", Schema::Poc, {}}, six) == kExitValidation);
  CHECK(six.str().find("1 violations") != std::string::npos);
  CHECK(six.str().find("poc_six_sentences.json:2: warning") != std::string::npos);

  std::ostringstream missing;
  CHECK(cmd_validate(sumeczech(kFixtures / "sumeczech_missing_abstract.jsonl"), missing) == kExitValidation);
  CHECK(missing.str().find(":2: error") != std::string::npos);

  std::ostringstream none;
  CHECK_THROWS_AS(cmd_validate(sumeczech(kFixtures / "does_not_exist.jsonl"), none), IoError);
  CHECK(none.str().empty());
}

TEST_CASE("cmd_baseline") {
  testing::TempDir dir;
  CHECK(parse_baseline_method("textrank") == BaselineMethod::TextRank);
  CHECK_FALSE(parse_baseline_method("lexrank"));

  SUBCASE("first produces lead-3 for every example") {
    const auto n = cmd_baseline(sumeczech(kFixtures / "sumeczech_small.jsonl"), {}, dir / "first.jsonl");
    const auto corpus = load_sumeczech(kFixtures / "sumeczech_small.jsonl");
    const auto preds = read_predictions(dir / "first.jsonl");
    CHECK(n == 3);
    REQUIRE(preds.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(preds[i].id == corpus.examples[i].id);
      CHECK(preds[i].prediction == first_baseline(corpus.examples[i].source, 3));
    }
  }

  SUBCASE("headline task defaults to one sentence") {
    DatasetRef ds = sumeczech(kFixtures / "sumeczech_small.jsonl");
    ds.options.task = Task::HeadlineGeneration;
    cmd_baseline(ds, {}, dir / "h.jsonl");
    for (const auto& p : read_predictions(dir / "h.jsonl")) CHECK(count_sentences(p.prediction) == 1);
  }

  SUBCASE("random is reproducible and parallel-safe") {
    BaselineParams params;
    params.method = BaselineMethod::Random;
    params.seed = 7;
    cmd_baseline(sumeczech(kFixtures / "sumeczech_test.jsonl"), params, dir / "r1.jsonl");
    params.jobs = 4;
    cmd_baseline(sumeczech(kFixtures / "sumeczech_test.jsonl"), params, dir / "r2.jsonl");
    CHECK(read_file(dir / "r1.jsonl") == read_file(dir / "r2.jsonl"));
  }

  SUBCASE("textrank includes the hub sentence") {
    BaselineParams params;
    params.method = BaselineMethod::TextRank;
    params.sentences = 2;
    cmd_baseline(sumeczech(kFixtures / "textrank_hub.jsonl"), params, dir / "t.jsonl");
    const auto preds = read_predictions(dir / "t.jsonl");
    REQUIRE(preds.size() == 1);
    CHECK(preds[0].prediction.find("Alfa beta gama delta spolu.") != std::string::npos);
  }
}

TEST_CASE("score_predictions") {
  const auto corpus = load_sumeczech(kFixtures / "sumeczech_test.jsonl");

  SUBCASE("identity predictions score 100") {
    std::vector<Prediction> preds;
    for (const auto& ex : corpus.examples) preds.push_back({ex.id, ex.reference});
    const auto result = score_predictions(preds, corpus, 3);
    for (auto m : kAllMetrics) {
      CHECK(format_percent(result.report.per_metric[m].precision) == "100.0");
      CHECK(format_percent(result.report.per_metric[m].recall) == "100.0");
      CHECK(format_percent(result.report.per_metric[m].f1) == "100.0");
    }
    CHECK(result.unmatched.empty());
    CHECK(result.references_without_prediction == 0);
  }

  SUBCASE("empty predictions score zero") {
    std::vector<Prediction> preds;
    for (const auto& ex : corpus.examples) preds.push_back({ex.id, ""});
    const auto result = score_predictions(preds, corpus);
    for (auto m : kAllMetrics) CHECK(result.report.per_metric[m] == RougeScore{0, 0, 0});
  }

  SUBCASE("id join accounting") {
    std::vector<Prediction> preds{{corpus.examples[0].id, "x"}, {"unknown", "y"}, {corpus.examples[0].id, "z"}};
    const auto result = score_predictions(preds, corpus);
    CHECK(result.report.example_count == 1);
    CHECK(result.unmatched.size() == 2);
    CHECK(result.report.example_count + result.unmatched.size() == preds.size());
    CHECK(result.references_without_prediction == corpus.examples.size() - 1);
    CHECK_THROWS_AS(score_predictions({{"nobody", "x"}}, corpus), std::invalid_argument);
  }
}

TEST_CASE("score_predictions matches the oracle on hand-built overlaps") {
  const std::vector<std::pair<std::string, std::string>> pairs{
      {"a b c d e", "a b x d e"},
      {"the cat sat on the mat", "the cat the mat sat"},
      {"a a a b", "a b b"},
  };
  Corpus corpus;
  std::vector<Prediction> preds;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto id = "h" + std::to_string(i);
    corpus.add({id, "zdroj", pairs[i].second, Task::AbstractGeneration, Origin::SumeCzech, Split::Test});
    preds.push_back({id, pairs[i].first});
  }
  const auto result = score_predictions(preds, corpus);

  double sums[3][3] = {};
  for (const auto& [cand, ref] : pairs) {
    const oracle::Prf prf[3] = {oracle::rouge_n_oracle(words(cand), words(ref), 1),
                                oracle::rouge_n_oracle(words(cand), words(ref), 2),
                                oracle::rouge_l_oracle(words(cand), words(ref))};
    for (int m = 0; m < 3; ++m) {
      sums[m][0] += prf[m].p;
      sums[m][1] += prf[m].r;
      sums[m][2] += prf[m].f;
    }
  }
  for (int m = 0; m < 3; ++m) {
    const auto& got = result.report.per_metric[kAllMetrics[m]];
    CHECK(got.precision == doctest::Approx(sums[m][0] / 3).epsilon(1e-12));
    CHECK(got.recall == doctest::Approx(sums[m][1] / 3).epsilon(1e-12));
    CHECK(got.f1 == doctest::Approx(sums[m][2] / 3).epsilon(1e-12));
  }
}

TEST_CASE("cmd_score writes scores and per-example files") {
  testing::TempDir dir;
  const auto ds = sumeczech(kFixtures / "sumeczech_test.jsonl");
  cmd_baseline(ds, {}, dir / "first.jsonl");
  ScoreOptions opts;
  opts.per_example = dir / "per.jsonl";
  const auto result = cmd_score(dir / "first.jsonl", ds, dir / "scores.json", opts);
  const auto doc = json::parse(read_file(dir / "scores.json"));
  CHECK(doc["method"] == "first");
  CHECK(doc["aggregation"] == "macro");
  CHECK(doc["example_count"] == 6);
  CHECK(doc["scores"]["rouge_raw_1"]["f1"].get<double>() == result.report.per_metric[MetricKind::RougeRaw1].f1);

  std::istringstream per(read_file(dir / "per.jsonl"));
  std::size_t lines = 0;
  for (std::string line; std::getline(per, line); ++lines) CHECK(json::parse(line).contains("id"));
  CHECK(lines == 6);

  const auto row = read_score_file(dir / "scores.json");
  CHECK(row.method == "first");
  CHECK(row.scores[MetricKind::RougeRawL] == result.report.per_metric[MetricKind::RougeRawL]);
}

TEST_CASE("report rendering") {
  CHECK(format_percent(0.212) == "21.2");
  CHECK(format_percent(0.144, 1) == "14.4");
  CHECK(format_percent(1.0) == "100.0");
  CHECK(format_percent(0.0) == "0.0");
  CHECK(format_percent(0.12345, 2) == "12.35");

  const auto md = render_markdown({row("M7B-SC", 0.212), row("First", 0.144)});
  std::istringstream lines(md);
  std::vector<std::string> all;
  for (std::string l; std::getline(lines, l);) all.push_back(l);
  REQUIRE(all.size() == 4);
  CHECK(std::count(all[0].begin(), all[0].end(), '|') == 11);
  CHECK(all[0].find("ROUGE_RAW-1 P") != std::string::npos);
  CHECK(all[2].rfind("| M7B-SC |", 0) == 0);
  CHECK(all[3].rfind("| First |", 0) == 0);
  CHECK(all[2].find("21.2") != std::string::npos);

  const auto csv = render_csv({row("M7B-SC", 0.212), row("First", 0.144)});
  CHECK(csv.rfind("method,rouge_raw_1_p,rouge_raw_1_r,rouge_raw_1_f,", 0) == 0);
  CHECK(csv.find("M7B-SC,21.2,21.2,21.2,21.2,21.2,21.2,21.2,21.2,21.2\n") != std::string::npos);
  CHECK(csv.find("First,14.4,14.4") != std::string::npos);
}

TEST_CASE("markdown and CSV carry the same numbers") {
  ReportRow r{"mixed", {}};
  r.scores[MetricKind::RougeRaw1] = {0.13149, 0.17951, 0.14449};
  r.scores[MetricKind::RougeRaw2] = {0.01, 0.0249999, 0.0};
  r.scores[MetricKind::RougeRawL] = {0.5, 0.33333, 0.9995};
  const auto md = render_markdown({r}, 1);
  const auto csv = render_csv({r}, 1);
  std::vector<std::string> md_cells, csv_cells;
  {
    std::istringstream in(md);
    std::string line;
    for (int i = 0; i < 3; ++i) std::getline(in, line);
    std::istringstream cells(line);
    for (std::string c; std::getline(cells, c, '|');) {
      c.erase(0, c.find_first_not_of(' '));
      c.erase(c.find_last_not_of(' ') + 1);
      if (!c.empty()) md_cells.push_back(c);
    }
  }
  {
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    std::istringstream cells(line);
    for (std::string c; std::getline(cells, c, ',');) csv_cells.push_back(c);
  }
  CHECK(md_cells == csv_cells);
  REQUIRE(csv_cells.size() == 10);
  CHECK(csv_cells[1] == "13.1");
  CHECK(csv_cells[3] == "14.4");
  CHECK(csv_cells[5] == "2.5");
  CHECK(csv_cells[9] == "100.0");
}

TEST_CASE("cmd_report preserves input order") {
  testing::TempDir dir;
  const auto ds = sumeczech(kFixtures / "sumeczech_test.jsonl");
  BaselineParams random;
  random.method = BaselineMethod::Random;
  cmd_baseline(ds, {}, dir / "first.jsonl");
  cmd_baseline(ds, random, dir / "random.jsonl");
  cmd_score(dir / "random.jsonl", ds, dir / "random.json", {});
  cmd_score(dir / "first.jsonl", ds, dir / "first.json", {});
  const auto rows = cmd_report({dir / "random.json", dir / "first.json"}, dir / "t.md", dir / "t.csv", 1);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].method == "random");
  CHECK(rows[1].method == "first");
  CHECK(read_file(dir / "t.md") == render_markdown(rows, 1));
  CHECK(read_file(dir / "t.csv") == render_csv(rows, 1));
  CHECK_THROWS(cmd_report({}, std::nullopt, std::nullopt, 1));
}

TEST_CASE("cmd_run") {
  testing::TempDir dir;
  auto cfg = json::parse(R"({
    "backends": [
      {"id": "lead", "mock": {"behavior": "lead", "count": 2}},
      {"id": "picky", "mock": {"behavior": "lead", "fail_on": "tramvaj"}}
    ],
    "pipelines": [
      {"id": "ok", "summarizer": "lead", "prompt": "cs_journalist", "corpus": "c", "output": "ok.jsonl"},
      {"id": "partial", "summarizer": "picky", "prompt": "cs_journalist", "corpus": "c", "output": "partial.jsonl"}
    ]
  })");
  cfg["corpora"] = json::array({{{"id", "c"}, {"path", (kFixtures / "sumeczech_test.jsonl").string()}}});
  write_file_atomic(dir / "run.json", cfg.dump());
  std::ostringstream out;
  CHECK(cmd_run(dir / "run.json", "ok", {}, out) == kExitOk);
  CHECK(read_predictions(dir / "ok.jsonl").size() == 6);
  CHECK(std::filesystem::exists(dir / "ok.jsonl.manifest.json"));
  CHECK(cmd_run(dir / "run.json", "partial", {}, out) == kExitPartial);
  CHECK_THROWS_AS(cmd_run(dir / "run.json", "ghost", {}, out), ConfigError);
}
