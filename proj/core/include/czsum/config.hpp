#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "czsum/backends.hpp"
#include "czsum/corpus.hpp"
#include "czsum/pipeline.hpp"

namespace czsum {

struct CorpusEntry {
  std::string id;
  std::filesystem::path path;
  Schema schema = Schema::SumeCzech;
  LoadOptions options;
};

struct PipelineEntry {
  PipelineConfig config;
  std::string corpus;            // CorpusEntry id
  std::filesystem::path output;  // predictions file
};

struct ReportOptions {
  int precision = 1;
  bool markdown = true;
  bool csv = true;
};

/// The declarative run configuration. Relative paths resolve against the
/// directory of the config file. Prompt ids "cs_journalist" and
/// "en_journalist" are predefined.
struct RunConfigFile {
  std::optional<std::filesystem::path> cache_dir;
  std::map<std::string, CorpusEntry> corpora;
  std::map<std::string, PromptTemplate> prompts;
  std::vector<BackendSpec> backends;
  std::vector<PipelineEntry> pipelines;
  ReportOptions report;

  /// Parses and validates, including every cross-reference. Throws
  /// ConfigError or IoError.
  static RunConfigFile load(const std::filesystem::path& path);
  static RunConfigFile parse(const nlohmann::json& doc, const std::filesystem::path& base_dir);

  const PipelineEntry& pipeline(const std::string& id) const;
  const BackendSpec& backend(const std::string& id) const;
};

}  // namespace czsum
