#include "czsum/config.hpp"

#include <set>

#include "czsum/errors.hpp"
#include "czsum/io.hpp"

namespace czsum {
namespace {

using nlohmann::json;

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

const json& array_field(const json& doc, const char* key) {
  static const json empty = json::array();
  auto it = doc.find(key);
  if (it == doc.end()) return empty;
  if (!it->is_array()) throw ConfigError(std::string("\"") + key + "\" must be an array");
  return *it;
}

std::string required_string(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string() || it->get<std::string>().empty()) {
    throw ConfigError(where + ": \"" + key + "\" must be a non-empty string");
  }
  return it->get<std::string>();
}

CorpusEntry parse_corpus(const json& obj, const std::filesystem::path& base) {
  if (!obj.is_object()) throw ConfigError("corpus entry must be an object");
  CorpusEntry c;
  c.id = required_string(obj, "id", "corpus");
  const std::string where = "corpus \"" + c.id + "\"";
  c.path = resolve(base, required_string(obj, "path", where));
  const auto schema = parse_schema(obj.value("schema", "sumeczech"));
  if (!schema) throw ConfigError(where + ": unknown schema");
  c.schema = *schema;
  const auto task = parse_task(obj.value("task", "abstract_generation"));
  if (!task) throw ConfigError(where + ": unknown task");
  c.options.task = *task;
  const auto level = parse_level(obj.value("level", "page"));
  if (!level) throw ConfigError(where + ": unknown level");
  c.options.level = *level;
  if (auto it = obj.find("splits"); it != obj.end()) {
    std::set<Split> splits;
    for (const auto& s : *it) {
      auto split = s.is_string() ? parse_split(s.get<std::string>()) : std::nullopt;
      if (!split) throw ConfigError(where + ": unknown split " + s.dump());
      splits.insert(*split);
    }
    c.options.splits = splits;
  }
  c.options.strict = obj.value("strict", false);
  return c;
}

PromptTemplate parse_prompt(const json& obj, std::string& id) {
  if (!obj.is_object()) throw ConfigError("prompt entry must be an object");
  id = required_string(obj, "id", "prompt");
  const std::string where = "prompt \"" + id + "\"";
  const std::string lang = obj.value("language", "cs");
  if (lang != "cs" && lang != "en") throw ConfigError(where + ": language must be cs or en");
  std::optional<int> max_sentences;
  if (auto it = obj.find("max_sentences"); it != obj.end() && !it->is_null()) {
    if (!it->is_number_integer()) throw ConfigError(where + ": max_sentences must be an integer");
    max_sentences = it->get<int>();
  }
  try {
    return PromptTemplate::parse(required_string(obj, "template", where), lang == "cs" ? Language::Cs : Language::En,
                                 max_sentences);
  } catch (const ConfigError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

}  // namespace

RunConfigFile RunConfigFile::load(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw ConfigError(path.string() + ": not valid JSON");
  return parse(doc, path.has_parent_path() ? path.parent_path() : std::filesystem::path("."));
}

RunConfigFile RunConfigFile::parse(const json& doc, const std::filesystem::path& base) {
  if (!doc.is_object()) throw ConfigError("config root must be an object");
  RunConfigFile cfg;
  try {
    if (auto it = doc.find("cache_dir"); it != doc.end() && it->is_string()) {
      cfg.cache_dir = resolve(base, it->get<std::string>());
    }

    for (const auto& obj : array_field(doc, "corpora")) {
      auto entry = parse_corpus(obj, base);
      if (!cfg.corpora.emplace(entry.id, entry).second) throw ConfigError("duplicate corpus id \"" + entry.id + "\"");
    }

    cfg.prompts.emplace("cs_journalist", czech_journalist_prompt());
    cfg.prompts.emplace("en_journalist", english_journalist_prompt());
    for (const auto& obj : array_field(doc, "prompts")) {
      std::string id;
      auto prompt = parse_prompt(obj, id);
      cfg.prompts.insert_or_assign(id, std::move(prompt));
    }

    std::set<std::string> backend_ids;
    for (const auto& obj : array_field(doc, "backends")) {
      auto spec = BackendSpec::from_json(obj);
      if (!backend_ids.insert(spec.id).second) throw ConfigError("duplicate backend id \"" + spec.id + "\"");
      cfg.backends.push_back(std::move(spec));
    }

    std::set<std::string> pipeline_ids;
    for (const auto& obj : array_field(doc, "pipelines")) {
      PipelineEntry entry;
      entry.config = PipelineConfig::from_json(obj);
      const std::string where = "pipeline \"" + entry.config.id + "\"";
      if (!pipeline_ids.insert(entry.config.id).second) throw ConfigError("duplicate " + where);
      entry.corpus = required_string(obj, "corpus", where);
      entry.output = resolve(base, required_string(obj, "output", where));

      if (!cfg.corpora.contains(entry.corpus)) throw ConfigError(where + ": unknown corpus \"" + entry.corpus + "\"");
      if (!cfg.prompts.contains(entry.config.prompt)) {
        throw ConfigError(where + ": unknown prompt \"" + entry.config.prompt + "\"");
      }
      for (const std::string* ref : {&entry.config.summarizer, &entry.config.translator_cs_en,
                                     &entry.config.translator_en_cs}) {
        if (!ref->empty() && !backend_ids.contains(*ref)) {
          throw ConfigError(where + ": unknown backend \"" + *ref + "\"");
        }
      }
      cfg.pipelines.push_back(std::move(entry));
    }

    if (auto it = doc.find("report"); it != doc.end() && it->is_object()) {
      cfg.report.precision = it->value("precision", cfg.report.precision);
      if (cfg.report.precision < 0 || cfg.report.precision > 6) throw ConfigError("report precision must be 0..6");
      if (auto f = it->find("formats"); f != it->end()) {
        cfg.report.markdown = cfg.report.csv = false;
        for (const auto& fmt : *f) {
          if (fmt == "markdown") {
            cfg.report.markdown = true;
          } else if (fmt == "csv") {
            cfg.report.csv = true;
          } else {
            throw ConfigError("unknown report format " + fmt.dump());
          }
        }
      }
    }
    if (auto it = doc.find("evaluation"); it != doc.end() && it->is_object()) {
      const std::string aggregation = it->value("aggregation", "macro");
      if (aggregation != "macro") throw ConfigError("only macro aggregation is supported");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

const PipelineEntry& RunConfigFile::pipeline(const std::string& id) const {
  for (const auto& p : pipelines) {
    if (p.config.id == id) return p;
  }
  throw ConfigError("unknown pipeline \"" + id + "\"");
}

const BackendSpec& RunConfigFile::backend(const std::string& id) const {
  for (const auto& b : backends) {
    if (b.id == id) return b;
  }
  throw ConfigError("unknown backend \"" + id + "\"");
}

}  // namespace czsum
