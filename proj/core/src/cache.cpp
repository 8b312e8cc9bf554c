#include <chrono>
#include <ctime>
#include <fstream>

#include "czsum/backends.hpp"
#include "czsum/io.hpp"

namespace czsum {
namespace {

using nlohmann::json;

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json completion_json(const Completion& c) {
  json j = {{"text", c.text}};
  j["input_tokens"] = c.input_tokens ? json(*c.input_tokens) : json(nullptr);
  j["output_tokens"] = c.output_tokens ? json(*c.output_tokens) : json(nullptr);
  return j;
}

std::optional<Completion> completion_from_json(const json& j) {
  if (!j.is_object() || !j.contains("text") || !j["text"].is_string()) return std::nullopt;
  Completion c;
  c.text = j["text"].get<std::string>();
  if (j.contains("input_tokens") && j["input_tokens"].is_number_integer()) {
    c.input_tokens = j["input_tokens"].get<std::int64_t>();
  }
  if (j.contains("output_tokens") && j["output_tokens"].is_number_integer()) {
    c.output_tokens = j["output_tokens"].get<std::int64_t>();
  }
  return c;
}

}  // namespace

ResponseCache::ResponseCache(std::optional<std::filesystem::path> directory) : dir_(std::move(directory)) {
  if (dir_) {
    std::error_code ec;
    std::filesystem::create_directories(*dir_, ec);
    if (ec) throw IoError("cannot create cache directory " + dir_->string() + ": " + ec.message());
  }
}

std::optional<Completion> ResponseCache::get(const std::string& key) {
  {
    std::lock_guard lock(mu_);
    if (auto it = memory_.find(key); it != memory_.end()) return it->second;
  }
  if (!dir_) return std::nullopt;
  const auto path = *dir_ / (key + ".json");
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  json doc = json::parse(in, nullptr, false);
  // Unreadable entries are treated as misses and overwritten on success.
  if (doc.is_discarded() || !doc.contains("response")) return std::nullopt;
  auto completion = completion_from_json(doc["response"]);
  if (!completion) return std::nullopt;
  std::lock_guard lock(mu_);
  memory_.emplace(key, *completion);
  return completion;
}

void ResponseCache::put(const std::string& key, const json& request, const Completion& completion) {
  {
    std::lock_guard lock(mu_);
    memory_[key] = completion;
  }
  if (!dir_) return;
  json doc = {{"key", key}, {"request", request}, {"response", completion_json(completion)},
              {"created_at", utc_timestamp()}};
  write_file_atomic(*dir_ / (key + ".json"), doc.dump(2, ' ', false, json::error_handler_t::replace) + "\n");
}

}  // namespace czsum
