#include "czsum/metrics.hpp"

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string_view>
#include <unordered_map>

namespace czsum {
namespace {

/// Maps token texts of a candidate/reference pair onto dense ids so the
/// kernels compare integers instead of strings.
struct Interned {
  std::vector<std::uint32_t> candidate;
  std::vector<std::uint32_t> reference;
};

Interned intern_pair(const TokenSequence& candidate, const TokenSequence& reference) {
  std::unordered_map<std::string_view, std::uint32_t> ids;
  ids.reserve(candidate.size() + reference.size());
  auto map = [&](const TokenSequence& seq) {
    std::vector<std::uint32_t> out;
    out.reserve(seq.size());
    for (const auto& tok : seq.tokens) {
      auto [it, inserted] = ids.try_emplace(tok.text, static_cast<std::uint32_t>(ids.size()));
      out.push_back(it->second);
    }
    return out;
  };
  Interned r;
  r.candidate = map(candidate);
  r.reference = map(reference);
  return r;
}

std::size_t window_count(std::size_t len, std::size_t n) { return len >= n ? len - n + 1 : 0; }

struct VectorHash {
  std::size_t operator()(const std::vector<std::uint32_t>& v) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (auto x : v) {
      h ^= x;
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

std::string_view metric_key(MetricKind kind) noexcept {
  switch (kind) {
    case MetricKind::RougeRaw1: return "rouge_raw_1";
    case MetricKind::RougeRaw2: return "rouge_raw_2";
    case MetricKind::RougeRawL: return "rouge_raw_l";
  }
  return "";
}

std::string_view metric_label(MetricKind kind) noexcept {
  switch (kind) {
    case MetricKind::RougeRaw1: return "ROUGE_RAW-1";
    case MetricKind::RougeRaw2: return "ROUGE_RAW-2";
    case MetricKind::RougeRawL: return "ROUGE_RAW-L";
  }
  return "";
}

RougeScore RougeScore::from_pr(double precision, double recall) noexcept {
  RougeScore s;
  s.precision = precision;
  s.recall = recall;
  s.f1 = (precision + recall) > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
  return s;
}

RougeScore RougeScore::from_counts(std::size_t match, std::size_t candidate_total,
                                   std::size_t reference_total) noexcept {
  const double p = candidate_total ? static_cast<double>(match) / static_cast<double>(candidate_total) : 0.0;
  const double r = reference_total ? static_cast<double>(match) / static_cast<double>(reference_total) : 0.0;
  return from_pr(p, r);
}

NgramCounts ngram_counts(const TokenSequence& seq, std::size_t n) {
  if (n == 0) throw std::invalid_argument("ngram order must be >= 1");
  NgramCounts counts;
  for (std::size_t i = 0; i + n <= seq.size(); ++i) {
    Ngram gram;
    gram.reserve(n);
    for (std::size_t k = 0; k < n; ++k) gram.push_back(seq[i + k].text);
    ++counts[gram];
  }
  return counts;
}

namespace detail {

std::size_t clipped_ngram_matches(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b,
                                  std::size_t n) {
  if (n == 0) throw std::invalid_argument("ngram order must be >= 1");
  if (a.size() < n || b.size() < n) return 0;

  if (n <= 2) {
    auto key = [n](std::span<const std::uint32_t> s, std::size_t i) -> std::uint64_t {
      return n == 1 ? s[i] : (static_cast<std::uint64_t>(s[i]) << 32) | s[i + 1];
    };
    std::unordered_map<std::uint64_t, std::int64_t> remaining;
    remaining.reserve(b.size());
    for (std::size_t i = 0; i + n <= b.size(); ++i) ++remaining[key(b, i)];
    std::size_t match = 0;
    for (std::size_t i = 0; i + n <= a.size(); ++i) {
      auto it = remaining.find(key(a, i));
      if (it != remaining.end() && it->second > 0) {
        --it->second;
        ++match;
      }
    }
    return match;
  }

  std::unordered_map<std::vector<std::uint32_t>, std::int64_t, VectorHash> remaining;
  for (std::size_t i = 0; i + n <= b.size(); ++i) ++remaining[{b.begin() + i, b.begin() + i + n}];
  std::size_t match = 0;
  for (std::size_t i = 0; i + n <= a.size(); ++i) {
    auto it = remaining.find({a.begin() + i, a.begin() + i + n});
    if (it != remaining.end() && it->second > 0) {
      --it->second;
      ++match;
    }
  }
  return match;
}

std::size_t lcs_length_ids(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
  // One DP row sized by the shorter sequence.
  if (a.size() < b.size()) std::swap(a, b);
  if (b.empty()) return 0;
  std::vector<std::size_t> row(b.size() + 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::size_t diag = 0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      const std::size_t up = row[j + 1];
      row[j + 1] = a[i] == b[j] ? diag + 1 : std::max(up, row[j]);
      diag = up;
    }
  }
  return row.back();
}

}  // namespace detail

RougeScore rouge_n(const TokenSequence& candidate, const TokenSequence& reference, std::size_t n) {
  if (n == 0) throw std::invalid_argument("ngram order must be >= 1");
  const Interned ids = intern_pair(candidate, reference);
  const std::size_t match = detail::clipped_ngram_matches(ids.candidate, ids.reference, n);
  return RougeScore::from_counts(match, window_count(candidate.size(), n),
                                 window_count(reference.size(), n));
}

std::size_t lcs_length(const TokenSequence& a, const TokenSequence& b) {
  const Interned ids = intern_pair(a, b);
  return detail::lcs_length_ids(ids.candidate, ids.reference);
}

RougeScore rouge_l(const TokenSequence& candidate, const TokenSequence& reference) {
  return RougeScore::from_counts(lcs_length(candidate, reference), candidate.size(), reference.size());
}

ExampleScores score_tokens(const TokenSequence& candidate, const TokenSequence& reference) {
  const Interned ids = intern_pair(candidate, reference);
  const std::size_t c = candidate.size();
  const std::size_t r = reference.size();
  ExampleScores out;
  out[MetricKind::RougeRaw1] = RougeScore::from_counts(
      detail::clipped_ngram_matches(ids.candidate, ids.reference, 1), c, r);
  out[MetricKind::RougeRaw2] = RougeScore::from_counts(
      detail::clipped_ngram_matches(ids.candidate, ids.reference, 2), window_count(c, 2),
      window_count(r, 2));
  out[MetricKind::RougeRawL] =
      RougeScore::from_counts(detail::lcs_length_ids(ids.candidate, ids.reference), c, r);
  return out;
}

ExampleScores score_example(std::string_view candidate_text, std::string_view reference_text) {
  return score_tokens(tokenize_raw(candidate_text), tokenize_raw(reference_text));
}

RougeReport aggregate(std::span<const ExampleScores> per_example) {
  if (per_example.empty()) throw std::invalid_argument("cannot aggregate an empty score list");
  RougeReport report;
  report.example_count = per_example.size();
  const auto count = static_cast<double>(per_example.size());
  for (MetricKind kind : kAllMetrics) {
    double p = 0.0, r = 0.0, f = 0.0;
    for (const auto& ex : per_example) {
      p += ex[kind].precision;
      r += ex[kind].recall;
      f += ex[kind].f1;
    }
    report.per_metric[kind] = RougeScore{p / count, r / count, f / count};
  }
  return report;
}

}  // namespace czsum
