#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "czsum/tokenize.hpp"

namespace czsum {

enum class MetricKind { RougeRaw1 = 0, RougeRaw2 = 1, RougeRawL = 2 };

inline constexpr std::array<MetricKind, 3> kAllMetrics = {
    MetricKind::RougeRaw1, MetricKind::RougeRaw2, MetricKind::RougeRawL};

/// Stable identifier used in JSON files ("rouge_raw_1", ...).
std::string_view metric_key(MetricKind kind) noexcept;
/// Column group label used in rendered tables ("ROUGE_RAW-1", ...).
std::string_view metric_label(MetricKind kind) noexcept;

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  /// Builds a score from P and R; F is their harmonic mean, 0 when P+R=0.
  static RougeScore from_pr(double precision, double recall) noexcept;
  /// match/cand and match/ref with 0/0 defined as 0.
  static RougeScore from_counts(std::size_t match, std::size_t candidate_total,
                                std::size_t reference_total) noexcept;

  friend bool operator==(const RougeScore&, const RougeScore&) = default;
};

/// One RougeScore per MetricKind, indexed by the enum value.
struct ExampleScores {
  std::array<RougeScore, 3> scores{};

  RougeScore& operator[](MetricKind k) { return scores[static_cast<std::size_t>(k)]; }
  const RougeScore& operator[](MetricKind k) const { return scores[static_cast<std::size_t>(k)]; }
};

struct RougeReport {
  ExampleScores per_metric;
  std::size_t example_count = 0;
};

using Ngram = std::vector<std::string>;
using NgramCounts = std::map<Ngram, std::size_t>;

/// All contiguous n-token windows with multiplicities.
/// Throws std::invalid_argument when n == 0.
NgramCounts ngram_counts(const TokenSequence& seq, std::size_t n);

RougeScore rouge_n(const TokenSequence& candidate, const TokenSequence& reference, std::size_t n);
std::size_t lcs_length(const TokenSequence& a, const TokenSequence& b);
RougeScore rouge_l(const TokenSequence& candidate, const TokenSequence& reference);

/// Tokenizes both texts with tokenize_raw and computes all three metrics.
ExampleScores score_example(std::string_view candidate_text, std::string_view reference_text);
ExampleScores score_tokens(const TokenSequence& candidate, const TokenSequence& reference);

/// Macro average: mean of per-example P, R and F, summed in index order.
/// Throws std::invalid_argument on an empty list.
RougeReport aggregate(std::span<const ExampleScores> per_example);

namespace detail {
// Integer-id kernels shared by the public entry points.
std::size_t clipped_ngram_matches(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b,
                                  std::size_t n);
std::size_t lcs_length_ids(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b);
}  // namespace detail

}  // namespace czsum
