#include "czsum/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include "czsum/tokenize.hpp"

namespace czsum {
namespace {

std::vector<std::string> sentence_texts(std::string_view source) {
  std::vector<std::string> out;
  for (auto& s : split_sentences(source)) out.push_back(std::move(s.text));
  return out;
}

std::string join_selected(const std::vector<std::string>& sentences, const std::vector<std::size_t>& picks) {
  std::string out;
  for (std::size_t i : picks) {
    if (!out.empty()) out += ' ';
    out += sentences[i];
  }
  return out;
}

std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t range) {
  const std::uint64_t threshold = (0 - range) % range;
  for (;;) {
    const std::uint64_t x = rng();
    if (x >= threshold) return x % range;
  }
}

}  // namespace

void TextRankConfig::validate() const {
  if (!(damping > 0.0 && damping < 1.0)) throw std::invalid_argument("damping must lie in (0, 1)");
  if (!(convergence_tol > 0.0)) throw std::invalid_argument("convergence_tol must be > 0");
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
  if (sentence_count < 1) throw std::invalid_argument("sentence_count must be >= 1");
}

SentenceGraph build_sentence_graph(std::span<const std::string> sentences) {
  const std::size_t n = sentences.size();
  std::vector<std::set<std::string>> types(n);
  std::vector<double> norm(n);
  for (std::size_t i = 0; i < n; ++i) {
    const TokenSequence seq = tokenize_raw(sentences[i]);
    std::size_t words = 0;
    for (const auto& tok : seq) {
      if (!tok.is_word_like()) continue;
      ++words;
      types[i].insert(tok.text);
    }
    norm[i] = std::log1p(static_cast<double>(words));
  }

  SentenceGraph graph(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double denom = norm[i] + norm[j];
      if (denom <= 0.0) continue;
      std::size_t shared = 0;
      auto a = types[i].begin();
      auto b = types[j].begin();
      while (a != types[i].end() && b != types[j].end()) {
        if (*a < *b) {
          ++a;
        } else if (*b < *a) {
          ++b;
        } else {
          ++shared;
          ++a;
          ++b;
        }
      }
      if (shared) graph.set_symmetric(i, j, static_cast<double>(shared) / denom);
    }
  }
  return graph;
}

std::vector<double> pagerank(const SentenceGraph& graph, const TextRankConfig& config) {
  config.validate();
  const std::size_t n = graph.size();
  if (n == 0) return {};
  if (n == 1) return {1.0};

  const double d = config.damping;
  const double base = (1.0 - d) / static_cast<double>(n);
  std::vector<double> out_weight(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) out_weight[j] += graph.weight(j, k);
  }

  std::vector<double> score(n, 1.0 / static_cast<double>(n));
  std::vector<double> next(n);
  for (int iter = 0; iter < config.max_iterations; ++iter) {
    double dangling = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (out_weight[j] <= 0.0) dangling += score[j];
    }
    const double spread = d * dangling / static_cast<double>(n);
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double inflow = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double w = graph.weight(j, i);
        if (w > 0.0) inflow += w * score[j] / out_weight[j];
      }
      next[i] = base + d * inflow + spread;
      change += std::abs(next[i] - score[i]);
    }
    score.swap(next);
    if (change < config.convergence_tol) break;
  }
  const double total = std::accumulate(score.begin(), score.end(), 0.0);
  for (double& s : score) s /= total;
  return score;
}

std::string first_baseline(std::string_view source, std::size_t k) {
  const auto sentences = sentence_texts(source);
  std::vector<std::size_t> picks(std::min(k, sentences.size()));
  std::iota(picks.begin(), picks.end(), 0);
  return join_selected(sentences, picks);
}

std::string random_baseline(std::string_view source, std::size_t k, std::uint64_t seed) {
  const auto sentences = sentence_texts(source);
  const std::size_t n = sentences.size();
  const std::size_t take = std::min(k, n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < take; ++i) {
    const auto j = i + static_cast<std::size_t>(bounded(rng, n - i));
    std::swap(order[i], order[j]);
  }
  order.resize(take);
  std::sort(order.begin(), order.end());
  return join_selected(sentences, order);
}

std::vector<std::size_t> textrank_select(std::span<const std::string> sentences, const TextRankConfig& config) {
  config.validate();
  const std::size_t n = sentences.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (n <= config.sentence_count) return order;

  // Scores are compared at 1e-12 resolution so summation-order noise
  // cannot reorder structurally tied sentences.
  const auto scores = pagerank(build_sentence_graph(sentences), config);
  std::vector<double> keys(n);
  for (std::size_t i = 0; i < n; ++i) keys[i] = std::round(scores[i] * 1e12);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return keys[a] > keys[b]; });
  order.resize(config.sentence_count);
  std::sort(order.begin(), order.end());
  return order;
}

std::string textrank_baseline(std::string_view source, const TextRankConfig& config) {
  const auto sentences = sentence_texts(source);
  return join_selected(sentences, textrank_select(sentences, config));
}

}  // namespace czsum
