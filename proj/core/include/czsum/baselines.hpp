#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace czsum {

/// Parameters of the weighted PageRank iteration and the extract length.
struct TextRankConfig {
  double damping = 0.85;
  double convergence_tol = 1e-6;
  int max_iterations = 100;
  std::size_t sentence_count = 3;

  /// Throws std::invalid_argument unless 0 < damping < 1, tol > 0,
  /// max_iterations >= 1 and sentence_count >= 1.
  void validate() const;
};

/// Dense symmetric similarity matrix over sentences; zero diagonal.
class SentenceGraph {
 public:
  explicit SentenceGraph(std::size_t nodes = 0) : n_(nodes), w_(nodes * nodes, 0.0) {}

  std::size_t size() const noexcept { return n_; }
  double weight(std::size_t i, std::size_t j) const { return w_[i * n_ + j]; }
  void set_weight(std::size_t i, std::size_t j, double w) { w_[i * n_ + j] = w; }
  /// Sets (i,j) and (j,i).
  void set_symmetric(std::size_t i, std::size_t j, double w) {
    set_weight(i, j, w);
    set_weight(j, i, w);
  }

 private:
  std::size_t n_;
  std::vector<double> w_;
};

/// weight(i,j) = |shared word/number token types| /
///               (log(1 + |tokens_i|) + log(1 + |tokens_j|)),
/// counting word/number tokens only.
SentenceGraph build_sentence_graph(std::span<const std::string> sentences);

/// Weighted PageRank by power iteration. Nodes without outgoing weight
/// spread their mass uniformly. Stops once the L1 change between sweeps
/// drops below `convergence_tol` or after `max_iterations`. The result
/// sums to 1.
std::vector<double> pagerank(const SentenceGraph& graph, const TextRankConfig& config);

/// The first min(k, available) sentences, joined by single spaces.
std::string first_baseline(std::string_view source, std::size_t k = 3);

/// k distinct sentences drawn uniformly without replacement, emitted in
/// document order. The draw is a partial Fisher-Yates shuffle over
/// std::mt19937_64 (seeded with `seed`), reducing each 64-bit output to
/// [0, m) by rejection of the low 2^64 mod m values, then x mod m. Both
/// pieces are fully specified, so seeds reproduce across platforms.
std::string random_baseline(std::string_view source, std::size_t k, std::uint64_t seed);

/// Indices of the k highest-scoring sentences (ties to the earlier
/// sentence), returned in document order.
std::vector<std::size_t> textrank_select(std::span<const std::string> sentences, const TextRankConfig& config);

std::string textrank_baseline(std::string_view source, const TextRankConfig& config = {});

}  // namespace czsum
