#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace czsum {

enum class TokenKind { Word, Number, Punct };

/// One raw token. `text` is case-folded; `offset`/`length` locate the
/// original bytes in the tokenized input.
struct Token {
  std::string text;
  TokenKind kind = TokenKind::Punct;
  std::size_t offset = 0;
  std::size_t length = 0;

  bool is_word_like() const noexcept { return kind != TokenKind::Punct; }
};

struct TokenSequence {
  std::vector<Token> tokens;
  // Number of maximal non-whitespace spans in the input.
  std::size_t source_span_count = 0;

  std::size_t size() const noexcept { return tokens.size(); }
  bool empty() const noexcept { return tokens.empty(); }
  const Token& operator[](std::size_t i) const { return tokens[i]; }
  auto begin() const noexcept { return tokens.begin(); }
  auto end() const noexcept { return tokens.end(); }

  std::vector<std::string> texts() const;
};

/// A sentence as a half-open token range [start_token, end_token) of the
/// sequence produced by tokenize_raw over the same text, plus the byte
/// range [begin, end) of its source text.
struct Sentence {
  std::string text;
  std::size_t start_token = 0;
  std::size_t end_token = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// Splits text into maximal alphabetic runs, maximal decimal-digit runs and
/// single other non-space code points. Alphabetic runs are simple-case-
/// folded; diacritics are kept. Ill-formed UTF-8 bytes become single
/// punctuation tokens holding the raw byte.
TokenSequence tokenize_raw(std::string_view text);

/// Rule-based sentence segmentation. A boundary follows a run of terminal
/// punctuation (. ! ? …), optionally closed by quotes or brackets, when
/// whitespace follows and the next token starts with an uppercase letter
/// or an opening quote/bracket. A period after a single-letter word is an
/// initial ("K. Novák") unless that letter opens the sentence.
std::vector<Sentence> split_sentences(std::string_view text);

std::size_t count_sentences(std::string_view text);

/// True when the text holds no non-whitespace code point.
bool is_blank(std::string_view text);

/// Number of word and number tokens (punctuation excluded).
std::size_t count_words(const TokenSequence& seq) noexcept;

}  // namespace czsum
