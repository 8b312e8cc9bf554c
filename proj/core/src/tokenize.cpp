#include "czsum/tokenize.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <cstdint>

namespace czsum {
namespace {

struct CodePoint {
  UChar32 value;  // negative for ill-formed input
  std::size_t begin;
  std::size_t end;
};

CodePoint decode_at(std::string_view text, std::size_t pos) {
  const auto* s = reinterpret_cast<const uint8_t*>(text.data());
  int32_t i = static_cast<int32_t>(pos);
  const auto length = static_cast<int32_t>(text.size());
  UChar32 c = 0;
  U8_NEXT(s, i, length, c);
  return {c, pos, static_cast<std::size_t>(i)};
}

bool is_space(UChar32 c) { return c >= 0 && u_isUWhiteSpace(c); }
bool is_alpha(UChar32 c) { return c >= 0 && u_isUAlphabetic(c); }
bool is_digit(UChar32 c) { return c >= 0 && u_charType(c) == U_DECIMAL_DIGIT_NUMBER; }

void append_utf8(std::string& out, UChar32 c) {
  char buf[U8_MAX_LENGTH];
  int32_t n = 0;
  U8_APPEND_UNSAFE(buf, n, c);
  out.append(buf, static_cast<std::size_t>(n));
}

bool is_terminal(UChar32 c) { return c == '.' || c == '!' || c == '?' || c == 0x2026; }

bool is_closer(UChar32 c) {
  if (c == '"' || c == '\'' || c == 0x201C || c == 0x2018) return true;
  const auto type = u_charType(c);
  return type == U_END_PUNCTUATION || type == U_FINAL_PUNCTUATION;
}

bool is_sentence_opener(UChar32 c) {
  if (c < 0) return false;
  if (u_isUUppercase(c) || u_istitle(c)) return true;
  if (c == '"' || c == '\'') return true;
  const auto type = u_charType(c);
  return type == U_START_PUNCTUATION || type == U_INITIAL_PUNCTUATION;
}

}  // namespace

std::vector<std::string> TokenSequence::texts() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.text);
  return out;
}

TokenSequence tokenize_raw(std::string_view text) {
  TokenSequence seq;
  std::size_t pos = 0;
  bool in_span = false;
  while (pos < text.size()) {
    CodePoint cp = decode_at(text, pos);
    if (is_space(cp.value)) {
      in_span = false;
      pos = cp.end;
      continue;
    }
    if (!in_span) {
      ++seq.source_span_count;
      in_span = true;
    }

    Token tok;
    tok.offset = cp.begin;
    if (is_alpha(cp.value)) {
      tok.kind = TokenKind::Word;
      while (is_alpha(cp.value)) {
        append_utf8(tok.text, u_foldCase(cp.value, U_FOLD_CASE_DEFAULT));
        pos = cp.end;
        if (pos >= text.size()) break;
        cp = decode_at(text, pos);
      }
    } else if (is_digit(cp.value)) {
      tok.kind = TokenKind::Number;
      while (is_digit(cp.value)) {
        tok.text.append(text.substr(cp.begin, cp.end - cp.begin));
        pos = cp.end;
        if (pos >= text.size()) break;
        cp = decode_at(text, pos);
      }
    } else {
      tok.kind = TokenKind::Punct;
      tok.text.assign(text.substr(cp.begin, cp.end - cp.begin));
      pos = cp.end;
    }
    tok.length = pos - tok.offset;
    seq.tokens.push_back(std::move(tok));
  }
  return seq;
}

std::vector<Sentence> split_sentences(std::string_view text) {
  const TokenSequence seq = tokenize_raw(text);
  const auto& toks = seq.tokens;
  const std::size_t n = toks.size();
  std::vector<Sentence> out;

  auto first_cp = [&](std::size_t i) { return decode_at(text, toks[i].offset).value; };
  auto adjacent = [&](std::size_t a, std::size_t b) {
    return toks[a].offset + toks[a].length == toks[b].offset;
  };
  auto emit = [&](std::size_t start, std::size_t end) {
    Sentence s;
    s.start_token = start;
    s.end_token = end;
    s.begin = toks[start].offset;
    s.end = toks[end - 1].offset + toks[end - 1].length;
    s.text.assign(text.substr(s.begin, s.end - s.begin));
    out.push_back(std::move(s));
  };

  std::size_t start = 0;
  std::size_t i = 0;
  while (i < n) {
    if (toks[i].kind != TokenKind::Punct || !is_terminal(first_cp(i))) {
      ++i;
      continue;
    }
    std::size_t last = i;
    bool only_period = toks[i].text == ".";
    while (last + 1 < n && adjacent(last, last + 1)) {
      const UChar32 c = first_cp(last + 1);
      if (toks[last + 1].kind != TokenKind::Punct || !(is_terminal(c) || is_closer(c))) break;
      if (is_terminal(c)) only_period = false;
      ++last;
    }
    const std::size_t next = last + 1;
    bool boundary = next < n && !adjacent(last, next) && is_sentence_opener(first_cp(next));
    if (boundary && only_period && i > start + 1 && adjacent(i - 1, i)) {
      const Token& prev = toks[i - 1];
      const CodePoint cp = decode_at(text, prev.offset);
      if (prev.kind == TokenKind::Word && cp.end == prev.offset + prev.length) boundary = false;
    }
    if (boundary) {
      emit(start, next);
      start = next;
    }
    i = next;
  }
  if (start < n) emit(start, n);
  return out;
}

bool is_blank(std::string_view text) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    const CodePoint cp = decode_at(text, pos);
    if (!is_space(cp.value)) return false;
    pos = cp.end;
  }
  return true;
}

std::size_t count_sentences(std::string_view text) { return split_sentences(text).size(); }

std::size_t count_words(const TokenSequence& seq) noexcept {
  std::size_t n = 0;
  for (const auto& t : seq.tokens) n += t.is_word_like() ? 1 : 0;
  return n;
}

}  // namespace czsum
