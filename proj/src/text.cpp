#include "elixa/text.hpp"

#include <algorithm>
#include <stdexcept>

#include "elixa/util.hpp"

namespace elixa {

namespace {

bool is_letter(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}
bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }
bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

char shape_class(unsigned char c) {
  if (c >= 'A' && c <= 'Z') return 'A';
  if (c >= 'a' && c <= 'z') return 'a';
  if (c >= '0' && c <= '9') return '0';
  return 'x';
}

Token make_token(const std::string& text, size_t start, size_t end) {
  Token t;
  t.surface = text.substr(start, end - start);
  t.lemma = lowercase(t.surface);
  t.pos = "UNK";
  t.start = start;
  t.end = end;
  return t;
}

}  // namespace

const char* to_string(BioTag tag) {
  switch (tag) {
    case BioTag::O: return "O";
    case BioTag::B: return "B";
    case BioTag::I: return "I";
  }
  return "?";
}

BioTag bio_from_string(const std::string& s) {
  if (s == "O") return BioTag::O;
  if (s == "B") return BioTag::B;
  if (s == "I") return BioTag::I;
  throw std::invalid_argument("unknown BIO tag: " + s);
}

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> tokens;
  size_t i = 0;
  const size_t n = text.size();
  while (i < n) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (is_space(c)) {
      ++i;
      continue;
    }
    size_t start = i;
    if (is_letter(c)) {
      while (i < n && is_letter(static_cast<unsigned char>(text[i]))) ++i;
    } else if (is_digit(c)) {
      while (i < n && is_digit(static_cast<unsigned char>(text[i]))) ++i;
    } else {
      ++i;  // single punctuation/symbol char
    }
    tokens.push_back(make_token(text, start, i));
  }
  return tokens;
}

std::string shape_of(const std::string& surface) {
  if (surface.empty()) throw std::invalid_argument("empty token");
  std::string shape;
  for (unsigned char c : surface) {
    char cls = shape_class(c);
    if (shape.empty() || shape.back() != cls) shape.push_back(cls);
  }
  return shape;
}

Span snap_to_tokens(const Span& span, const std::vector<Token>& tokens, bool* snapped) {
  if (snapped) *snapped = false;
  size_t new_start = std::string::npos;
  size_t new_end = std::string::npos;
  for (const Token& t : tokens) {
    if (t.start <= span.start && span.start < t.end) new_start = t.start;
  }
  if (new_start == std::string::npos) {
    // start falls between tokens: move to the next token's start
    for (const Token& t : tokens) {
      if (t.start >= span.start) {
        new_start = t.start;
        break;
      }
    }
  }
  for (const Token& t : tokens) {
    if (t.start < span.end && span.end <= t.end) new_end = t.end;
  }
  if (new_end == std::string::npos) {
    // end falls between tokens: move back to the previous token's end
    for (auto it = tokens.rbegin(); it != tokens.rend(); ++it) {
      if (it->end <= span.end) {
        new_end = it->end;
        break;
      }
    }
  }
  if (new_start == std::string::npos || new_end == std::string::npos || new_start >= new_end) {
    throw DataError("target span [" + std::to_string(span.start) + "," +
                    std::to_string(span.end) + ") covers no token");
  }
  Span out{new_start, new_end};
  if (snapped && !(out == span)) *snapped = true;
  return out;
}

std::vector<Span> merge_spans(std::vector<Span> spans) {
  std::sort(spans.begin(), spans.end());
  std::vector<Span> merged;
  for (const Span& s : spans) {
    if (!merged.empty() && s.start < merged.back().end) {
      merged.back().end = std::max(merged.back().end, s.end);
    } else {
      merged.push_back(s);
    }
  }
  return merged;
}

std::vector<BioTag> bio_encode(const Sentence& sentence) {
  std::vector<Span> spans;
  for (const Opinion& op : sentence.opinions) {
    if (op.target) spans.push_back(*op.target);
  }
  spans = merge_spans(std::move(spans));
  std::vector<BioTag> tags(sentence.tokens.size(), BioTag::O);
  for (const Span& s : spans) {
    bool first = true;
    for (size_t i = 0; i < sentence.tokens.size(); ++i) {
      const Token& t = sentence.tokens[i];
      if (t.start < s.end && t.end > s.start) {
        tags[i] = first ? BioTag::B : BioTag::I;
        first = false;
      }
    }
  }
  return tags;
}

std::vector<Span> bio_decode(const std::vector<BioTag>& tags, const std::vector<Token>& tokens) {
  std::vector<Span> spans;
  size_t n = std::min(tags.size(), tokens.size());
  size_t open = std::string::npos;  // index of the first token of the open span
  for (size_t i = 0; i < n; ++i) {
    BioTag tag = tags[i];
    if (tag == BioTag::I && open == std::string::npos) tag = BioTag::B;  // repair
    if (tag == BioTag::B) {
      if (open != std::string::npos) spans.push_back({tokens[open].start, tokens[i - 1].end});
      open = i;
    } else if (tag == BioTag::O) {
      if (open != std::string::npos) spans.push_back({tokens[open].start, tokens[i - 1].end});
      open = std::string::npos;
    }
    // BioTag::I with an open span extends it
  }
  if (open != std::string::npos) spans.push_back({tokens[open].start, tokens[n - 1].end});
  return spans;
}

}  // namespace elixa
