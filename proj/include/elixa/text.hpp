#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace elixa {

struct Token {
  std::string surface;
  std::string lemma;   // fallback: lowercased surface
  std::string pos;     // fallback: "UNK"
  size_t start = 0;    // byte offset, inclusive
  size_t end = 0;      // byte offset, exclusive
};

// Character span [start, end) into a sentence's text.
struct Span {
  size_t start = 0;
  size_t end = 0;
  friend bool operator==(const Span&, const Span&) = default;
  friend bool operator<(const Span& a, const Span& b) {
    return a.start != b.start ? a.start < b.start : a.end < b.end;
  }
};

struct Opinion {
  std::optional<Span> target;  // nullopt = null target
  std::string category;        // "ENTITY#ATTRIBUTE" or empty
  std::string polarity;        // positive/negative/neutral or empty (unlabeled)
};

struct Sentence {
  std::string id;
  std::string text;
  std::vector<Token> tokens;
  std::vector<Opinion> opinions;
};

struct RatedReview {
  std::string id;
  int rating = 0;  // 1..5
  std::string text;
};

enum class BioTag : uint8_t { O = 0, B = 1, I = 2 };

const char* to_string(BioTag tag);
BioTag bio_from_string(const std::string& s);

// Maximal letter runs, maximal digit runs, single other non-space chars.
// Bytes >= 0x80 count as letters so UTF-8 sequences stay in one token.
std::vector<Token> tokenize(const std::string& text);

// Per-char class map A/a/0/x with consecutive duplicates collapsed.
// Throws std::invalid_argument on empty input.
std::string shape_of(const std::string& surface);

// Expands a span outward to enclosing token boundaries (whitespace between
// tokens is trimmed to the adjacent token edge). Throws DataError when the
// span covers no token. Returns true via *snapped when the span moved.
Span snap_to_tokens(const Span& span, const std::vector<Token>& tokens, bool* snapped = nullptr);

// Union-merges overlapping spans; output sorted, non-overlapping.
std::vector<Span> merge_spans(std::vector<Span> spans);

std::vector<BioTag> bio_encode(const Sentence& sentence);
std::vector<Span> bio_decode(const std::vector<BioTag>& tags, const std::vector<Token>& tokens);

}  // namespace elixa
