#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "elixa/text.hpp"

namespace elixa {

enum class LexSource : uint8_t { Liu = 0, OF = 1, GI = 2, SWN = 3, LLR = 4 };

const char* to_string(LexSource s);
LexSource lex_source_from_string(const std::string& s);

// lemma -> signed weight in [-1,1], nonzero; keys are lowercased.
struct PolarityLexicon {
  std::string name;
  std::unordered_map<std::string, double> entries;
  std::unordered_map<std::string, LexSource> source;

  std::optional<double> weight_of(const std::string& lemma) const {
    auto it = entries.find(lemma);
    if (it == entries.end()) return std::nullopt;
    return it->second;
  }
  size_t size() const { return entries.size(); }
};

enum class SourceKind : uint8_t { Liu, OF, GI, SWN };

// Raw annotations from one of the four source lexicons, before weight
// mapping. Categorical sources fill `categories`; SWN fills `scores`.
struct SourceLexicon {
  SourceKind kind = SourceKind::Liu;
  std::unordered_map<std::string, std::string> categories;
  std::unordered_map<std::string, std::pair<double, double>> scores;  // (pos, neg)
};

// 2x2 word-vs-corpus contingency counts: a/b = word tokens in the
// positive/negative corpus, c/d = all other tokens in each corpus.
struct ContingencyCell {
  double a = 0, b = 0, c = 0, d = 0;
};

// Category/score -> weight mapping. Throws std::invalid_argument on an
// unknown category.
double map_weight(SourceKind kind, const std::string& category);
double map_weight_swn(double pos_score, double neg_score);

// Highest-priority source wins per lemma: Liu > OF > GI > SWN.
// Zero-weight results are dropped.
PolarityLexicon merge_with_priority(const SourceLexicon& liu, const SourceLexicon& of,
                                    const SourceLexicon& gi, const SourceLexicon& swn,
                                    const std::string& name = "gen");

// Keeps entries with |weight| >= t.
PolarityLexicon restrict_by_threshold(const PolarityLexicon& lex, double t = 0.6);

// Signed Dunning G^2. Positive iff the word is relatively more frequent in
// the positive corpus. Throws std::invalid_argument when a+b < 1 or N <= 0.
double llr_score(const ContingencyCell& cell);

struct DomainLexiconOptions {
  size_t min_freq = 5;    // min total occurrences (a+b)
  size_t top_k = 2500;    // per polarity sign
  std::string name = "domain";
};

// Pulls rated reviews from `next` until it returns nullopt. Ratings 1-2
// count as negative, 4-5 as positive, 3 is discarded. Keyed by lowercased
// surface token. Throws DataError when either side of the corpus is empty.
PolarityLexicon build_domain_lexicon(const std::function<std::optional<RatedReview>()>& next,
                                     const DomainLexiconOptions& opts = {});

// Text format: lemma<TAB>weight<TAB>source, UTF-8.
void save_lexicon(const PolarityLexicon& lex, const std::string& path);
PolarityLexicon load_lexicon(const std::string& path, const std::string& name = "");

// word<TAB>category readers (Liu/OF/GI) and word<TAB>pos<TAB>neg (SWN).
SourceLexicon load_source_lexicon(SourceKind kind, const std::string& path);

}  // namespace elixa
