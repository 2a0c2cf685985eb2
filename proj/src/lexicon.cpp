#include "elixa/lexicon.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <stdexcept>

#include "elixa/util.hpp"

namespace elixa {

const char* to_string(LexSource s) {
  switch (s) {
    case LexSource::Liu: return "Liu";
    case LexSource::OF: return "OF";
    case LexSource::GI: return "GI";
    case LexSource::SWN: return "SWN";
    case LexSource::LLR: return "LLR";
  }
  return "?";
}

LexSource lex_source_from_string(const std::string& s) {
  if (s == "Liu") return LexSource::Liu;
  if (s == "OF") return LexSource::OF;
  if (s == "GI") return LexSource::GI;
  if (s == "SWN") return LexSource::SWN;
  if (s == "LLR") return LexSource::LLR;
  throw std::invalid_argument("unknown lexicon source: " + s);
}

double map_weight(SourceKind kind, const std::string& category) {
  if (kind == SourceKind::GI) {
    if (category == "neg_+") return -0.8;
    if (category == "neg") return -0.6;
    if (category == "neg_-") return -0.2;
    if (category == "pos_-") return 0.2;
    if (category == "pos") return 0.6;
    if (category == "pos_+") return 0.8;
    throw std::invalid_argument("unknown GI category: " + category);
  }
  if (kind == SourceKind::Liu || kind == SourceKind::OF) {
    if (category == "neg") return -0.7;
    if (category == "pos") return 0.7;
    throw std::invalid_argument("unknown polarity category: " + category);
  }
  throw std::invalid_argument("SWN entries carry scores, not categories");
}

double map_weight_swn(double pos_score, double neg_score) { return pos_score - neg_score; }

namespace {

struct MappedEntry {
  double weight;
  LexSource source;
};

void collect(const SourceLexicon& lex, LexSource tag,
             std::unordered_map<std::string, MappedEntry>& out) {
  if (lex.kind == SourceKind::SWN) {
    for (const auto& [word, pn] : lex.scores) {
      std::string key = lowercase(word);
      if (out.count(key)) continue;  // higher priority already present
      double w = map_weight_swn(pn.first, pn.second);
      if (w != 0.0) out.emplace(std::move(key), MappedEntry{w, tag});
    }
  } else {
    for (const auto& [word, cat] : lex.categories) {
      std::string key = lowercase(word);
      if (out.count(key)) continue;
      double w = map_weight(lex.kind, cat);
      if (w != 0.0) out.emplace(std::move(key), MappedEntry{w, tag});
    }
  }
}

}  // namespace

PolarityLexicon merge_with_priority(const SourceLexicon& liu, const SourceLexicon& of,
                                    const SourceLexicon& gi, const SourceLexicon& swn,
                                    const std::string& name) {
  std::unordered_map<std::string, MappedEntry> merged;
  collect(liu, LexSource::Liu, merged);
  collect(of, LexSource::OF, merged);
  collect(gi, LexSource::GI, merged);
  collect(swn, LexSource::SWN, merged);

  PolarityLexicon out;
  out.name = name;
  for (auto& [lemma, e] : merged) {
    out.entries.emplace(lemma, e.weight);
    out.source.emplace(lemma, e.source);
  }
  return out;
}

PolarityLexicon restrict_by_threshold(const PolarityLexicon& lex, double t) {
  if (t <= 0) throw std::invalid_argument("threshold must be > 0");
  PolarityLexicon out;
  out.name = lex.name + "res";
  for (const auto& [lemma, w] : lex.entries) {
    if (std::fabs(w) >= t) {
      out.entries.emplace(lemma, w);
      auto it = lex.source.find(lemma);
      if (it != lex.source.end()) out.source.emplace(lemma, it->second);
    }
  }
  return out;
}

double llr_score(const ContingencyCell& cell) {
  const double a = cell.a, b = cell.b, c = cell.c, d = cell.d;
  if (a < 0 || b < 0 || c < 0 || d < 0) throw std::invalid_argument("negative count");
  const double n = a + b + c + d;
  if (a + b < 1) throw std::invalid_argument("word count a+b must be >= 1");
  if (n <= 0) throw std::invalid_argument("empty table");

  const double pos_total = a + c;
  const double neg_total = b + d;
  const double p_pos = pos_total > 0 ? a / pos_total : 0.0;
  const double p_neg = neg_total > 0 ? b / neg_total : 0.0;
  if (p_pos == p_neg) return 0.0;

  auto term = [&](double obs, double row, double col) {
    if (obs == 0.0) return 0.0;  // 0*ln(0/E) := 0
    return obs * std::log(obs * n / (row * col));
  };
  double g2 = 2.0 * (term(a, a + b, pos_total) + term(b, a + b, neg_total) +
                     term(c, c + d, pos_total) + term(d, c + d, neg_total));
  return p_pos > p_neg ? g2 : -g2;
}

PolarityLexicon build_domain_lexicon(const std::function<std::optional<RatedReview>()>& next,
                                     const DomainLexiconOptions& opts) {
  std::unordered_map<std::string, std::pair<uint64_t, uint64_t>> counts;  // (pos, neg)
  uint64_t pos_total = 0, neg_total = 0;
  while (auto review = next()) {
    if (review->rating == 3) continue;
    bool positive = review->rating >= 4;
    for (const Token& tok : tokenize(review->text)) {
      auto& cnt = counts[tok.lemma];  // lemma is the lowercased surface
      if (positive) {
        ++cnt.first;
        ++pos_total;
      } else {
        ++cnt.second;
        ++neg_total;
      }
    }
  }
  if (pos_total == 0 || neg_total == 0) throw DataError("one-sided corpus");

  struct Scored {
    std::string word;
    double score;
  };
  std::vector<Scored> positives, negatives;
  for (const auto& [word, cnt] : counts) {
    uint64_t freq = cnt.first + cnt.second;
    if (freq < opts.min_freq) continue;
    ContingencyCell cell;
    cell.a = static_cast<double>(cnt.first);
    cell.b = static_cast<double>(cnt.second);
    cell.c = static_cast<double>(pos_total - cnt.first);
    cell.d = static_cast<double>(neg_total - cnt.second);
    double s = llr_score(cell);
    if (s > 0)
      positives.push_back({word, s});
    else if (s < 0)
      negatives.push_back({word, s});
  }
  auto top_k = [&](std::vector<Scored>& v) {
    std::sort(v.begin(), v.end(), [](const Scored& x, const Scored& y) {
      double ax = std::fabs(x.score), ay = std::fabs(y.score);
      return ax != ay ? ax > ay : x.word < y.word;
    });
    if (v.size() > opts.top_k) v.resize(opts.top_k);
  };
  top_k(positives);
  top_k(negatives);

  double max_abs = 0.0;
  for (const auto& s : positives) max_abs = std::max(max_abs, std::fabs(s.score));
  for (const auto& s : negatives) max_abs = std::max(max_abs, std::fabs(s.score));

  PolarityLexicon out;
  out.name = opts.name;
  if (max_abs == 0.0) return out;
  for (const auto& s : positives) {
    out.entries.emplace(s.word, s.score / max_abs);
    out.source.emplace(s.word, LexSource::LLR);
  }
  for (const auto& s : negatives) {
    out.entries.emplace(s.word, s.score / max_abs);
    out.source.emplace(s.word, LexSource::LLR);
  }
  return out;
}

void save_lexicon(const PolarityLexicon& lex, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write lexicon file: " + path);
  std::map<std::string, double> sorted(lex.entries.begin(), lex.entries.end());
  char buf[64];
  for (const auto& [lemma, w] : sorted) {
    std::snprintf(buf, sizeof(buf), "%.9g", w);
    auto it = lex.source.find(lemma);
    const char* src = it != lex.source.end() ? to_string(it->second) : "LLR";
    out << lemma << '\t' << buf << '\t' << src << '\n';
  }
}

PolarityLexicon load_lexicon(const std::string& path, const std::string& name) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open lexicon file: " + path);
  PolarityLexicon lex;
  lex.name = name;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    chomp(line);
    if (line.empty()) continue;
    auto fields = split(line, '\t');
    if (fields.size() != 3) {
      throw DataError(path + ":" + std::to_string(lineno) + ": expected lemma<TAB>weight<TAB>source");
    }
    char* endp = nullptr;
    double w = std::strtod(fields[1].c_str(), &endp);
    if (endp == fields[1].c_str() || *endp != '\0') {
      throw DataError(path + ":" + std::to_string(lineno) + ": bad weight '" + fields[1] + "'");
    }
    std::string key = lowercase(fields[0]);
    lex.entries[key] = w;
    lex.source[key] = lex_source_from_string(fields[2]);
  }
  return lex;
}

SourceLexicon load_source_lexicon(SourceKind kind, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open source lexicon: " + path);
  SourceLexicon lex;
  lex.kind = kind;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    chomp(line);
    if (line.empty()) continue;
    auto fields = split(line, '\t');
    if (kind == SourceKind::SWN) {
      if (fields.size() != 3) {
        throw DataError(path + ":" + std::to_string(lineno) + ": expected word<TAB>pos<TAB>neg");
      }
      double pos = std::strtod(fields[1].c_str(), nullptr);
      double neg = std::strtod(fields[2].c_str(), nullptr);
      if (pos < 0 || pos > 1 || neg < 0 || neg > 1) {
        throw DataError(path + ":" + std::to_string(lineno) + ": SWN scores must be in [0,1]");
      }
      lex.scores[lowercase(fields[0])] = {pos, neg};
    } else {
      if (fields.size() != 2) {
        throw DataError(path + ":" + std::to_string(lineno) + ": expected word<TAB>category");
      }
      lex.categories[lowercase(fields[0])] = fields[1];
    }
  }
  return lex;
}

}  // namespace elixa
