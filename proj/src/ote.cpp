#include "elixa/ote.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include "elixa/util.hpp"
#include "json.hpp"

namespace elixa {

namespace {

const std::string kPrevStrings[4] = {"prev=O", "prev=B", "prev=I", "prev=∅"};

const std::string& prev_feature(const std::optional<BioTag>& prev) {
  return prev ? kPrevStrings[static_cast<size_t>(*prev)] : kPrevStrings[3];
}

void context_features(const std::vector<Token>& tokens, size_t position,
                      const OteFeatureConfig& cfg, std::vector<std::string>& out) {
  int n = static_cast<int>(tokens.size());
  int p = static_cast<int>(position);
  if (p == 0) out.push_back("bos");
  for (int d = -cfg.window; d <= cfg.window; ++d) {
    int j = p + d;
    if (j < 0 || j >= n) continue;
    out.push_back("w" + std::to_string(d) + "=" + lowercase(tokens[j].surface));
    out.push_back("sh" + std::to_string(d) + "=" + shape_of(tokens[j].surface));
  }
  std::string cur = lowercase(tokens[p].surface);
  int len = static_cast<int>(cur.size());
  for (int j = 1; j <= cfg.prefix_len && j <= len; ++j) {
    out.push_back("pre" + std::to_string(j) + "=" + cur.substr(0, j));
  }
  for (int j = 1; j <= cfg.suffix_len && j <= len; ++j) {
    out.push_back("suf" + std::to_string(j) + "=" + cur.substr(len - j));
  }
  if (cfg.bigrams) {
    for (int d = -1; d <= 0; ++d) {
      int a = p + d;
      if (a < 0 || a + 1 >= n) continue;
      out.push_back("wb" + std::to_string(d) + "=" + lowercase(tokens[a].surface) + "|" +
                    lowercase(tokens[a + 1].surface));
      out.push_back("shb" + std::to_string(d) + "=" + shape_of(tokens[a].surface) + "|" +
                    shape_of(tokens[a + 1].surface));
    }
  }
  if (cfg.trigrams) {
    for (int d = -2; d <= 0; ++d) {
      int a = p + d;
      if (a < 0 || a + 2 >= n) continue;
      out.push_back("wt" + std::to_string(d) + "=" + lowercase(tokens[a].surface) + "|" +
                    lowercase(tokens[a + 1].surface) + "|" + lowercase(tokens[a + 2].surface));
      out.push_back("sht" + std::to_string(d) + "=" + shape_of(tokens[a].surface) + "|" +
                    shape_of(tokens[a + 1].surface) + "|" + shape_of(tokens[a + 2].surface));
    }
  }
}

std::optional<std::string> lookup_class(const ClusterLexicon& lex, const Token& tok) {
  auto c = lex.class_of(tok.surface);
  if (!c) c = lex.class_of(lowercase(tok.surface));
  return c;
}

// Everything the score of one position depends on except the previous label.
std::vector<std::string> static_features(const std::vector<Token>& tokens, size_t position,
                                         const OteFeatureConfig& cfg) {
  std::vector<std::string> out;
  context_features(tokens, position, cfg, out);
  auto clusters = cluster_features(tokens, position, cfg);
  out.insert(out.end(), std::make_move_iterator(clusters.begin()),
             std::make_move_iterator(clusters.end()));
  return out;
}

struct Hypothesis {
  double score = 0.0;
  std::vector<BioTag> tags;
};

template <class Lookup>
std::vector<BioTag> beam_decode(const std::vector<std::vector<std::string>>& statics, int beam,
                                Lookup&& lookup) {
  std::vector<Hypothesis> hyps{{0.0, {}}};
  std::vector<Hypothesis> cands;
  for (const auto& feats : statics) {
    double s[3] = {0.0, 0.0, 0.0};
    for (const auto& f : feats) {
      if (const std::array<double, 3>* w = lookup(f)) {
        s[0] += (*w)[0];
        s[1] += (*w)[1];
        s[2] += (*w)[2];
      }
    }
    cands.clear();
    for (const auto& h : hyps) {
      std::optional<BioTag> prev;
      if (!h.tags.empty()) prev = h.tags.back();
      const std::array<double, 3>* pw = lookup(prev_feature(prev));
      for (int l = 0; l < 3; ++l) {
        if (l == static_cast<int>(BioTag::I) && (!prev || *prev == BioTag::O)) continue;
        Hypothesis next;
        next.score = h.score + s[l] + (pw ? (*pw)[l] : 0.0);
        next.tags = h.tags;
        next.tags.push_back(static_cast<BioTag>(l));
        cands.push_back(std::move(next));
      }
    }
    std::sort(cands.begin(), cands.end(), [](const Hypothesis& a, const Hypothesis& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.tags < b.tags;
    });
    if (cands.size() > static_cast<size_t>(beam)) cands.resize(beam);
    hyps = cands;
  }
  return hyps.empty() ? std::vector<BioTag>{} : hyps.front().tags;
}

std::string escape_field(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '\\') {
      out += "\\\\";
    } else if (c == '\t') {
      out += "\\t";
    } else if (c == '\n') {
      out += "\\n";
    } else {
      out += c;
    }
  }
  return out;
}

std::string unescape_field(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) {
      char n = s[++i];
      if (n == 't') {
        out += '\t';
      } else if (n == 'n') {
        out += '\n';
      } else {
        out += n;
      }
    } else {
      out += s[i];
    }
  }
  return out;
}

}  // namespace

std::vector<std::string> local_features(const std::vector<Token>& tokens, size_t position,
                                        const std::optional<BioTag>& previous,
                                        const OteFeatureConfig& config) {
  if (position >= tokens.size()) throw std::out_of_range("local_features: position");
  std::vector<std::string> out;
  context_features(tokens, position, config, out);
  out.push_back(prev_feature(previous));
  return out;
}

std::vector<std::string> cluster_features(const std::vector<Token>& tokens, size_t position,
                                          const OteFeatureConfig& config) {
  std::vector<std::string> out;
  if (config.constrained || config.clusters.empty()) return out;
  if (position >= tokens.size()) throw std::out_of_range("cluster_features: position");
  int n = static_cast<int>(tokens.size());
  int p = static_cast<int>(position);
  for (const auto& named : config.clusters) {
    const ClusterLexicon& lex = named.lexicon;
    if (auto c = lookup_class(lex, tokens[p])) {
      if (lex.kind == ClusterKind::Brown) {
        for (const auto& pre : brown_prefixes(*c)) out.push_back(named.name + "=" + pre);
      } else {
        out.push_back(named.name + "=" + *c);
      }
    }
    if (lex.kind != ClusterKind::Brown) continue;
    // Brown paths also stand in for the windowed token features.
    for (int d = -config.window; d <= config.window; ++d) {
      int j = p + d;
      if (j < 0 || j >= n) continue;
      if (auto c = lookup_class(lex, tokens[j])) {
        for (const auto& pre : brown_prefixes(*c)) {
          out.push_back(named.name + "w" + std::to_string(d) + "=" + pre);
        }
      }
    }
  }
  return out;
}

std::vector<BioTag> decode(const SequenceModel& model, const std::vector<Token>& tokens) {
  if (model.beam < 1) throw std::invalid_argument("decode: beam must be >= 1");
  std::vector<std::vector<std::string>> statics(tokens.size());
  for (size_t i = 0; i < tokens.size(); ++i) statics[i] = static_features(tokens, i, model.config);
  return beam_decode(statics, model.beam,
                     [&model](const std::string& f) -> const std::array<double, 3>* {
                       auto it = model.weights.find(f);
                       return it == model.weights.end() ? nullptr : &it->second;
                     });
}

SequenceModel train_perceptron(const std::vector<Sentence>& sentences,
                               const OteFeatureConfig& config, int epochs, uint64_t seed,
                               int beam) {
  if (sentences.empty()) throw std::invalid_argument("train_perceptron: empty training set");
  if (epochs < 0) throw std::invalid_argument("train_perceptron: negative epochs");
  if (beam < 1) throw std::invalid_argument("train_perceptron: beam must be >= 1");

  size_t n = sentences.size();
  std::vector<std::vector<BioTag>> gold(n);
  std::vector<std::vector<std::vector<std::string>>> statics(n);
  for (size_t i = 0; i < n; ++i) {
    gold[i] = bio_encode(sentences[i]);
    statics[i].resize(sentences[i].tokens.size());
    for (size_t p = 0; p < sentences[i].tokens.size(); ++p) {
      statics[i][p] = static_features(sentences[i].tokens, p, config);
    }
  }

  if (config.cutoff > 1) {
    std::unordered_map<std::string, int> counts;
    for (const auto& sent : statics) {
      for (const auto& feats : sent) {
        for (const auto& f : feats) ++counts[f];
      }
    }
    for (auto& sent : statics) {
      for (auto& feats : sent) {
        std::erase_if(feats, [&](const std::string& f) { return counts[f] < config.cutoff; });
      }
    }
  }

  // Lazily averaged weights: each cell tracks the running weight, the sum of
  // weights over all past steps, and the step the sum is current through.
  struct Cell {
    std::array<double, 3> w{};
    std::array<double, 3> u{};
    std::array<uint64_t, 3> ts{};
  };
  std::unordered_map<std::string, Cell> cells;
  uint64_t t = 0;

  auto lookup = [&cells](const std::string& f) -> const std::array<double, 3>* {
    auto it = cells.find(f);
    return it == cells.end() ? nullptr : &it->second.w;
  };
  auto apply = [&cells, &t](const std::string& f, size_t label, double delta) {
    Cell& c = cells[f];
    c.u[label] += c.w[label] * static_cast<double>((t - 1) - c.ts[label]);
    c.ts[label] = t - 1;
    c.w[label] += delta;
  };

  std::mt19937_64 rng(seed);
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;

  std::unordered_map<std::string, std::array<double, 3>> delta;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (size_t idx : order) {
      ++t;
      const auto& sent = statics[idx];
      std::vector<BioTag> pred = beam_decode(sent, beam, lookup);
      if (pred == gold[idx]) continue;

      delta.clear();
      for (size_t p = 0; p < sent.size(); ++p) {
        BioTag g = gold[idx][p];
        BioTag q = pred[p];
        if (g != q) {
          for (const auto& f : sent[p]) {
            auto& d = delta[f];
            d[static_cast<size_t>(g)] += 1.0;
            d[static_cast<size_t>(q)] -= 1.0;
          }
        }
        std::optional<BioTag> gp, qp;
        if (p > 0) {
          gp = gold[idx][p - 1];
          qp = pred[p - 1];
        }
        delta[prev_feature(gp)][static_cast<size_t>(g)] += 1.0;
        delta[prev_feature(qp)][static_cast<size_t>(q)] -= 1.0;
      }
      for (const auto& [f, d] : delta) {
        for (size_t l = 0; l < 3; ++l) {
          if (d[l] != 0.0) apply(f, l, d[l]);
        }
      }
    }
  }

  SequenceModel model;
  model.config = config;
  model.beam = beam;
  model.epochs = epochs;
  if (t > 0) {
    double total = static_cast<double>(t);
    for (auto& [f, c] : cells) {
      std::array<double, 3> avg{};
      bool nonzero = false;
      for (size_t l = 0; l < 3; ++l) {
        c.u[l] += c.w[l] * static_cast<double>(t - c.ts[l]);
        avg[l] = c.u[l] / total;
        if (avg[l] != 0.0) nonzero = true;
      }
      if (nonzero) model.weights.emplace(f, avg);
    }
  }
  return model;
}

OteCvReport cross_validate_ote(const std::vector<Sentence>& sentences,
                               const OteFeatureConfig& config, size_t folds, uint64_t seed,
                               int epochs, int beam) {
  size_t n = sentences.size();
  if (folds < 2 || folds > n) throw std::invalid_argument("cross_validate_ote: bad fold count");
  FoldPlan plan = make_folds(n, folds, seed);

  OteCvReport report;
  for (size_t f = 0; f < folds; ++f) {
    std::vector<Sentence> train;
    std::vector<const Sentence*> held;
    for (size_t i = 0; i < n; ++i) {
      if (plan.assignment[i] == f) {
        held.push_back(&sentences[i]);
      } else {
        train.push_back(sentences[i]);
      }
    }
    SequenceModel model = train_perceptron(train, config, epochs, seed, beam);
    std::vector<SpanPrediction> gold, pred;
    for (const Sentence* s : held) {
      auto gold_spans = bio_decode(bio_encode(*s), s->tokens);
      auto pred_spans = bio_decode(decode(model, s->tokens), s->tokens);
      gold.push_back({s->id, {gold_spans.begin(), gold_spans.end()}});
      pred.push_back({s->id, {pred_spans.begin(), pred_spans.end()}});
    }
    report.per_fold.push_back(span_prf(gold, pred));
  }

  for (const auto& s : report.per_fold) {
    report.mean.precision += s.precision;
    report.mean.recall += s.recall;
    report.mean.f1 += s.f1;
  }
  report.mean.precision /= static_cast<double>(folds);
  report.mean.recall /= static_cast<double>(folds);
  report.mean.f1 /= static_cast<double>(folds);
  return report;
}

void save_ote_model(const SequenceModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << "elixa-ote v1\n";

  std::map<std::string, const std::array<double, 3>*> sorted;
  for (const auto& [f, w] : model.weights) sorted.emplace(f, &w);
  for (const auto& [f, w] : sorted) {
    for (size_t l = 0; l < 3; ++l) {
      if ((*w)[l] == 0.0) continue;
      out << escape_field(f) << "\t" << to_string(static_cast<BioTag>(l)) << "\t"
          << format_double((*w)[l]) << "\n";
    }
  }

  nlohmann::json meta;
  meta["beam"] = model.beam;
  meta["epochs"] = model.epochs;
  meta["window"] = model.config.window;
  meta["prefix_len"] = model.config.prefix_len;
  meta["suffix_len"] = model.config.suffix_len;
  meta["bigrams"] = model.config.bigrams;
  meta["trigrams"] = model.config.trigrams;
  meta["constrained"] = model.config.constrained;
  meta["cutoff"] = model.config.cutoff;
  meta["clusters"] = nlohmann::json::array();
  for (const auto& named : model.config.clusters) {
    nlohmann::json map = nlohmann::json::object();
    for (const auto& [word, cls] : named.lexicon.map) map[word] = cls;
    meta["clusters"].push_back({{"name", named.name},
                                {"kind", to_string(named.lexicon.kind)},
                                {"map", std::move(map)}});
  }
  out << meta.dump() << "\n";
  if (!out) throw DataError("write failed: " + path);
}

SequenceModel load_ote_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  chomp(line);
  if (line != "elixa-ote v1") throw DataError(path + ": not an elixa-ote v1 model");

  // Weight lines up to the final line, which holds the config JSON.
  std::vector<std::string> lines;
  while (std::getline(in, line)) {
    chomp(line);
    if (!line.empty()) lines.push_back(std::move(line));
  }
  if (lines.empty()) throw DataError(path + ": missing config line");

  SequenceModel model;
  try {
    nlohmann::json meta = nlohmann::json::parse(lines.back());
    model.beam = meta.at("beam").get<int>();
    model.epochs = meta.at("epochs").get<int>();
    model.config.window = meta.at("window").get<int>();
    model.config.prefix_len = meta.at("prefix_len").get<int>();
    model.config.suffix_len = meta.at("suffix_len").get<int>();
    model.config.bigrams = meta.at("bigrams").get<bool>();
    model.config.trigrams = meta.at("trigrams").get<bool>();
    model.config.constrained = meta.at("constrained").get<bool>();
    model.config.cutoff = meta.at("cutoff").get<int>();
    for (const auto& c : meta.at("clusters")) {
      NamedClusterLexicon named;
      named.name = c.at("name").get<std::string>();
      named.lexicon.kind = cluster_kind_from_string(c.at("kind").get<std::string>());
      for (const auto& [word, cls] : c.at("map").items()) {
        named.lexicon.map[word] = cls.get<std::string>();
      }
      model.config.clusters.push_back(std::move(named));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": bad config line: " + e.what());
  }

  for (size_t i = 0; i + 1 < lines.size(); ++i) {
    auto fields = split(lines[i], '\t');
    if (fields.size() != 3) {
      throw DataError(path + ":" + std::to_string(i + 2) +
                      ": expected feature<TAB>label<TAB>weight");
    }
    BioTag tag = bio_from_string(fields[1]);
    char* endp = nullptr;
    double w = std::strtod(fields[2].c_str(), &endp);
    if (endp == fields[2].c_str() || *endp != '\0') {
      throw DataError(path + ":" + std::to_string(i + 2) + ": bad weight");
    }
    model.weights[unescape_field(fields[0])][static_cast<size_t>(tag)] = w;
  }
  return model;
}

}  // namespace elixa
