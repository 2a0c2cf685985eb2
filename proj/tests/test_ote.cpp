#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "elixa/ote.hpp"
#include "elixa/util.hpp"

using namespace elixa;

namespace {

std::string join(const std::vector<std::string>& words) {
  std::string text;
  for (const auto& w : words) {
    if (!text.empty()) text += ' ';
    text += w;
  }
  return text;
}

Sentence make_sentence(const std::string& id, const std::vector<std::string>& words,
                       int target_lo = -1, int target_hi = -1) {
  Sentence s;
  s.id = id;
  s.text = join(words);
  s.tokens = tokenize(s.text);
  if (target_lo >= 0) {
    Opinion op;
    op.target = Span{s.tokens[target_lo].start, s.tokens[target_hi].end};
    s.opinions.push_back(op);
  }
  return s;
}

// The per-position features a decode step scores before the previous-label
// feature is added: local features minus the trailing prev marker.
std::vector<std::vector<std::string>> statics_of(const std::vector<Token>& tokens,
                                                 const OteFeatureConfig& cfg) {
  std::vector<std::vector<std::string>> out(tokens.size());
  for (size_t p = 0; p < tokens.size(); ++p) {
    out[p] = local_features(tokens, p, std::nullopt, cfg);
    out[p].pop_back();
    auto cl = cluster_features(tokens, p, cfg);
    out[p].insert(out[p].end(), cl.begin(), cl.end());
  }
  return out;
}

const std::string& prev_name(const std::optional<BioTag>& prev) {
  static const std::string names[4] = {"prev=O", "prev=B", "prev=I", "prev=∅"};
  return prev ? names[static_cast<size_t>(*prev)] : names[3];
}

double weight_of(const SequenceModel& m, const std::string& f, BioTag l) {
  auto it = m.weights.find(f);
  return it == m.weights.end() ? 0.0 : it->second[static_cast<size_t>(l)];
}

double sequence_score(const SequenceModel& m,
                      const std::vector<std::vector<std::string>>& statics,
                      const std::vector<BioTag>& tags) {
  // Summation mirrors the decoder exactly (static sum, then accumulate, then
  // the transition weight) so ties land on bit-identical values.
  double score = 0.0;
  for (size_t p = 0; p < tags.size(); ++p) {
    double s = 0.0;
    for (const auto& f : statics[p]) s += weight_of(m, f, tags[p]);
    std::optional<BioTag> prev;
    if (p > 0) prev = tags[p - 1];
    score = score + s;
    score = score + weight_of(m, prev_name(prev), tags[p]);
  }
  return score;
}

bool valid_bio(const std::vector<BioTag>& tags) {
  for (size_t p = 0; p < tags.size(); ++p) {
    if (tags[p] != BioTag::I) continue;
    if (p == 0 || tags[p - 1] == BioTag::O) return false;
  }
  return true;
}

std::vector<BioTag> exhaustive_best(const SequenceModel& m, const std::vector<Token>& tokens) {
  auto statics = statics_of(tokens, m.config);
  size_t n = tokens.size();
  size_t total = 1;
  for (size_t i = 0; i < n; ++i) total *= 3;
  std::vector<BioTag> best;
  double best_score = 0.0;
  for (size_t code = 0; code < total; ++code) {
    std::vector<BioTag> tags(n);
    size_t c = code;
    for (size_t p = 0; p < n; ++p) {
      tags[p] = static_cast<BioTag>(c % 3);
      c /= 3;
    }
    if (!valid_bio(tags)) continue;
    double score = sequence_score(m, statics, tags);
    if (best.empty() || score > best_score || (score == best_score && tags < best)) {
      best = tags;
      best_score = score;
    }
  }
  return best;
}

std::vector<BioTag> greedy_best(const SequenceModel& m, const std::vector<Token>& tokens) {
  auto statics = statics_of(tokens, m.config);
  std::vector<BioTag> tags;
  double total = 0.0;
  for (size_t p = 0; p < tokens.size(); ++p) {
    std::optional<BioTag> prev;
    if (p > 0) prev = tags.back();
    int best_l = -1;
    double best_score = 0.0;
    for (int l = 0; l < 3; ++l) {
      if (l == static_cast<int>(BioTag::I) && (!prev || *prev == BioTag::O)) continue;
      double s = 0.0;
      for (const auto& f : statics[p]) s += weight_of(m, f, static_cast<BioTag>(l));
      double cand = total + s + weight_of(m, prev_name(prev), static_cast<BioTag>(l));
      if (best_l < 0 || cand > best_score) {
        best_l = l;
        best_score = cand;
      }
    }
    tags.push_back(static_cast<BioTag>(best_l));
    total = best_score;
  }
  return tags;
}

}  // namespace

TEST_CASE("local features at the first position") {
  auto tokens = tokenize("Tasty Dog !");
  OteFeatureConfig cfg;  // window 2, n-grams on
  std::vector<std::string> expected = {
      "bos",       "w0=tasty",  "sh0=Aa",   "w1=dog",      "sh1=Aa",
      "w2=!",      "sh2=x",     "pre1=t",   "pre2=ta",     "pre3=tas",
      "pre4=tast", "suf1=y",    "suf2=ty",  "suf3=sty",    "suf4=asty",
      "wb0=tasty|dog", "shb0=Aa|Aa", "wt0=tasty|dog|!", "sht0=Aa|Aa|x", "prev=∅"};
  CHECK(local_features(tokens, 0, std::nullopt, cfg) == expected);
}

TEST_CASE("local features mid-sentence with a previous label") {
  auto tokens = tokenize("Tasty Dog !");
  OteFeatureConfig cfg;
  std::vector<std::string> expected = {
      "w-1=tasty", "sh-1=Aa", "w0=dog", "sh0=Aa", "w1=!", "sh1=x",
      "pre1=d", "pre2=do", "pre3=dog", "suf1=g", "suf2=og", "suf3=dog",
      "wb-1=tasty|dog", "shb-1=Aa|Aa", "wb0=dog|!", "shb0=Aa|x",
      "wt-1=tasty|dog|!", "sht-1=Aa|Aa|x", "prev=B"};
  CHECK(local_features(tokens, 1, BioTag::B, cfg) == expected);
}

TEST_CASE("local features degrade gracefully on short inputs") {
  OteFeatureConfig cfg;
  auto one = tokenize("Hi");
  auto feats = local_features(one, 0, std::nullopt, cfg);
  for (const auto& f : feats) {
    CHECK(f.find("wb") != 0);
    CHECK(f.find("wt") != 0);
    CHECK(f.find("shb") != 0);
    CHECK(f.find("sht") != 0);
  }

  auto tiny = tokenize("a b");
  auto tf = local_features(tiny, 0, std::nullopt, cfg);
  int prefixes = 0, suffixes = 0;
  for (const auto& f : tf) {
    if (f.rfind("pre", 0) == 0 && f != "prev=∅") ++prefixes;
    if (f.rfind("suf", 0) == 0) ++suffixes;
  }
  CHECK(prefixes == 1);  // only pre1=a for a one-char token
  CHECK(suffixes == 1);

  CHECK_THROWS_AS(local_features(one, 5, std::nullopt, cfg), std::out_of_range);
}

TEST_CASE("cluster features: brown prefixes plus windowed duplicates") {
  OteFeatureConfig cfg;
  NamedClusterLexicon brown;
  brown.name = "brown";
  brown.lexicon.kind = ClusterKind::Brown;
  brown.lexicon.map = {{"pizza", "001011010101"}, {"the", "0111"}};
  cfg.clusters.push_back(brown);

  auto tokens = tokenize("The pizza");
  std::vector<std::string> expected = {
      "brown=0010", "brown=00101101", "brown=001011010101",
      "brownw-1=0111",
      "brownw0=0010", "brownw0=00101101", "brownw0=001011010101"};
  CHECK(cluster_features(tokens, 1, cfg) == expected);

  // lowercased fallback found "The"; position 0 window picks up "pizza" too
  auto at0 = cluster_features(tokens, 0, cfg);
  CHECK(at0[0] == "brown=0111");
}

TEST_CASE("cluster features: clark classes and misses") {
  OteFeatureConfig cfg;
  NamedClusterLexicon clark;
  clark.name = "clark";
  clark.lexicon.kind = ClusterKind::Clark;
  clark.lexicon.map = {{"pizza", "12"}};
  cfg.clusters.push_back(clark);

  auto tokens = tokenize("The pizza");
  CHECK(cluster_features(tokens, 1, cfg) == std::vector<std::string>{"clark=12"});
  CHECK(cluster_features(tokens, 0, cfg).empty());  // no windowed duplicates for clark

  cfg.constrained = true;
  CHECK(cluster_features(tokens, 1, cfg).empty());
}

TEST_CASE("decode: beam 1 matches greedy and a wide beam matches exhaustive search") {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> len(1, 5), pick(0, 2);
  const std::vector<std::string> vocab = {"aa", "bb", "cc"};

  OteFeatureConfig cfg;
  cfg.window = 1;
  cfg.trigrams = false;

  for (int trial = 0; trial < 120; ++trial) {
    std::vector<std::string> words;
    int n = len(rng);
    for (int i = 0; i < n; ++i) words.push_back(vocab[pick(rng)]);
    auto tokens = tokenize(join(words));

    SequenceModel m;
    m.config = cfg;
    auto statics = statics_of(tokens, cfg);
    for (const auto& feats : statics) {
      for (const auto& f : feats) {
        if (!m.weights.count(f)) m.weights[f] = {u(rng), u(rng), u(rng)};
      }
    }
    for (const auto& p : {"prev=O", "prev=B", "prev=I", "prev=∅"}) {
      m.weights[p] = {u(rng), u(rng), u(rng)};
    }

    m.beam = 1;
    CHECK(decode(m, tokens) == greedy_best(m, tokens));

    m.beam = 300;  // > 3^5, nothing is ever pruned
    CHECK(decode(m, tokens) == exhaustive_best(m, tokens));
  }
}

TEST_CASE("decode never produces I at the start or after O") {
  auto tokens = tokenize("x y z");
  SequenceModel m;
  m.config.window = 1;
  m.beam = 3;

  // Everything pushes toward I; B is reachable only through bos.
  m.weights["prev=∅"] = {0.0, 5.0, 100.0};
  m.weights["prev=B"] = {0.0, 0.0, 100.0};
  m.weights["prev=I"] = {0.0, 0.0, 100.0};
  m.weights["prev=O"] = {0.0, 0.0, 100.0};
  auto tags = decode(m, tokens);
  CHECK(tags == std::vector<BioTag>{BioTag::B, BioTag::I, BioTag::I});

  // Favor O everywhere, then try to force I after it: stays O.
  m.weights.clear();
  m.weights["prev=∅"] = {5.0, 0.0, 0.0};
  m.weights["prev=O"] = {1.0, 0.0, 100.0};
  tags = decode(m, tokens);
  CHECK(tags == std::vector<BioTag>{BioTag::O, BioTag::O, BioTag::O});

  CHECK(decode(m, {}).empty());
  m.beam = 0;
  CHECK_THROWS_AS(decode(m, tokens), std::invalid_argument);
}

TEST_CASE("averaged weights equal an explicit per-step snapshot average") {
  std::vector<Sentence> sents = {
      make_sentence("s1", {"the", "pizza", "was", "great"}, 1, 1),
      make_sentence("s2", {"bad", "soup", "again"}, 1, 1),
      make_sentence("s3", {"service", "was", "slow"}),
  };
  OteFeatureConfig cfg;
  cfg.window = 1;
  int epochs = 3, beam = 2;
  uint64_t seed = 11;

  SequenceModel trained = train_perceptron(sents, cfg, epochs, seed, beam);

  // Oracle: same loop with eager weights, summing a full snapshot after every
  // sentence step.
  size_t n = sents.size();
  std::vector<std::vector<BioTag>> gold(n);
  std::vector<std::vector<std::vector<std::string>>> statics(n);
  for (size_t i = 0; i < n; ++i) {
    gold[i] = bio_encode(sents[i]);
    statics[i] = statics_of(sents[i].tokens, cfg);
  }

  std::map<std::string, std::array<double, 3>> w, sum;
  std::mt19937_64 rng(seed);
  std::vector<size_t> order = {0, 1, 2};
  uint64_t steps = 0;
  for (int e = 0; e < epochs; ++e) {
    std::shuffle(order.begin(), order.end(), rng);
    for (size_t idx : order) {
      ++steps;
      SequenceModel cur;
      cur.config = cfg;
      cur.beam = beam;
      for (const auto& [f, a] : w) cur.weights[f] = a;
      std::vector<BioTag> pred = decode(cur, sents[idx].tokens);
      if (pred != gold[idx]) {
        std::map<std::string, std::array<double, 3>> delta;
        for (size_t p = 0; p < statics[idx].size(); ++p) {
          BioTag g = gold[idx][p], q = pred[p];
          if (g != q) {
            for (const auto& f : statics[idx][p]) {
              delta[f][static_cast<size_t>(g)] += 1.0;
              delta[f][static_cast<size_t>(q)] -= 1.0;
            }
          }
          std::optional<BioTag> gp, qp;
          if (p > 0) {
            gp = gold[idx][p - 1];
            qp = pred[p - 1];
          }
          delta[prev_name(gp)][static_cast<size_t>(g)] += 1.0;
          delta[prev_name(qp)][static_cast<size_t>(q)] -= 1.0;
        }
        for (const auto& [f, d] : delta) {
          for (size_t l = 0; l < 3; ++l) w[f][l] += d[l];
        }
      }
      for (const auto& [f, a] : w) {
        for (size_t l = 0; l < 3; ++l) sum[f][l] += a[l];
      }
    }
  }

  size_t nonzero_keys = 0;
  for (const auto& [f, a] : sum) {
    std::array<double, 3> avg{};
    bool nonzero = false;
    for (size_t l = 0; l < 3; ++l) {
      avg[l] = a[l] / static_cast<double>(steps);
      if (avg[l] != 0.0) nonzero = true;
    }
    if (!nonzero) continue;
    ++nonzero_keys;
    auto it = trained.weights.find(f);
    REQUIRE(it != trained.weights.end());
    for (size_t l = 0; l < 3; ++l) {
      CHECK(std::abs(it->second[l] - avg[l]) <= 1e-12);
    }
  }
  CHECK(trained.weights.size() == nonzero_keys);
}

TEST_CASE("perceptron separates a synthetic target vocabulary") {
  const std::vector<std::string> foods = {"pizza", "sushi", "ramen", "soup", "tea", "cake"};
  const std::vector<std::string> adjs = {"great", "bad", "fine", "salty", "sweet"};
  std::vector<Sentence> sents;
  for (size_t f = 0; f < foods.size(); ++f) {
    for (size_t a = 0; a < adjs.size(); ++a) {
      sents.push_back(make_sentence("s" + std::to_string(sents.size()),
                                    {"the", foods[f], "was", adjs[a]}, 1, 1));
    }
  }
  // Two negative templates: with a single shared template the chain features
  // and the word features settle into an exact score tie on the negatives,
  // which the running average then never resolves.
  for (size_t a = 0; a < adjs.size(); ++a) {
    sents.push_back(make_sentence("n" + std::to_string(a), {"the", "service", "was", adjs[a]}));
    sents.push_back(make_sentence("m" + std::to_string(a), {"our", "waiter", "seemed", adjs[a]}));
  }

  OteFeatureConfig cfg;
  cfg.window = 2;
  SequenceModel model = train_perceptron(sents, cfg, 10, 7, 3);
  size_t correct = 0;
  for (const auto& s : sents) {
    if (decode(model, s.tokens) == bio_encode(s)) ++correct;
  }
  CHECK(correct == sents.size());

  auto report = cross_validate_ote(sents, cfg, 5, 7, 10, 3);
  REQUIRE(report.per_fold.size() == 5);
  CHECK(report.mean.f1 >= 0.9);
}

TEST_CASE("training is deterministic and zero epochs tag everything O") {
  std::vector<Sentence> sents = {
      make_sentence("a", {"nice", "pizza"}, 1, 1),
      make_sentence("b", {"bad", "soup"}, 1, 1),
      make_sentence("c", {"slow", "service"}),
  };
  OteFeatureConfig cfg;
  cfg.window = 1;
  auto m1 = train_perceptron(sents, cfg, 5, 3, 2);
  auto m2 = train_perceptron(sents, cfg, 5, 3, 2);
  CHECK(m1.weights == m2.weights);

  auto empty = train_perceptron(sents, cfg, 0, 3, 2);
  CHECK(empty.weights.empty());
  auto tags = decode(empty, sents[0].tokens);
  CHECK(tags == std::vector<BioTag>{BioTag::O, BioTag::O});

  CHECK_THROWS_AS(train_perceptron({}, cfg, 1, 3, 2), std::invalid_argument);
  CHECK_THROWS_AS(train_perceptron(sents, cfg, -1, 3, 2), std::invalid_argument);
  CHECK_THROWS_AS(train_perceptron(sents, cfg, 1, 3, 0), std::invalid_argument);
  CHECK_THROWS_AS(cross_validate_ote(sents, cfg, 1, 7), std::invalid_argument);
  CHECK_THROWS_AS(cross_validate_ote(sents, cfg, 9, 7), std::invalid_argument);
}

TEST_CASE("ote model files round-trip") {
  SequenceModel m;
  m.beam = 5;
  m.epochs = 2;
  m.config.window = 3;
  m.config.prefix_len = 2;
  m.config.suffix_len = 1;
  m.config.bigrams = false;
  m.config.trigrams = true;
  m.config.constrained = true;
  m.config.cutoff = 2;
  m.weights["w0=pizza"] = {0.25, -1.0 / 3.0, 0.0};
  m.weights["odd\tkey\\with\nstuff"] = {-2.5, 0.125, 7.0};
  m.weights["prev=∅"] = {1e-17, 0.0, -3.0};
  NamedClusterLexicon brown;
  brown.name = "brown";
  brown.lexicon.kind = ClusterKind::Brown;
  brown.lexicon.map = {{"pizza", "0010"}};
  NamedClusterLexicon clark;
  clark.name = "w5";
  clark.lexicon.kind = ClusterKind::Clark;
  clark.lexicon.map = {{"pizza", "12"}, {"soup", "3"}};
  m.config.clusters = {brown, clark};

  std::string path = "ote_rt.tmp";
  save_ote_model(m, path);
  SequenceModel r = load_ote_model(path);
  CHECK(r.beam == m.beam);
  CHECK(r.epochs == m.epochs);
  CHECK(r.config.window == m.config.window);
  CHECK(r.config.prefix_len == m.config.prefix_len);
  CHECK(r.config.suffix_len == m.config.suffix_len);
  CHECK(r.config.bigrams == m.config.bigrams);
  CHECK(r.config.trigrams == m.config.trigrams);
  CHECK(r.config.constrained == m.config.constrained);
  CHECK(r.config.cutoff == m.config.cutoff);
  CHECK(r.weights == m.weights);
  REQUIRE(r.config.clusters.size() == 2);
  CHECK(r.config.clusters[0].name == "brown");
  CHECK(r.config.clusters[0].lexicon.kind == ClusterKind::Brown);
  CHECK(r.config.clusters[0].lexicon.map == brown.lexicon.map);
  CHECK(r.config.clusters[1].name == "w5");
  CHECK(r.config.clusters[1].lexicon.map == clark.lexicon.map);
  std::remove(path.c_str());
}

TEST_CASE("ote model loading rejects malformed files") {
  std::string path = "ote_bad.tmp";
  {
    std::ofstream out(path);
    out << "elixa-pol v1\n{}\n";
  }
  CHECK_THROWS_WITH_AS(load_ote_model(path), doctest::Contains("elixa-ote"), DataError);
  {
    std::ofstream out(path);
    out << "elixa-ote v1\n";
  }
  CHECK_THROWS_WITH_AS(load_ote_model(path), doctest::Contains("config"), DataError);
  {
    std::ofstream out(path);
    out << "elixa-ote v1\nno_tabs_here\n";
    out << R"({"beam":3,"epochs":1,"window":2,"prefix_len":4,"suffix_len":4,)"
        << R"("bigrams":true,"trigrams":true,"constrained":false,"cutoff":0,"clusters":[]})"
        << "\n";
  }
  CHECK_THROWS_WITH_AS(load_ote_model(path), doctest::Contains(":2"), DataError);
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_ote_model("no_such_model.tmp"), DataError);
  CHECK_THROWS_AS(save_ote_model(SequenceModel{}, "no_such_dir_xyz/m.ote"), DataError);
}
