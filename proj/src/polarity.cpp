#include "elixa/polarity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>
#include <stdexcept>

#include "elixa/util.hpp"
#include "json.hpp"

namespace elixa {

namespace {

bool known_label(const std::string& s) {
  return s == "negative" || s == "neutral" || s == "positive";
}

// Inclusive token index range the n-gram/cluster features draw from.
std::pair<size_t, size_t> feature_scope(const Sentence& sentence, const Opinion& opinion,
                                        const PolarityFeatureConfig& config) {
  size_t n = sentence.tokens.size();
  if (config.window && opinion.target) {
    size_t first = n, last = 0;
    for (size_t i = 0; i < n; ++i) {
      const Token& t = sentence.tokens[i];
      if (t.start < opinion.target->end && t.end > opinion.target->start) {
        if (first == n) first = i;
        last = i;
      }
    }
    if (first < n) {
      size_t w = static_cast<size_t>(std::max(0, *config.window));
      return {first > w ? first - w : 0, std::min(n - 1, last + w)};
    }
  }
  return {0, n - 1};
}

std::optional<std::string> lookup_class(const ClusterLexicon& lex, const Token& tok) {
  auto c = lex.class_of(tok.surface);
  if (!c) c = lex.class_of(lowercase(tok.surface));
  return c;
}

struct Example {
  std::map<std::string, double> feats;
  std::string label;
};

struct ExampleSet {
  std::vector<Example> items;
  size_t skipped = 0;
  bool any_target = false;
};

ExampleSet collect_examples(const std::vector<Sentence>& sentences,
                            const PolarityFeatureConfig& config) {
  ExampleSet set;
  for (const auto& s : sentences) {
    for (const auto& op : s.opinions) {
      if (op.polarity.empty()) continue;
      if (!known_label(op.polarity)) {
        std::cerr << "warning: sentence " << s.id << ": unknown polarity '" << op.polarity
                  << "' skipped\n";
        ++set.skipped;
        continue;
      }
      if (op.target) set.any_target = true;
      set.items.push_back({polarity_features(s, op, config), op.polarity});
    }
  }
  return set;
}

SparseVector vectorize(const PolarityModel& model, const std::map<std::string, double>& feats) {
  SparseVector x;
  for (const auto& [name, raw] : feats) {
    auto it = std::lower_bound(model.features.begin(), model.features.end(), name);
    if (it == model.features.end() || *it != name) continue;
    uint32_t id = static_cast<uint32_t>(it - model.features.begin());
    double v = raw;
    if (model.scaled) {
      double lo = model.scale_min[id], hi = model.scale_max[id];
      v = hi > lo ? std::clamp((raw - lo) / (hi - lo), 0.0, 1.0) : 0.0;
    }
    if (v != 0.0) x.emplace_back(id, v);
  }
  return x;
}

uint32_t predict_index(const PolarityModel& model, const std::map<std::string, double>& feats) {
  SparseVector x = vectorize(model, feats);
  std::vector<size_t> votes(model.classes.size(), 0);
  std::vector<double> strength(model.classes.size(), 0.0);
  for (const auto& m : model.machines) {
    double f = dense_sparse_dot(m.w, x) + m.b;
    votes[f >= 0.0 ? m.pos_class : m.neg_class] += 1;
    strength[m.pos_class] += std::abs(f);
    strength[m.neg_class] += std::abs(f);
  }
  uint32_t best = 0;
  for (uint32_t k = 1; k < model.classes.size(); ++k) {
    if (votes[k] > votes[best] || (votes[k] == votes[best] && strength[k] > strength[best])) {
      best = k;
    }
  }
  return best;
}

PolarityModel train_from_examples(const std::vector<Example>& examples,
                                  const PolarityFeatureConfig& config, double c, uint64_t seed,
                                  int jobs) {
  std::set<std::string> labels;
  for (const auto& ex : examples) labels.insert(ex.label);
  if (labels.size() < 2) {
    throw std::invalid_argument("train_polarity: need at least two polarity classes");
  }

  PolarityModel model;
  model.c = c;
  model.scaled = config.scale;
  model.config = config;
  model.classes.assign(labels.begin(), labels.end());

  std::map<std::string, uint32_t> index;
  for (const auto& ex : examples) {
    for (const auto& [name, _] : ex.feats) index.emplace(name, 0);
  }
  model.features.reserve(index.size());
  for (auto& [name, id] : index) {
    id = static_cast<uint32_t>(model.features.size());
    model.features.push_back(name);
  }
  size_t dim = model.features.size();

  std::vector<SparseVector> vectors(examples.size());
  std::vector<uint32_t> ylab(examples.size());
  for (size_t i = 0; i < examples.size(); ++i) {
    for (const auto& [name, v] : examples[i].feats) {
      if (v != 0.0) vectors[i].emplace_back(index[name], v);
    }
    ylab[i] = static_cast<uint32_t>(
        std::lower_bound(model.classes.begin(), model.classes.end(), examples[i].label) -
        model.classes.begin());
  }

  if (model.scaled) {
    model.scale_min.assign(dim, 0.0);
    model.scale_max.assign(dim, 0.0);
    std::vector<size_t> count(dim, 0);
    std::vector<double> lo(dim, std::numeric_limits<double>::infinity());
    std::vector<double> hi(dim, -std::numeric_limits<double>::infinity());
    for (const auto& x : vectors) {
      for (const auto& [id, v] : x) {
        lo[id] = std::min(lo[id], v);
        hi[id] = std::max(hi[id], v);
        ++count[id];
      }
    }
    for (size_t id = 0; id < dim; ++id) {
      if (count[id] < examples.size()) {
        lo[id] = std::min(lo[id], 0.0);
        hi[id] = std::max(hi[id], 0.0);
      }
      model.scale_min[id] = lo[id];
      model.scale_max[id] = hi[id];
    }
    for (auto& x : vectors) {
      SparseVector scaled;
      for (const auto& [id, v] : x) {
        double range = hi[id] - lo[id];
        double sv = range > 0.0 ? (v - lo[id]) / range : 0.0;
        if (sv != 0.0) scaled.emplace_back(id, sv);
      }
      x = std::move(scaled);
    }
  }

  size_t k = model.classes.size();
  for (uint32_t i = 0; i < k; ++i) {
    for (uint32_t j = i + 1; j < k; ++j) {
      PairMachine m;
      m.pos_class = i;
      m.neg_class = j;
      model.machines.push_back(std::move(m));
    }
  }

  parallel_for(model.machines.size(), static_cast<unsigned>(std::max(1, jobs)), [&](size_t mi) {
    PairMachine& m = model.machines[mi];
    std::vector<SparseVector> xs;
    std::vector<int> ys;
    for (size_t e = 0; e < examples.size(); ++e) {
      if (ylab[e] == m.pos_class) {
        xs.push_back(vectors[e]);
        ys.push_back(1);
      } else if (ylab[e] == m.neg_class) {
        xs.push_back(vectors[e]);
        ys.push_back(-1);
      }
    }
    SmoOptions opts;
    opts.c = c;
    opts.seed = seed ^ (0x9E3779B97F4A7C15ULL * (mi + 1));
    BinarySvm svm = smo_train_binary(xs, ys, dim, opts);
    svm.w.resize(dim, 0.0);
    m.w = std::move(svm.w);
    m.b = svm.b;
  });

  return model;
}

}  // namespace

std::map<std::string, double> polarity_features(const Sentence& sentence, const Opinion& opinion,
                                                const PolarityFeatureConfig& config) {
  std::map<std::string, double> feats;
  size_t n = sentence.tokens.size();

  if (n > 0) {
    auto [first, last] = feature_scope(sentence, opinion, config);

    for (int k = 1; k <= config.ngram_max; ++k) {
      size_t span = static_cast<size_t>(k);
      for (size_t i = first; i + span <= last + 1; ++i) {
        std::string gram;
        for (size_t j = 0; j < span; ++j) {
          if (j > 0) gram += '|';
          gram += lowercase(sentence.tokens[i + j].lemma);
        }
        feats["lg" + std::to_string(k) + "=" + gram] += 1.0;
      }
    }

    if (config.use_pos) {
      for (const auto& tok : sentence.tokens) feats["pos=" + tok.pos] += 1.0;
    }

    for (const auto& named : config.lexicons) {
      double pos_sum = 0.0, neg_sum = 0.0;
      for (const auto& tok : sentence.tokens) {
        auto w = named.lexicon.weight_of(lowercase(tok.lemma));
        if (!w) w = named.lexicon.weight_of(lowercase(tok.surface));
        if (!w) continue;
        if (*w > 0) {
          pos_sum += *w;
        } else {
          neg_sum -= *w;
        }
      }
      if (pos_sum > 0.0) feats[named.name + "_pos"] = pos_sum / static_cast<double>(n);
      if (neg_sum > 0.0) feats[named.name + "_neg"] = neg_sum / static_cast<double>(n);
    }

    for (const auto& named : config.clusters) {
      for (size_t i = first; i <= last; ++i) {
        auto c = lookup_class(named.lexicon, sentence.tokens[i]);
        if (!c) continue;
        if (named.lexicon.kind == ClusterKind::Brown) {
          for (const auto& pre : brown_prefixes(*c)) feats[named.name + "=" + pre] = 1.0;
        } else {
          feats[named.name + "=" + *c] = 1.0;
        }
      }
    }
  }

  if (config.use_category && !opinion.category.empty()) {
    feats["cat=" + opinion.category] = 1.0;
  }
  return feats;
}

PolarityModel train_polarity(const std::vector<Sentence>& sentences,
                             const PolarityFeatureConfig& config, double c, uint64_t seed,
                             int jobs) {
  ExampleSet set = collect_examples(sentences, config);
  if (set.items.empty()) throw std::invalid_argument("train_polarity: no labeled opinions");
  if (config.window && !set.any_target) {
    std::cerr << "warning: window configured but no opinion has a target; "
                 "features cover whole sentences\n";
  }
  return train_from_examples(set.items, config, c, seed, jobs);
}

std::string predict_polarity(const PolarityModel& model, const Sentence& sentence,
                             const Opinion& opinion) {
  if (model.classes.empty()) throw std::invalid_argument("predict_polarity: empty model");
  auto feats = polarity_features(sentence, opinion, model.config);
  return model.classes[predict_index(model, feats)];
}

PolarityCvReport cross_validate_polarity(const std::vector<Sentence>& sentences,
                                         const PolarityFeatureConfig& config, size_t folds,
                                         uint64_t seed, double c, int jobs) {
  ExampleSet set = collect_examples(sentences, config);
  size_t n = set.items.size();
  if (folds < 2 || folds > n) {
    throw std::invalid_argument("cross_validate_polarity: bad fold count");
  }

  std::map<std::string, size_t> label_counts;
  std::vector<std::string> labels(n);
  for (size_t i = 0; i < n; ++i) {
    labels[i] = set.items[i].label;
    ++label_counts[labels[i]];
  }

  PolarityCvReport report;
  size_t majority = 0;
  for (const auto& [label, cnt] : label_counts) {
    majority = std::max(majority, cnt);
    if (cnt < folds) report.stratified = false;
  }
  report.majority = static_cast<double>(majority) / static_cast<double>(n);
  if (!report.stratified) {
    std::cerr << "warning: a class has fewer members than folds; using plain folds\n";
  }

  FoldPlan plan = make_folds(n, folds, seed, report.stratified ? &labels : nullptr);
  for (size_t f = 0; f < folds; ++f) {
    std::vector<Example> train;
    std::vector<size_t> held;
    for (size_t i = 0; i < n; ++i) {
      if (plan.assignment[i] == f) {
        held.push_back(i);
      } else {
        train.push_back(set.items[i]);
      }
    }
    PolarityModel model = train_from_examples(train, config, c, seed, jobs);
    std::vector<std::string> gold, pred;
    for (size_t i : held) {
      gold.push_back(set.items[i].label);
      pred.push_back(model.classes[predict_index(model, set.items[i].feats)]);
    }
    report.per_fold.push_back(accuracy(gold, pred));
  }

  for (double a : report.per_fold) report.mean += a;
  report.mean /= static_cast<double>(folds);
  return report;
}

Table ablation_table(const std::vector<Sentence>& sentences,
                     const std::vector<AblationSpec>& specs, size_t folds, uint64_t seed, double c,
                     int jobs) {
  Table table;
  table.header = {"setting", "accuracy"};
  bool baseline_done = false;
  for (const auto& spec : specs) {
    PolarityCvReport report = cross_validate_polarity(sentences, spec.config, folds, seed, c, jobs);
    if (!baseline_done) {
      table.rows.push_back({"majority", percent(report.majority)});
      baseline_done = true;
    }
    table.rows.push_back({spec.name, percent(report.mean)});
  }
  return table;
}

void save_polarity_model(const PolarityModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << "elixa-pol v1\n";

  nlohmann::json cfg;
  cfg["ngram_max"] = model.config.ngram_max;
  cfg["use_pos"] = model.config.use_pos;
  if (model.config.window) {
    cfg["window"] = *model.config.window;
  } else {
    cfg["window"] = nullptr;
  }
  cfg["use_category"] = model.config.use_category;
  cfg["scale"] = model.config.scale;
  cfg["lexicons"] = nlohmann::json::array();
  for (const auto& named : model.config.lexicons) {
    nlohmann::json entries = nlohmann::json::object();
    for (const auto& [lemma, w] : named.lexicon.entries) {
      entries[lemma] = {w, to_string(named.lexicon.source.at(lemma))};
    }
    cfg["lexicons"].push_back({{"name", named.name}, {"entries", std::move(entries)}});
  }
  cfg["clusters"] = nlohmann::json::array();
  for (const auto& named : model.config.clusters) {
    nlohmann::json map = nlohmann::json::object();
    for (const auto& [word, cls] : named.lexicon.map) map[word] = cls;
    cfg["clusters"].push_back({{"name", named.name},
                               {"kind", to_string(named.lexicon.kind)},
                               {"map", std::move(map)}});
  }

  nlohmann::json meta;
  meta["c"] = model.c;
  meta["scaled"] = model.scaled;
  meta["classes"] = model.classes;
  meta["machines"] = model.machines.size();
  meta["config"] = std::move(cfg);
  out << meta.dump() << "\n";
  out << nlohmann::json{{"features", model.features}}.dump() << "\n";
  if (model.scaled) {
    out << nlohmann::json{{"min", model.scale_min}, {"max", model.scale_max}}.dump() << "\n";
  }
  for (const auto& m : model.machines) {
    nlohmann::json jm;
    jm["pos"] = m.pos_class;
    jm["neg"] = m.neg_class;
    jm["b"] = m.b;
    auto w = nlohmann::json::array();
    for (uint32_t id = 0; id < m.w.size(); ++id) {
      if (m.w[id] != 0.0) w.push_back({id, m.w[id]});
    }
    jm["w"] = std::move(w);
    out << nlohmann::json{{"machine", std::move(jm)}}.dump() << "\n";
  }
  if (!out) throw DataError("write failed: " + path);
}

PolarityModel load_polarity_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  chomp(line);
  if (line != "elixa-pol v1") throw DataError(path + ": not an elixa-pol v1 model");

  auto next_json = [&](const char* what) {
    if (!std::getline(in, line)) throw DataError(path + ": missing " + std::string(what));
    chomp(line);
    try {
      return nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path + ": bad " + std::string(what) + ": " + e.what());
    }
  };

  PolarityModel model;
  size_t machine_count = 0;
  try {
    nlohmann::json meta = next_json("model header");
    model.c = meta.at("c").get<double>();
    model.scaled = meta.at("scaled").get<bool>();
    model.classes = meta.at("classes").get<std::vector<std::string>>();
    machine_count = meta.at("machines").get<size_t>();

    const nlohmann::json& cfg = meta.at("config");
    model.config.ngram_max = cfg.at("ngram_max").get<int>();
    model.config.use_pos = cfg.at("use_pos").get<bool>();
    if (!cfg.at("window").is_null()) model.config.window = cfg.at("window").get<int>();
    model.config.use_category = cfg.at("use_category").get<bool>();
    model.config.scale = cfg.at("scale").get<bool>();
    for (const auto& jl : cfg.at("lexicons")) {
      NamedPolarityLexicon named;
      named.name = jl.at("name").get<std::string>();
      named.lexicon.name = named.name;
      for (const auto& [lemma, entry] : jl.at("entries").items()) {
        named.lexicon.entries[lemma] = entry.at(0).get<double>();
        named.lexicon.source[lemma] = lex_source_from_string(entry.at(1).get<std::string>());
      }
      model.config.lexicons.push_back(std::move(named));
    }
    for (const auto& jc : cfg.at("clusters")) {
      NamedClusterLexicon named;
      named.name = jc.at("name").get<std::string>();
      named.lexicon.kind = cluster_kind_from_string(jc.at("kind").get<std::string>());
      for (const auto& [word, cls] : jc.at("map").items()) {
        named.lexicon.map[word] = cls.get<std::string>();
      }
      model.config.clusters.push_back(std::move(named));
    }

    model.features = next_json("feature list").at("features").get<std::vector<std::string>>();
    if (model.scaled) {
      nlohmann::json sc = next_json("scaling line");
      model.scale_min = sc.at("min").get<std::vector<double>>();
      model.scale_max = sc.at("max").get<std::vector<double>>();
      if (model.scale_min.size() != model.features.size() ||
          model.scale_max.size() != model.features.size()) {
        throw DataError(path + ": scaling size mismatch");
      }
    }
    for (size_t i = 0; i < machine_count; ++i) {
      nlohmann::json jm = next_json("machine line").at("machine");
      PairMachine m;
      m.pos_class = jm.at("pos").get<uint32_t>();
      m.neg_class = jm.at("neg").get<uint32_t>();
      if (m.pos_class >= model.classes.size() || m.neg_class >= model.classes.size()) {
        throw DataError(path + ": machine class out of range");
      }
      m.b = jm.at("b").get<double>();
      m.w.assign(model.features.size(), 0.0);
      for (const auto& pair : jm.at("w")) {
        uint32_t id = pair.at(0).get<uint32_t>();
        if (id >= m.w.size()) throw DataError(path + ": weight index out of range");
        m.w[id] = pair.at(1).get<double>();
      }
      model.machines.push_back(std::move(m));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": bad model content: " + e.what());
  }
  return model;
}

}  // namespace elixa
