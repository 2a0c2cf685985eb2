#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "elixa/clusters.hpp"
#include "elixa/eval.hpp"
#include "elixa/lexicon.hpp"
#include "elixa/svm.hpp"
#include "elixa/text.hpp"

namespace elixa {

struct NamedPolarityLexicon {
  std::string name;
  PolarityLexicon lexicon;
};

struct PolarityFeatureConfig {
  int ngram_max = 1;          // lemma n-grams of order 1..ngram_max
  bool use_pos = false;       // PoS tag counts
  std::optional<int> window;  // restrict n-grams/clusters to +-window around the target
  bool use_category = false;  // aspect category feature
  bool scale = true;          // min-max scale features to [0,1]
  std::vector<NamedPolarityLexicon> lexicons;
  std::vector<NamedClusterLexicon> clusters;
};

// Named feature values for one opinion. N-grams and cluster features range
// over the window scope (whole sentence when no window or a null target);
// PoS counts and lexicon scores always cover the whole sentence. Zero-valued
// features are dropped.
std::map<std::string, double> polarity_features(const Sentence& sentence, const Opinion& opinion,
                                                const PolarityFeatureConfig& config);

// One one-vs-one machine: +1 decides for classes[pos_class].
struct PairMachine {
  uint32_t pos_class = 0;
  uint32_t neg_class = 0;
  std::vector<double> w;
  double b = 0.0;
};

struct PolarityModel {
  double c = 1.0;
  bool scaled = true;
  std::vector<std::string> classes;        // labels present in training, sorted
  std::vector<std::string> features;       // feature index -> name
  std::vector<double> scale_min, scale_max;
  PolarityFeatureConfig config;
  std::vector<PairMachine> machines;       // all (i, j), i < j, in order
};

// One-vs-one linear SVMs over min-max scaled features; majority vote with
// |decision value| sums breaking ties, class order last. Throws
// std::invalid_argument when fewer than two labels are present.
PolarityModel train_polarity(const std::vector<Sentence>& sentences,
                             const PolarityFeatureConfig& config, double c = 1.0,
                             uint64_t seed = 7, int jobs = 1);

std::string predict_polarity(const PolarityModel& model, const Sentence& sentence,
                             const Opinion& opinion);

struct PolarityCvReport {
  std::vector<double> per_fold;  // held-out accuracy per fold
  double mean = 0.0;
  double majority = 0.0;         // majority-class baseline on the full set
  bool stratified = true;
};

// Stratified k-fold CV over labeled opinions; falls back to plain folds
// (with a warning) when some class has fewer members than folds.
PolarityCvReport cross_validate_polarity(const std::vector<Sentence>& sentences,
                                         const PolarityFeatureConfig& config, size_t folds = 10,
                                         uint64_t seed = 7, double c = 1.0, int jobs = 1);

struct AblationSpec {
  std::string name;
  PolarityFeatureConfig config;
};

// Cross-validates each feature setup and tabulates mean accuracy, with the
// majority baseline as the first row.
Table ablation_table(const std::vector<Sentence>& sentences,
                     const std::vector<AblationSpec>& specs, size_t folds = 10, uint64_t seed = 7,
                     double c = 1.0, int jobs = 1);

void save_polarity_model(const PolarityModel& model, const std::string& path);
PolarityModel load_polarity_model(const std::string& path);

}  // namespace elixa
