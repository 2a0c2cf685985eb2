#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "elixa/clusters.hpp"
#include "elixa/eval.hpp"
#include "elixa/text.hpp"

namespace elixa {

struct OteFeatureConfig {
  int window = 2;        // token/shape context offsets in [-window, window]
  int prefix_len = 4;    // prefix features of length 1..prefix_len
  int suffix_len = 4;
  bool bigrams = true;
  bool trigrams = true;
  bool constrained = false;  // true: cluster features off regardless of lexicons
  int cutoff = 0;            // drop features seen fewer than cutoff times in training
  std::vector<NamedClusterLexicon> clusters;
};

// Context features for one position: bos, windowed tokens and shapes,
// prefixes/suffixes, in-bounds bigrams/trigrams, and the previous-label
// feature ("prev=∅" at a sequence start).
std::vector<std::string> local_features(const std::vector<Token>& tokens, size_t position,
                                        const std::optional<BioTag>& previous,
                                        const OteFeatureConfig& config);

// Cluster-lexicon features for one position, in configured lexicon order.
// Brown lexicons contribute bit-path prefixes and duplicate the windowed
// token features with the token replaced by its path prefix.
std::vector<std::string> cluster_features(const std::vector<Token>& tokens, size_t position,
                                          const OteFeatureConfig& config);

struct SequenceModel {
  OteFeatureConfig config;
  int beam = 3;
  int epochs = 0;  // epochs the model was trained for
  // feature -> weight per label, indexed by BioTag value (O, B, I).
  std::unordered_map<std::string, std::array<double, 3>> weights;
};

// Averaged structured perceptron over beam-decoded BIO sequences
// (Collins 2002). Deterministic under seed. Zero epochs produce an empty
// model that decodes everything as O.
SequenceModel train_perceptron(const std::vector<Sentence>& sentences,
                               const OteFeatureConfig& config, int epochs = 10,
                               uint64_t seed = 7, int beam = 3);

// Beam-search decoding; I is never allowed at position 0 or after O.
// Ties break toward the lexicographically smaller tag sequence (O < B < I).
std::vector<BioTag> decode(const SequenceModel& model, const std::vector<Token>& tokens);

struct OteCvReport {
  std::vector<PrfScore> per_fold;
  PrfScore mean;
};

OteCvReport cross_validate_ote(const std::vector<Sentence>& sentences,
                               const OteFeatureConfig& config, size_t folds = 5,
                               uint64_t seed = 7, int epochs = 10, int beam = 3);

void save_ote_model(const SequenceModel& model, const std::string& path);
SequenceModel load_ote_model(const std::string& path);

}  // namespace elixa
