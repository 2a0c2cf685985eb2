#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace elixa {

enum class ClusterKind : uint8_t { Brown, Clark, Kmeans };

const char* to_string(ClusterKind k);
ClusterKind cluster_kind_from_string(const std::string& s);

struct ClusterLexicon {
  ClusterKind kind = ClusterKind::Clark;
  std::unordered_map<std::string, std::string> map;  // word -> class string

  std::optional<std::string> class_of(const std::string& word) const {
    auto it = map.find(word);
    if (it == map.end()) return std::nullopt;
    return it->second;
  }
};

// Row-major word vectors with a stable vocabulary order (file order).
struct WordVectors {
  size_t dim = 0;
  std::vector<std::string> vocab;
  std::vector<float> data;  // vocab.size() * dim

  const float* row(size_t i) const { return data.data() + i * dim; }
  size_t size() const { return vocab.size(); }
};

struct LoadReport {
  size_t warnings = 0;
};

// A cluster lexicon under the handle feature strings are prefixed with
// ("brown", "w2v", ...).
struct NamedClusterLexicon {
  std::string name;
  ClusterLexicon lexicon;
};

// Liang brown-cluster output: bitpath<TAB>word<TAB>count.
// Duplicate words keep the higher-count line.
ClusterLexicon load_brown(const std::string& path);

// Bit-path prefixes at depths 4, 8, 12, 20, clipped to the path length and
// de-duplicated; a path shorter than every depth yields itself once.
std::vector<std::string> brown_prefixes(const std::string& path);

// word<TAB>class(<TAB>weight)? lines; duplicate word: last line wins.
ClusterLexicon load_clark(const std::string& path, LoadReport* report = nullptr);
ClusterLexicon load_kmeans_lexicon(const std::string& path, LoadReport* report = nullptr);

void save_cluster_lexicon(const ClusterLexicon& lex, const std::string& path);

// Text vectors: first line "vocab dim", then "word v1 ... vdim".
WordVectors load_word_vectors(const std::string& path);

struct KmeansResult {
  ClusterLexicon lexicon;                // word -> cluster index as decimal string
  std::vector<double> inertia_history;   // total inertia after each iteration
  size_t iterations = 0;
};

// Lloyd's algorithm with k-means++ seeding; Euclidean distance; stops when
// assignments are stable or after max_iters. Deterministic under seed.
// Throws std::invalid_argument when k < 1 or k > vocabulary size.
KmeansResult kmeans(const WordVectors& vectors, size_t k, uint64_t seed, size_t max_iters = 100);

}  // namespace elixa
