#include "elixa/clusters.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include "elixa/kernels.hpp"
#include "elixa/util.hpp"

namespace elixa {

const char* to_string(ClusterKind k) {
  switch (k) {
    case ClusterKind::Brown: return "brown";
    case ClusterKind::Clark: return "clark";
    case ClusterKind::Kmeans: return "kmeans";
  }
  return "?";
}

ClusterKind cluster_kind_from_string(const std::string& s) {
  if (s == "brown") return ClusterKind::Brown;
  if (s == "clark") return ClusterKind::Clark;
  if (s == "kmeans") return ClusterKind::Kmeans;
  throw std::invalid_argument("unknown cluster kind: " + s);
}

ClusterLexicon load_brown(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open brown cluster file: " + path);
  ClusterLexicon lex;
  lex.kind = ClusterKind::Brown;
  std::unordered_map<std::string, uint64_t> best_count;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    chomp(line);
    if (line.empty()) continue;
    auto fields = split(line, '\t');
    if (fields.size() != 3) {
      throw DataError(path + ":" + std::to_string(lineno) + ": expected bitpath<TAB>word<TAB>count");
    }
    const std::string& bits = fields[0];
    if (bits.empty() || bits.find_first_not_of("01") != std::string::npos) {
      throw DataError(path + ":" + std::to_string(lineno) + ": bad bit path '" + bits + "'");
    }
    char* endp = nullptr;
    uint64_t count = std::strtoull(fields[2].c_str(), &endp, 10);
    if (endp == fields[2].c_str() || *endp != '\0') {
      throw DataError(path + ":" + std::to_string(lineno) + ": bad count '" + fields[2] + "'");
    }
    auto it = best_count.find(fields[1]);
    if (it == best_count.end() || count > it->second) {
      best_count[fields[1]] = count;
      lex.map[fields[1]] = bits;
    }
  }
  return lex;
}

std::vector<std::string> brown_prefixes(const std::string& path) {
  static const size_t depths[] = {4, 8, 12, 20};
  std::vector<std::string> out;
  for (size_t d : depths) {
    std::string prefix = path.substr(0, std::min(d, path.size()));
    if (out.empty() || out.back() != prefix) out.push_back(std::move(prefix));
  }
  return out;
}

namespace {

ClusterLexicon load_word_class(const std::string& path, ClusterKind kind, LoadReport* report) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open cluster file: " + path);
  ClusterLexicon lex;
  lex.kind = kind;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    chomp(line);
    if (line.empty()) continue;
    auto fields = split(line, '\t');
    if (fields.size() != 2 && fields.size() != 3) {
      throw DataError(path + ":" + std::to_string(lineno) + ": expected word<TAB>class(<TAB>weight)?");
    }
    if (fields[1].empty()) {
      throw DataError(path + ":" + std::to_string(lineno) + ": empty class");
    }
    auto [it, inserted] = lex.map.emplace(fields[0], fields[1]);
    if (!inserted) {
      it->second = fields[1];  // last line wins
      if (report) ++report->warnings;
      std::cerr << "warning: " << path << ":" << lineno << ": duplicate word '" << fields[0]
                << "', keeping last\n";
    }
  }
  return lex;
}

}  // namespace

ClusterLexicon load_clark(const std::string& path, LoadReport* report) {
  return load_word_class(path, ClusterKind::Clark, report);
}

ClusterLexicon load_kmeans_lexicon(const std::string& path, LoadReport* report) {
  return load_word_class(path, ClusterKind::Kmeans, report);
}

void save_cluster_lexicon(const ClusterLexicon& lex, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write cluster file: " + path);
  std::map<std::string, std::string> sorted(lex.map.begin(), lex.map.end());
  for (const auto& [word, cls] : sorted) out << word << '\t' << cls << '\n';
}

WordVectors load_word_vectors(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open vectors file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty vectors file");
  chomp(line);
  std::istringstream header(line);
  size_t vocab_size = 0, dim = 0;
  if (!(header >> vocab_size >> dim) || dim == 0) {
    throw DataError(path + ":1: expected header 'vocab dim'");
  }
  WordVectors vecs;
  vecs.dim = dim;
  vecs.vocab.reserve(vocab_size);
  vecs.data.reserve(vocab_size * dim);
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    chomp(line);
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string word;
    row >> word;
    for (size_t j = 0; j < dim; ++j) {
      float v = 0;
      if (!(row >> v) || !std::isfinite(v)) {
        throw DataError(path + ":" + std::to_string(lineno) + ": expected " +
                        std::to_string(dim) + " finite components");
      }
      vecs.data.push_back(v);
    }
    vecs.vocab.push_back(std::move(word));
  }
  if (vecs.vocab.size() != vocab_size) {
    std::cerr << "warning: " << path << ": header says " << vocab_size << " words, found "
              << vecs.vocab.size() << "\n";
  }
  return vecs;
}

namespace {

// k-means++: each next center drawn with probability proportional to the
// squared distance to the nearest existing center.
std::vector<size_t> kmeanspp_init(const WordVectors& v, size_t k, std::mt19937_64& rng) {
  const size_t n = v.size();
  std::vector<size_t> centers;
  centers.reserve(k);
  std::uniform_int_distribution<size_t> first(0, n - 1);
  centers.push_back(first(rng));

  std::vector<double> d2(n);
  for (size_t i = 0; i < n; ++i) {
    d2[i] = kernels::squared_l2(v.row(i), v.row(centers[0]), v.dim);
  }
  while (centers.size() < k) {
    double total = 0.0;
    for (double w : d2) total += w;
    size_t chosen;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double r = u(rng);
      double acc = 0.0;
      chosen = n - 1;
      for (size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (r < acc) {
          chosen = i;
          break;
        }
      }
    } else {
      // all remaining points coincide with some center; pick any non-center
      chosen = first(rng);
    }
    centers.push_back(chosen);
    for (size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], static_cast<double>(
                                  kernels::squared_l2(v.row(i), v.row(chosen), v.dim)));
    }
  }
  return centers;
}

}  // namespace

KmeansResult kmeans(const WordVectors& vectors, size_t k, uint64_t seed, size_t max_iters) {
  const size_t n = vectors.size();
  const size_t dim = vectors.dim;
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (k > n) throw std::invalid_argument("k exceeds vocabulary size");

  std::mt19937_64 rng(seed);
  std::vector<size_t> seeds = kmeanspp_init(vectors, k, rng);
  std::vector<float> centroids(k * dim);
  for (size_t c = 0; c < k; ++c) {
    const float* src = vectors.row(seeds[c]);
    std::copy(src, src + dim, centroids.begin() + c * dim);
  }

  std::vector<size_t> assign(n, 0);
  std::vector<float> dist_to_own(n, 0.0f);
  KmeansResult result;

  auto assign_all = [&]() {
    size_t changes = 0;
    double inertia = 0.0;
    for (size_t i = 0; i < n; ++i) {
      float best = std::numeric_limits<float>::max();
      size_t best_c = 0;
      for (size_t c = 0; c < k; ++c) {
        float d = kernels::squared_l2(vectors.row(i), centroids.data() + c * dim, dim);
        if (d < best) {
          best = d;
          best_c = c;
        }
      }
      if (assign[i] != best_c) ++changes;
      assign[i] = best_c;
      dist_to_own[i] = best;
      inertia += best;
    }
    result.inertia_history.push_back(inertia);
    return changes;
  };

  assign_all();
  for (size_t iter = 0; iter < max_iters; ++iter) {
    // recompute centroids as cluster means
    std::vector<size_t> sizes(k, 0);
    std::fill(centroids.begin(), centroids.end(), 0.0f);
    for (size_t i = 0; i < n; ++i) {
      kernels::axpy(centroids.data() + assign[i] * dim, 1.0f, vectors.row(i), dim);
      ++sizes[assign[i]];
    }
    for (size_t c = 0; c < k; ++c) {
      if (sizes[c] > 0) {
        kernels::scale(centroids.data() + c * dim, 1.0f / static_cast<float>(sizes[c]), dim);
      }
    }
    // re-seed empty clusters with the point farthest from its centroid
    for (size_t c = 0; c < k; ++c) {
      if (sizes[c] > 0) continue;
      size_t farthest = 0;
      float worst = -1.0f;
      for (size_t i = 0; i < n; ++i) {
        if (sizes[assign[i]] <= 1) continue;  // do not empty another cluster
        if (dist_to_own[i] > worst) {
          worst = dist_to_own[i];
          farthest = i;
        }
      }
      if (worst <= 0.0f) continue;  // nothing improvable
      const float* src = vectors.row(farthest);
      std::copy(src, src + dim, centroids.begin() + c * dim);
      --sizes[assign[farthest]];
      assign[farthest] = c;
      sizes[c] = 1;
      dist_to_own[farthest] = 0.0f;
    }
    result.iterations = iter + 1;
    size_t changes = assign_all();
    // Lloyd steps never increase inertia (float-rounding slack only).
    assert([&] {
      size_t m = result.inertia_history.size();
      if (m < 2) return true;
      double prev = result.inertia_history[m - 2];
      return result.inertia_history[m - 1] <= prev * (1.0 + 1e-6) + 1e-9;
    }());
    if (changes == 0) break;
  }

  result.lexicon.kind = ClusterKind::Kmeans;
  for (size_t i = 0; i < n; ++i) {
    result.lexicon.map[vectors.vocab[i]] = std::to_string(assign[i]);
  }
  return result;
}

}  // namespace elixa
