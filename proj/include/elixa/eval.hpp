#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "elixa/text.hpp"

namespace elixa {

struct SpanPrediction {
  std::string id;
  std::set<Span> spans;
};

struct PrfScore {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

// Exact-match span P/R/F1 over sentence-aligned predictions.
// 0/0 := 0 for P and R; F1 := 0 when P+R = 0.
// Throws std::invalid_argument when the id sets differ.
PrfScore span_prf(const std::vector<SpanPrediction>& gold,
                  const std::vector<SpanPrediction>& pred);

// Fraction of equal positions. Throws on length mismatch or empty input.
double accuracy(const std::vector<std::string>& gold, const std::vector<std::string>& pred);

struct FoldPlan {
  size_t folds = 0;
  std::vector<size_t> assignment;  // item index -> fold id
  uint64_t seed = 0;
};

// Seeded shuffle then round-robin assignment; with strata, items are
// grouped by label (groups in sorted label order) and the round-robin
// counter continues across groups so fold sizes stay within 1.
FoldPlan make_folds(size_t n, size_t folds, uint64_t seed,
                    const std::vector<std::string>* strata = nullptr);

// Simple report table rendered as aligned text or CSV.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string to_aligned_text(const Table& table);
std::string to_csv(const Table& table);

// Formats a fraction as a percentage with two decimals, e.g. 0.7303 -> "73.03".
std::string percent(double fraction);

}  // namespace elixa
