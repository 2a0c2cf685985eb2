#include "elixa/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace elixa {

PrfScore span_prf(const std::vector<SpanPrediction>& gold,
                  const std::vector<SpanPrediction>& pred) {
  std::unordered_map<std::string, const std::set<Span>*> by_id;
  for (const auto& g : gold) {
    if (!by_id.emplace(g.id, &g.spans).second) {
      throw std::invalid_argument("duplicate gold sentence id: " + g.id);
    }
  }
  if (pred.size() != gold.size()) throw std::invalid_argument("gold/pred id sets differ");
  size_t matched = 0, n_gold = 0, n_pred = 0;
  for (const auto& p : pred) {
    auto it = by_id.find(p.id);
    if (it == by_id.end()) throw std::invalid_argument("prediction for unknown id: " + p.id);
    const std::set<Span>& g = *it->second;
    n_gold += g.size();
    n_pred += p.spans.size();
    for (const Span& s : p.spans) matched += g.count(s);
  }
  PrfScore score;
  score.precision = n_pred == 0 ? 0.0 : static_cast<double>(matched) / n_pred;
  score.recall = n_gold == 0 ? 0.0 : static_cast<double>(matched) / n_gold;
  double pr = score.precision + score.recall;
  score.f1 = pr == 0.0 ? 0.0 : 2.0 * score.precision * score.recall / pr;
  return score;
}

double accuracy(const std::vector<std::string>& gold, const std::vector<std::string>& pred) {
  if (gold.empty()) throw std::invalid_argument("accuracy of empty label list");
  if (gold.size() != pred.size()) throw std::invalid_argument("label list length mismatch");
  size_t correct = 0;
  for (size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] == pred[i]) ++correct;
  }
  return static_cast<double>(correct) / gold.size();
}

FoldPlan make_folds(size_t n, size_t folds, uint64_t seed,
                    const std::vector<std::string>* strata) {
  if (folds < 2) throw std::invalid_argument("folds must be >= 2");
  if (folds > n) throw std::invalid_argument("more folds than items");
  if (strata && strata->size() != n) throw std::invalid_argument("strata length mismatch");

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  FoldPlan plan;
  plan.folds = folds;
  plan.seed = seed;
  plan.assignment.assign(n, 0);
  size_t counter = 0;
  if (strata) {
    std::map<std::string, std::vector<size_t>> groups;  // sorted label order
    for (size_t i : order) groups[(*strata)[i]].push_back(i);
    for (const auto& [label, items] : groups) {
      (void)label;
      for (size_t i : items) plan.assignment[i] = counter++ % folds;
    }
  } else {
    for (size_t i : order) plan.assignment[i] = counter++ % folds;
  }
  return plan;
}

std::string to_aligned_text(const Table& table) {
  std::vector<size_t> widths(table.header.size(), 0);
  auto widen = [&](const std::vector<std::string>& row) {
    for (size_t i = 0; i < row.size() && i < widths.size(); ++i) {
      widths[i] = std::max(widths[i], row[i].size());
    }
  };
  widen(table.header);
  for (const auto& row : table.rows) widen(row);

  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& row) {
    for (size_t i = 0; i < widths.size(); ++i) {
      const std::string& cell = i < row.size() ? row[i] : std::string();
      out << cell;
      if (i + 1 < widths.size()) out << std::string(widths[i] - cell.size() + 2, ' ');
    }
    out << '\n';
  };
  emit(table.header);
  size_t total = std::accumulate(widths.begin(), widths.end(), size_t{0}) +
                 2 * (widths.empty() ? 0 : widths.size() - 1);
  out << std::string(total, '-') << '\n';
  for (const auto& row : table.rows) emit(row);
  return out.str();
}

std::string to_csv(const Table& table) {
  auto escape = [](const std::string& cell) {
    if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
    std::string quoted = "\"";
    for (char c : cell) {
      if (c == '"') quoted += '"';
      quoted += c;
    }
    quoted += '"';
    return quoted;
  };
  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& row) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << escape(row[i]);
    }
    out << '\n';
  };
  emit(table.header);
  for (const auto& row : table.rows) emit(row);
  return out.str();
}

std::string percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", fraction * 100.0);
  return buf;
}

}  // namespace elixa
