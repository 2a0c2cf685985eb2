#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace elixa {

// Sparse feature vector: (index, value) pairs, indices strictly increasing.
using SparseVector = std::vector<std::pair<uint32_t, double>>;

double sparse_dot(const SparseVector& a, const SparseVector& b);
double dense_sparse_dot(const std::vector<double>& w, const SparseVector& x);
void add_scaled(std::vector<double>& w, double alpha, const SparseVector& x);

struct BinarySvm {
  std::vector<double> w;
  double b = 0.0;

  double decision(const SparseVector& x) const { return dense_sparse_dot(w, x) + b; }
};

struct SmoOptions {
  double c = 1.0;
  double tol = 1e-3;     // KKT tolerance
  double eps = 1e-12;    // progress/rounding guard
  uint64_t seed = 1;     // examination order tie-breaking
};

// Soft-margin linear SVM dual solved with Platt's sequential minimal
// optimization (two-variable analytic subproblems, Platt's working-set
// heuristics). Labels must be +1/-1 and both classes present.
// alphas_out, when given, receives the final dual variables.
//
// J. Platt, Sequential Minimal Optimization: A Fast Algorithm for Training
// Support Vector Machines, 1998.
BinarySvm smo_train_binary(const std::vector<SparseVector>& xs, const std::vector<int>& ys,
                           size_t dim, const SmoOptions& opts = {},
                           std::vector<double>* alphas_out = nullptr);

// Dual objective W(alpha) = sum(a) - 1/2 sum_ij a_i a_j y_i y_j <x_i,x_j>.
double dual_objective(const std::vector<SparseVector>& xs, const std::vector<int>& ys,
                      const std::vector<double>& alphas);

// Largest KKT violation of the trained machine over the training set
// (0 means every sample satisfies its condition exactly).
double max_kkt_violation(const std::vector<SparseVector>& xs, const std::vector<int>& ys,
                         const std::vector<double>& alphas, const BinarySvm& svm, double c);

}  // namespace elixa
