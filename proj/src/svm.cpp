#include "elixa/svm.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace elixa {

double sparse_dot(const SparseVector& a, const SparseVector& b) {
  double s = 0.0;
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first < b[j].first) {
      ++i;
    } else if (a[i].first > b[j].first) {
      ++j;
    } else {
      s += a[i].second * b[j].second;
      ++i;
      ++j;
    }
  }
  return s;
}

double dense_sparse_dot(const std::vector<double>& w, const SparseVector& x) {
  double s = 0.0;
  for (const auto& [idx, val] : x) {
    if (idx < w.size()) s += w[idx] * val;
  }
  return s;
}

void add_scaled(std::vector<double>& w, double alpha, const SparseVector& x) {
  for (const auto& [idx, val] : x) {
    if (idx >= w.size()) w.resize(idx + 1, 0.0);
    w[idx] += alpha * val;
  }
}

namespace {

struct SmoState {
  const std::vector<SparseVector>& xs;
  const std::vector<int>& ys;
  double c;
  double tol;
  double eps;
  std::vector<double> alpha;
  std::vector<double> w;
  double b = 0.0;
  std::vector<double> kdiag;
  std::mt19937_64 rng;

  SmoState(const std::vector<SparseVector>& xs_, const std::vector<int>& ys_, size_t dim,
           const SmoOptions& opts)
      : xs(xs_), ys(ys_), c(opts.c), tol(opts.tol), eps(opts.eps), rng(opts.seed) {
    alpha.assign(xs.size(), 0.0);
    w.assign(dim, 0.0);
    kdiag.resize(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) kdiag[i] = sparse_dot(xs[i], xs[i]);
  }

  double error(size_t i) const { return dense_sparse_dot(w, xs[i]) + b - ys[i]; }

  bool non_bound(size_t i) const { return alpha[i] > 0.0 && alpha[i] < c; }

  bool take_step(size_t i1, size_t i2) {
    if (i1 == i2) return false;
    double a1 = alpha[i1], a2 = alpha[i2];
    double y1 = ys[i1], y2 = ys[i2];
    double s = y1 * y2;
    double e1 = error(i1), e2 = error(i2);

    double lo, hi;
    if (y1 != y2) {
      lo = std::max(0.0, a2 - a1);
      hi = std::min(c, c + a2 - a1);
    } else {
      lo = std::max(0.0, a1 + a2 - c);
      hi = std::min(c, a1 + a2);
    }
    if (lo >= hi) return false;

    double k11 = kdiag[i1];
    double k22 = kdiag[i2];
    double k12 = sparse_dot(xs[i1], xs[i2]);
    double eta = k11 + k22 - 2.0 * k12;

    double a2new;
    if (eta > 0.0) {
      a2new = a2 + y2 * (e1 - e2) / eta;
      a2new = std::clamp(a2new, lo, hi);
    } else {
      // Degenerate curvature: compare the objective at both clip bounds.
      double g1 = e1 - b;  // w.x1 - y1
      double g2 = e2 - b;
      double f1 = y1 * g1 - a1 * k11 - s * a2 * k12;
      double f2 = y2 * g2 - s * a1 * k12 - a2 * k22;
      double l1 = a1 + s * (a2 - lo);
      double h1 = a1 + s * (a2 - hi);
      double psi_lo = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 + 0.5 * lo * lo * k22 + s * lo * l1 * k12;
      double psi_hi = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 + 0.5 * hi * hi * k22 + s * hi * h1 * k12;
      if (psi_lo < psi_hi - eps) {
        a2new = lo;
      } else if (psi_lo > psi_hi + eps) {
        a2new = hi;
      } else {
        return false;
      }
    }

    if (std::abs(a2new - a2) < eps * (a2new + a2 + eps)) return false;

    double a1new = a1 + s * (a2 - a2new);
    if (a1new < 0.0) {
      a2new += s * a1new;
      a1new = 0.0;
    } else if (a1new > c) {
      a2new += s * (a1new - c);
      a1new = c;
    }

    double d1 = y1 * (a1new - a1);
    double d2 = y2 * (a2new - a2);
    double b1 = b - e1 - d1 * k11 - d2 * k12;
    double b2 = b - e2 - d1 * k12 - d2 * k22;
    if (a1new > 0.0 && a1new < c) {
      b = b1;
    } else if (a2new > 0.0 && a2new < c) {
      b = b2;
    } else {
      b = 0.5 * (b1 + b2);
    }

    add_scaled(w, d1, xs[i1]);
    add_scaled(w, d2, xs[i2]);
    alpha[i1] = a1new;
    alpha[i2] = a2new;

#ifndef NDEBUG
    assert(a1new >= -1e-9 && a1new <= c + 1e-9);
    assert(a2new >= -1e-9 && a2new <= c + 1e-9);
    double sum = 0.0;
    for (size_t i = 0; i < alpha.size(); ++i) sum += alpha[i] * ys[i];
    assert(std::abs(sum) < 1e-6 * (1.0 + c * alpha.size()));
#endif
    return true;
  }

  int examine(size_t i2) {
    double y2 = ys[i2];
    double a2 = alpha[i2];
    double e2 = error(i2);
    double r2 = e2 * y2;
    if (!((r2 < -tol && a2 < c) || (r2 > tol && a2 > 0.0))) return 0;

    // Second-choice heuristic: maximize |E1 - E2| over non-bound samples.
    size_t n = xs.size();
    size_t best = n;
    double best_gap = -1.0;
    for (size_t i = 0; i < n; ++i) {
      if (!non_bound(i)) continue;
      double gap = std::abs(error(i) - e2);
      if (gap > best_gap) {
        best_gap = gap;
        best = i;
      }
    }
    if (best < n && take_step(best, i2)) return 1;

    size_t start = rng() % n;
    for (size_t off = 0; off < n; ++off) {
      size_t i = (start + off) % n;
      if (non_bound(i) && take_step(i, i2)) return 1;
    }
    start = rng() % n;
    for (size_t off = 0; off < n; ++off) {
      size_t i = (start + off) % n;
      if (take_step(i, i2)) return 1;
    }
    return 0;
  }
};

}  // namespace

BinarySvm smo_train_binary(const std::vector<SparseVector>& xs, const std::vector<int>& ys,
                           size_t dim, const SmoOptions& opts, std::vector<double>* alphas_out) {
  if (xs.empty() || xs.size() != ys.size()) {
    throw std::invalid_argument("smo_train_binary: bad training set shape");
  }
  bool has_pos = false, has_neg = false;
  for (int y : ys) {
    if (y == 1) {
      has_pos = true;
    } else if (y == -1) {
      has_neg = true;
    } else {
      throw std::invalid_argument("smo_train_binary: labels must be +1 or -1");
    }
  }
  if (!has_pos || !has_neg) {
    throw std::invalid_argument("smo_train_binary: both classes required");
  }
  if (opts.c <= 0.0) throw std::invalid_argument("smo_train_binary: C must be positive");

  SmoState st(xs, ys, dim, opts);
  size_t n = xs.size();
  // Generous cap so a pathological input terminates instead of cycling.
  size_t max_rounds = 2000 + 200 * n;
  size_t rounds = 0;

  size_t changed = 0;
  bool examine_all = true;
  while ((changed > 0 || examine_all) && rounds < max_rounds) {
    ++rounds;
    changed = 0;
    if (examine_all) {
      for (size_t i = 0; i < n; ++i) changed += st.examine(i);
    } else {
      for (size_t i = 0; i < n; ++i) {
        if (st.non_bound(i)) changed += st.examine(i);
      }
    }
    if (examine_all) {
      examine_all = false;
    } else if (changed == 0) {
      examine_all = true;
    }
  }

  // Platt's running threshold tracks the last optimized pair and can land
  // outside the interval the final alphas admit when every support vector sits
  // on a bound. Rebuild it from the alpha box constraints (Keerthi et al.'s
  // threshold interval); the midpoint keeps every KKT violation within tol.
  const double bound_eps = 1e-8 * st.c;
  const double inf = std::numeric_limits<double>::infinity();
  double lower = -inf, upper = inf;
  for (size_t i = 0; i < n; ++i) {
    double g = ys[i] - dense_sparse_dot(st.w, xs[i]);  // b putting i on the margin
    bool at_zero = st.alpha[i] <= bound_eps;
    bool at_c = st.alpha[i] >= st.c - bound_eps;
    if (!at_zero && !at_c) {
      lower = std::max(lower, g);
      upper = std::min(upper, g);
    } else if ((ys[i] == 1 && at_zero) || (ys[i] == -1 && at_c)) {
      lower = std::max(lower, g);
    } else {
      upper = std::min(upper, g);
    }
  }
  if (lower > -inf && upper < inf) {
    st.b = 0.5 * (lower + upper);
  } else if (lower > -inf) {
    st.b = lower;
  } else if (upper < inf) {
    st.b = upper;
  }

  if (alphas_out) *alphas_out = st.alpha;
  BinarySvm out;
  out.w = std::move(st.w);
  out.b = st.b;
  return out;
}

double dual_objective(const std::vector<SparseVector>& xs, const std::vector<int>& ys,
                      const std::vector<double>& alphas) {
  double obj = 0.0;
  for (double a : alphas) obj += a;
  for (size_t i = 0; i < xs.size(); ++i) {
    if (alphas[i] == 0.0) continue;
    for (size_t j = 0; j < xs.size(); ++j) {
      if (alphas[j] == 0.0) continue;
      obj -= 0.5 * alphas[i] * alphas[j] * ys[i] * ys[j] * sparse_dot(xs[i], xs[j]);
    }
  }
  return obj;
}

double max_kkt_violation(const std::vector<SparseVector>& xs, const std::vector<int>& ys,
                         const std::vector<double>& alphas, const BinarySvm& svm, double c) {
  // Alphas come out of floating-point updates, so classify "at a bound" with
  // ulp-scale slack; an exact comparison would demand margin == 1 of a point
  // sitting one rounding error inside the box.
  const double bound_eps = 1e-8 * c;
  double worst = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    double margin = ys[i] * svm.decision(xs[i]);
    double v = 0.0;
    if (alphas[i] <= bound_eps) {
      v = std::max(0.0, 1.0 - margin);  // want margin >= 1
    } else if (alphas[i] >= c - bound_eps) {
      v = std::max(0.0, margin - 1.0);  // want margin <= 1
    } else {
      v = std::abs(margin - 1.0);  // want margin == 1
    }
    worst = std::max(worst, v);
  }
  return worst;
}

}  // namespace elixa
