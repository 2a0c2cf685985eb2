#include "elixa/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)
#define ELIXA_HAVE_AVX2_BUILD 1
#include <immintrin.h>
#else
#define ELIXA_HAVE_AVX2_BUILD 0
#endif

namespace elixa::kernels::avx2 {

#if ELIXA_HAVE_AVX2_BUILD

bool supported() { return __builtin_cpu_supports("avx2"); }

float squared_l2(const float* a, const float* b, size_t n) {
  __m256 acc = _mm256_setzero_ps();
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 va = _mm256_loadu_ps(a + i);
    __m256 vb = _mm256_loadu_ps(b + i);
    __m256 d = _mm256_sub_ps(va, vb);
    acc = _mm256_add_ps(acc, _mm256_mul_ps(d, d));
  }
  // horizontal sum of the 8 lanes
  __m128 lo = _mm256_castps256_ps128(acc);
  __m128 hi = _mm256_extractf128_ps(acc, 1);
  __m128 sum4 = _mm_add_ps(lo, hi);
  __m128 sum2 = _mm_add_ps(sum4, _mm_movehl_ps(sum4, sum4));
  __m128 sum1 = _mm_add_ss(sum2, _mm_shuffle_ps(sum2, sum2, 0x55));
  float total = _mm_cvtss_f32(sum1);
  for (; i < n; ++i) {
    float d = a[i] - b[i];
    total += d * d;
  }
  return total;
}

void axpy(float* y, float alpha, const float* x, size_t n) {
  __m256 va = _mm256_set1_ps(alpha);
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 vy = _mm256_loadu_ps(y + i);
    __m256 vx = _mm256_loadu_ps(x + i);
    vy = _mm256_add_ps(vy, _mm256_mul_ps(va, vx));
    _mm256_storeu_ps(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale(float* x, float alpha, size_t n) {
  __m256 va = _mm256_set1_ps(alpha);
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_ps(x + i, _mm256_mul_ps(_mm256_loadu_ps(x + i), va));
  }
  for (; i < n; ++i) x[i] *= alpha;
}

#else  // non-x86 build: stubs, never selected

bool supported() { return false; }
float squared_l2(const float* a, const float* b, size_t n) { return ref::squared_l2(a, b, n); }
void axpy(float* y, float alpha, const float* x, size_t n) { ref::axpy(y, alpha, x, n); }
void scale(float* x, float alpha, size_t n) { ref::scale(x, alpha, n); }

#endif

}  // namespace elixa::kernels::avx2
