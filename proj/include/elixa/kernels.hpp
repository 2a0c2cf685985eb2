#pragma once

#include <cstddef>
#include <string>

// Dense float kernels for the vector-space paths (k-means over word
// embeddings). A scalar reference implementation always exists; an AVX2
// variant is selected at runtime when the CPU supports it. SIMD variants
// may round differently from the reference (different summation order),
// so equivalence is tested to a tolerance, not bit-exactly.

namespace elixa::kernels {

enum class Backend { Auto, Scalar, Avx2 };

// Selects the backend for subsequent calls. Auto picks the best available.
// Returns the backend actually in effect (Avx2 requests fall back to Scalar
// when unsupported).
Backend select_backend(Backend req);

Backend active_backend();
const char* backend_name();

// Squared Euclidean distance between a and b.
float squared_l2(const float* a, const float* b, size_t n);

// y += alpha * x
void axpy(float* y, float alpha, const float* x, size_t n);

// x *= alpha
void scale(float* x, float alpha, size_t n);

namespace ref {
float squared_l2(const float* a, const float* b, size_t n);
void axpy(float* y, float alpha, const float* x, size_t n);
void scale(float* x, float alpha, size_t n);
}  // namespace ref

namespace avx2 {
bool supported();  // compiled in and the CPU has AVX2
float squared_l2(const float* a, const float* b, size_t n);
void axpy(float* y, float alpha, const float* x, size_t n);
void scale(float* x, float alpha, size_t n);
}  // namespace avx2

}  // namespace elixa::kernels
