#include "elixa/kernels.hpp"

namespace elixa::kernels {

namespace {

struct Vtable {
  float (*squared_l2)(const float*, const float*, size_t);
  void (*axpy)(float*, float, const float*, size_t);
  void (*scale)(float*, float, size_t);
};

constexpr Vtable kScalar{&ref::squared_l2, &ref::axpy, &ref::scale};
constexpr Vtable kAvx2{&avx2::squared_l2, &avx2::axpy, &avx2::scale};

Backend g_backend = Backend::Auto;
const Vtable* g_vtable = nullptr;

const Vtable* resolve(Backend req, Backend* effective) {
  if (req == Backend::Scalar || (req != Backend::Avx2 && !avx2::supported())) {
    *effective = Backend::Scalar;
    return &kScalar;
  }
  if (avx2::supported()) {
    *effective = Backend::Avx2;
    return &kAvx2;
  }
  *effective = Backend::Scalar;
  return &kScalar;
}

const Vtable* table() {
  if (!g_vtable) g_vtable = resolve(Backend::Auto, &g_backend);
  return g_vtable;
}

}  // namespace

Backend select_backend(Backend req) {
  g_vtable = resolve(req, &g_backend);
  return g_backend;
}

Backend active_backend() {
  table();
  return g_backend;
}

const char* backend_name() {
  return active_backend() == Backend::Avx2 ? "avx2" : "scalar";
}

float squared_l2(const float* a, const float* b, size_t n) {
  return table()->squared_l2(a, b, n);
}

void axpy(float* y, float alpha, const float* x, size_t n) { table()->axpy(y, alpha, x, n); }

void scale(float* x, float alpha, size_t n) { table()->scale(x, alpha, n); }

}  // namespace elixa::kernels
