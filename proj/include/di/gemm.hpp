#pragma once

#include <cstdint>

namespace di {

// Small deterministic GEMM kernels. Loop orders and accumulation orders are
// fixed in source, so results are bit-identical across runs and thread
// counts; no -ffast-math style reassociation is relied on.

// C(m,n) += A(m,k) * B(k,n)
template <typename T>
void gemm_nn_acc(const T* a, const T* b, T* c, int64_t m, int64_t k, int64_t n) {
  for (int64_t i = 0; i < m; ++i) {
    const T* arow = a + i * k;
    T* crow = c + i * n;
    for (int64_t p = 0; p < k; ++p) {
      const T av = arow[p];
      const T* brow = b + p * n;
      for (int64_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

// Dot product with eight explicit accumulators. The partial-sum order is
// defined by the source, which lets the compiler keep it vectorized
// without changing results.
template <typename T>
T dot8(const T* x, const T* y, int64_t n) {
  T acc[8] = {T(0), T(0), T(0), T(0), T(0), T(0), T(0), T(0)};
  int64_t p = 0;
  for (; p + 8 <= n; p += 8)
    for (int64_t u = 0; u < 8; ++u) acc[u] += x[p + u] * y[p + u];
  T tail = T(0);
  for (; p < n; ++p) tail += x[p] * y[p];
  return ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7])) + tail;
}

// C(m,n) += A(m,k) * B(n,k)^T
template <typename T>
void gemm_nt_acc(const T* a, const T* b, T* c, int64_t m, int64_t k, int64_t n) {
  for (int64_t i = 0; i < m; ++i) {
    const T* arow = a + i * k;
    T* crow = c + i * n;
    for (int64_t j = 0; j < n; ++j) crow[j] += dot8(arow, b + j * k, k);
  }
}

// Plain sum with the same fixed 8-lane accumulation order as dot8.
template <typename T>
T sum8(const T* x, int64_t n) {
  T acc[8] = {T(0), T(0), T(0), T(0), T(0), T(0), T(0), T(0)};
  int64_t p = 0;
  for (; p + 8 <= n; p += 8)
    for (int64_t u = 0; u < 8; ++u) acc[u] += x[p + u];
  T tail = T(0);
  for (; p < n; ++p) tail += x[p];
  return ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7])) + tail;
}

// Sum of squared deviations from a fixed center, 8-lane order.
template <typename T>
T sumsq_centered8(const T* x, int64_t n, T center) {
  T acc[8] = {T(0), T(0), T(0), T(0), T(0), T(0), T(0), T(0)};
  int64_t p = 0;
  for (; p + 8 <= n; p += 8)
    for (int64_t u = 0; u < 8; ++u) {
      const T d = x[p + u] - center;
      acc[u] += d * d;
    }
  T tail = T(0);
  for (; p < n; ++p) {
    const T d = x[p] - center;
    tail += d * d;
  }
  return ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7])) + tail;
}

// Simultaneous sum(x) and dot(x, y), 8-lane order; one pass over memory.
template <typename T>
void sum_and_dot8(const T* x, const T* y, int64_t n, T& out_sum, T& out_dot) {
  T sacc[8] = {T(0), T(0), T(0), T(0), T(0), T(0), T(0), T(0)};
  T dacc[8] = {T(0), T(0), T(0), T(0), T(0), T(0), T(0), T(0)};
  int64_t p = 0;
  for (; p + 8 <= n; p += 8)
    for (int64_t u = 0; u < 8; ++u) {
      sacc[u] += x[p + u];
      dacc[u] += x[p + u] * y[p + u];
    }
  T stail = T(0), dtail = T(0);
  for (; p < n; ++p) {
    stail += x[p];
    dtail += x[p] * y[p];
  }
  out_sum = ((sacc[0] + sacc[1]) + (sacc[2] + sacc[3])) +
            ((sacc[4] + sacc[5]) + (sacc[6] + sacc[7])) + stail;
  out_dot = ((dacc[0] + dacc[1]) + (dacc[2] + dacc[3])) +
            ((dacc[4] + dacc[5]) + (dacc[6] + dacc[7])) + dtail;
}

// C(m,n) += A(k,m)^T * B(k,n)
template <typename T>
void gemm_tn_acc(const T* a, const T* b, T* c, int64_t m, int64_t k, int64_t n) {
  for (int64_t p = 0; p < k; ++p) {
    const T* arow = a + p * m;
    const T* brow = b + p * n;
    for (int64_t i = 0; i < m; ++i) {
      const T av = arow[i];
      T* crow = c + i * n;
      for (int64_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

}  // namespace di
