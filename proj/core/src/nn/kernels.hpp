#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

// Inner loops shared by the tensor ops. Four independent accumulators let the
// compiler keep the dot product in vector registers without reassociating
// floating-point sums behind our back.
namespace aomd::nn::kernels {

inline double dot(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

// y += alpha * x
inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline void softmax_inplace(double* v, std::size_t n) {
  const double hi = *std::max_element(v, v + n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = std::exp(v[i] - hi);
    total += v[i];
  }
  for (std::size_t i = 0; i < n; ++i) v[i] /= total;
}

}  // namespace aomd::nn::kernels
