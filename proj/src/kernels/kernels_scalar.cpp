#include <cmath>

#include "hyperocc/kernels.hpp"

namespace hyperocc::kernels {
namespace {

float dot_scalar(const float* a, const float* b, std::size_t n) {
  float sum = 0.0f;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

float squared_distance_scalar(const float* a, const float* b, std::size_t n) {
  float sum = 0.0f;
  for (std::size_t i = 0; i < n; ++i) {
    const float d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

void matvec_bias_scalar(const float* w, const float* x, const float* bias, float* y,
                        std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    const float acc = dot_scalar(w + r * cols, x, cols);
    y[r] = bias ? acc + bias[r] : acc;
  }
}

void rank1_update_scalar(float* w, const float* u, const float* v, float alpha, std::size_t rows,
                         std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    const float s = alpha * u[r];
    float* row = w + r * cols;
    for (std::size_t c = 0; c < cols; ++c) row[c] = row[c] + s * v[c];
  }
}

void axpy_scalar(float alpha, const float* x, float* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

void adam_update_scalar(float* params, const float* grads, float* m, float* v, std::size_t n,
                        const AdamCoefficients& c) {
  const float one_minus_b1 = 1.0f - c.beta1;
  const float one_minus_b2 = 1.0f - c.beta2;
  for (std::size_t i = 0; i < n; ++i) {
    const float g = grads[i] + c.weight_decay * params[i];
    m[i] = c.beta1 * m[i] + one_minus_b1 * g;
    v[i] = c.beta2 * v[i] + one_minus_b2 * (g * g);
    const float m_hat = m[i] / c.bias_correction1;
    const float v_hat = v[i] / c.bias_correction2;
    params[i] = params[i] - c.lr * m_hat / (std::sqrt(v_hat) + c.eps);
  }
}

}  // namespace

const KernelTable& scalar() {
  static const KernelTable table{
      "scalar",           dot_scalar, squared_distance_scalar, matvec_bias_scalar,
      rank1_update_scalar, axpy_scalar, adam_update_scalar,
  };
  return table;
}

}  // namespace hyperocc::kernels
