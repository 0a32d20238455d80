#pragma once

#include <cstddef>
#include <string_view>

namespace hyperocc::kernels {

struct AdamCoefficients {
  float lr;
  float beta1;
  float beta2;
  float eps;
  float weight_decay;      // coupled L2, added to the gradient before the moments
  float bias_correction1;  // 1 - beta1^t
  float bias_correction2;  // 1 - beta2^t
};

/// Float32 inner loops used by the projector, the loss and the optimizer.
///
/// Every variant must agree with the scalar reference: elementwise kernels
/// (axpy, rank1_update, adam_update) bit for bit, reductions (dot,
/// squared_distance, matvec_bias) up to summation-order rounding.
struct KernelTable {
  std::string_view name;

  float (*dot)(const float* a, const float* b, std::size_t n);
  float (*squared_distance)(const float* a, const float* b, std::size_t n);
  // y = W x + bias, W row-major rows x cols. bias may be null.
  void (*matvec_bias)(const float* w, const float* x, const float* bias, float* y, std::size_t rows,
                      std::size_t cols);
  // W += (alpha * u) v^T
  void (*rank1_update)(float* w, const float* u, const float* v, float alpha, std::size_t rows,
                       std::size_t cols);
  // y += alpha * x
  void (*axpy)(float alpha, const float* x, float* y, std::size_t n);
  // One Adam step over a flat parameter block.
  void (*adam_update)(float* params, const float* grads, float* m, float* v, std::size_t n,
                      const AdamCoefficients& c);
};

const KernelTable& scalar();

/// AVX2+FMA variant, or nullptr when it was not compiled in or the CPU lacks it.
const KernelTable* avx2();

/// Best available table. HYPEROCC_KERNELS=scalar|avx2 forces a choice.
const KernelTable& active();

}  // namespace hyperocc::kernels
