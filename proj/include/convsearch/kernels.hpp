#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

// Data-parallel inner loops shared by the dense encoder, the exact
// inner-product index, and the optimizer. Each kernel has a scalar
// reference implementation and SIMD variants (AVX2 on x86-64, NEON on
// aarch64) selected once at runtime.
//
// Every backend follows the same pinned arithmetic order: reductions run
// four independent accumulator streams over stride-4 blocks, combined as
// (s0 + s1) + (s2 + s3), with the tail added left to right, and no
// fused-multiply-add anywhere. All backends therefore produce bit-identical
// results, which the equivalence tests assert exactly. Checkpoints and run
// files stay byte-stable no matter which backend the host selects.

namespace convsearch::kern {

enum class Backend { scalar, avx2, neon };

// Backend currently servicing the kernel entry points.
Backend active_backend();
std::string_view backend_name(Backend b);
std::vector<Backend> available_backends();

// Force a specific backend (used by the equivalence tests and the
// CONVSEARCH_KERNELS=scalar|avx2|neon environment override). Returns false
// and leaves the selection unchanged if the backend is not available on
// this host.
bool set_backend(Backend b);

// sum_i x[i] * y[i]
double dot(const double* x, const double* y, std::size_t n);

// y[i] += a * x[i]
void axpy(double a, const double* x, double* y, std::size_t n);

// Per-step constants for a decoupled-weight-decay Adam update. The bias
// corrections depend on the step count and are computed once by the caller.
struct AdamWStep {
    double lr;
    double beta1;
    double beta2;
    double eps;
    double weight_decay;
    double bias1;  // 1 / (1 - beta1^t)
    double bias2;  // 1 / (1 - beta2^t)
};

// In place, for every element:
//   m = beta1*m + (1-beta1)*g
//   v = beta2*v + (1-beta2)*g*g
//   w -= lr * ( (m*bias1) / (sqrt(v*bias2) + eps) + weight_decay*w )
void adamw_update(double* w, double* m, double* v, const double* g,
                  std::size_t n, const AdamWStep& c);

}  // namespace convsearch::kern
