// Scalar reference kernels. These define the canonical arithmetic order;
// the SIMD backends reproduce it exactly (see kernels.hpp).

#include <cmath>
#include <cstddef>

#include "kernel_table.hpp"

namespace convsearch::kern {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += x[i] * y[i];
        s1 += x[i + 1] * y[i + 1];
        s2 += x[i + 2] * y[i + 2];
        s3 += x[i + 3] * y[i + 3];
    }
    double s = (s0 + s1) + (s2 + s3);
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void adamw_scalar(double* w, double* m, double* v, const double* g,
                  std::size_t n, const AdamWStep& c) {
    const double om_b1 = 1.0 - c.beta1;
    const double om_b2 = 1.0 - c.beta2;
    for (std::size_t i = 0; i < n; ++i) {
        const double gi = g[i];
        const double mi = c.beta1 * m[i] + om_b1 * gi;
        const double vi = c.beta2 * v[i] + om_b2 * (gi * gi);
        m[i] = mi;
        v[i] = vi;
        const double mhat = mi * c.bias1;
        const double vhat = vi * c.bias2;
        const double denom = std::sqrt(vhat) + c.eps;
        w[i] -= c.lr * (mhat / denom + c.weight_decay * w[i]);
    }
}

}  // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{dot_scalar, axpy_scalar, adamw_scalar};
    return table;
}

}  // namespace convsearch::kern
