// NEON kernels for aarch64, 2 doubles per vector. Two vector accumulators
// carry the four reference streams (acc01 holds s0/s1, acc23 holds s2/s3),
// so the reduction order matches the scalar reference bit for bit.

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cmath>
#include <cstddef>

#include "kernel_table.hpp"

namespace convsearch::kern {
namespace {

double dot_neon(const double* x, const double* y, std::size_t n) {
    float64x2_t acc01 = vdupq_n_f64(0.0);
    float64x2_t acc23 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc01 = vaddq_f64(acc01, vmulq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
        acc23 = vaddq_f64(acc23,
                          vmulq_f64(vld1q_f64(x + i + 2), vld1q_f64(y + i + 2)));
    }
    double s = (vgetq_lane_f64(acc01, 0) + vgetq_lane_f64(acc01, 1)) +
               (vgetq_lane_f64(acc23, 0) + vgetq_lane_f64(acc23, 1));
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
    const float64x2_t av = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t prod = vmulq_f64(av, vld1q_f64(x + i));
        vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), prod));
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void adamw_neon(double* w, double* m, double* v, const double* g,
                std::size_t n, const AdamWStep& c) {
    const double om_b1s = 1.0 - c.beta1;
    const double om_b2s = 1.0 - c.beta2;
    const float64x2_t b1 = vdupq_n_f64(c.beta1);
    const float64x2_t b2 = vdupq_n_f64(c.beta2);
    const float64x2_t om_b1 = vdupq_n_f64(om_b1s);
    const float64x2_t om_b2 = vdupq_n_f64(om_b2s);
    const float64x2_t bias1 = vdupq_n_f64(c.bias1);
    const float64x2_t bias2 = vdupq_n_f64(c.bias2);
    const float64x2_t eps = vdupq_n_f64(c.eps);
    const float64x2_t wd = vdupq_n_f64(c.weight_decay);
    const float64x2_t lr = vdupq_n_f64(c.lr);

    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t gi = vld1q_f64(g + i);
        const float64x2_t mi =
            vaddq_f64(vmulq_f64(b1, vld1q_f64(m + i)), vmulq_f64(om_b1, gi));
        const float64x2_t vi = vaddq_f64(vmulq_f64(b2, vld1q_f64(v + i)),
                                         vmulq_f64(om_b2, vmulq_f64(gi, gi)));
        vst1q_f64(m + i, mi);
        vst1q_f64(v + i, vi);
        const float64x2_t mhat = vmulq_f64(mi, bias1);
        const float64x2_t vhat = vmulq_f64(vi, bias2);
        const float64x2_t denom = vaddq_f64(vsqrtq_f64(vhat), eps);
        const float64x2_t wi = vld1q_f64(w + i);
        const float64x2_t upd =
            vaddq_f64(vdivq_f64(mhat, denom), vmulq_f64(wd, wi));
        vst1q_f64(w + i, vsubq_f64(wi, vmulq_f64(lr, upd)));
    }
    for (; i < n; ++i) {
        const double gi = g[i];
        const double mi = c.beta1 * m[i] + om_b1s * gi;
        const double vi = c.beta2 * v[i] + om_b2s * (gi * gi);
        m[i] = mi;
        v[i] = vi;
        const double mhat = mi * c.bias1;
        const double vhat = vi * c.bias2;
        const double denom = std::sqrt(vhat) + c.eps;
        w[i] -= c.lr * (mhat / denom + c.weight_decay * w[i]);
    }
}

}  // namespace

const KernelTable& neon_kernels() {
    static const KernelTable table{dot_neon, axpy_neon, adamw_neon};
    return table;
}

}  // namespace convsearch::kern

#endif  // aarch64
