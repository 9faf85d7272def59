// AVX2 kernels, 4 doubles per vector. Compiled with -mavx2 (no -mfma: the
// pinned arithmetic order is mul-then-add, matching the scalar reference
// bit for bit). Guarded at runtime by avx2_supported().

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>
#include <cstddef>

#include "kernel_table.hpp"

namespace convsearch::kern {
namespace {

double dot_avx2(const double* x, const double* y, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc = _mm256_add_pd(
            acc, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    }
    // Lane j of acc equals accumulator stream sj of the scalar reference.
    const __m128d lo = _mm256_castpd256_pd128(acc);     // s0, s1
    const __m128d hi = _mm256_extractf128_pd(acc, 1);   // s2, s3
    const __m128d lo_sum = _mm_add_sd(lo, _mm_unpackhi_pd(lo, lo));
    const __m128d hi_sum = _mm_add_sd(hi, _mm_unpackhi_pd(hi, hi));
    double s = _mm_cvtsd_f64(_mm_add_sd(lo_sum, hi_sum));
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
    const __m256d av = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d prod = _mm256_mul_pd(av, _mm256_loadu_pd(x + i));
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void adamw_avx2(double* w, double* m, double* v, const double* g,
                std::size_t n, const AdamWStep& c) {
    const double om_b1s = 1.0 - c.beta1;
    const double om_b2s = 1.0 - c.beta2;
    const __m256d b1 = _mm256_set1_pd(c.beta1);
    const __m256d b2 = _mm256_set1_pd(c.beta2);
    const __m256d om_b1 = _mm256_set1_pd(om_b1s);
    const __m256d om_b2 = _mm256_set1_pd(om_b2s);
    const __m256d bias1 = _mm256_set1_pd(c.bias1);
    const __m256d bias2 = _mm256_set1_pd(c.bias2);
    const __m256d eps = _mm256_set1_pd(c.eps);
    const __m256d wd = _mm256_set1_pd(c.weight_decay);
    const __m256d lr = _mm256_set1_pd(c.lr);

    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d gi = _mm256_loadu_pd(g + i);
        const __m256d mi =
            _mm256_add_pd(_mm256_mul_pd(b1, _mm256_loadu_pd(m + i)),
                          _mm256_mul_pd(om_b1, gi));
        const __m256d vi =
            _mm256_add_pd(_mm256_mul_pd(b2, _mm256_loadu_pd(v + i)),
                          _mm256_mul_pd(om_b2, _mm256_mul_pd(gi, gi)));
        _mm256_storeu_pd(m + i, mi);
        _mm256_storeu_pd(v + i, vi);
        const __m256d mhat = _mm256_mul_pd(mi, bias1);
        const __m256d vhat = _mm256_mul_pd(vi, bias2);
        const __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(vhat), eps);
        const __m256d wi = _mm256_loadu_pd(w + i);
        const __m256d upd = _mm256_add_pd(_mm256_div_pd(mhat, denom),
                                          _mm256_mul_pd(wd, wi));
        _mm256_storeu_pd(w + i, _mm256_sub_pd(wi, _mm256_mul_pd(lr, upd)));
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

const KernelTable& avx2_kernels() {
    static const KernelTable table{dot_avx2, axpy_avx2, adamw_avx2};
    return table;
}

bool avx2_supported() {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") != 0;
}

}  // namespace convsearch::kern

#endif  // x86-64
