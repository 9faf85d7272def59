#pragma once

#include <cstddef>

#include "convsearch/kernels.hpp"

namespace convsearch::kern {

struct KernelTable {
    double (*dot)(const double*, const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*adamw)(double*, double*, double*, const double*, std::size_t,
                  const AdamWStep&);
};

const KernelTable& scalar_kernels();

#if defined(__x86_64__) || defined(_M_X64)
const KernelTable& avx2_kernels();
bool avx2_supported();
#endif

#if defined(__aarch64__)
const KernelTable& neon_kernels();
#endif

}  // namespace convsearch::kern
