// Runtime backend selection for the data-parallel kernels.

#include "convsearch/kernels.hpp"

#include <cstdlib>
#include <string_view>

#include "kernel_table.hpp"

namespace convsearch::kern {
namespace {

struct Dispatch {
    const KernelTable* table;
    Backend backend;
};

bool backend_available(Backend b) {
    switch (b) {
        case Backend::scalar:
            return true;
        case Backend::avx2:
#if defined(__x86_64__) || defined(_M_X64)
            return avx2_supported();
#else
            return false;
#endif
        case Backend::neon:
#if defined(__aarch64__)
            return true;
#else
            return false;
#endif
    }
    return false;
}

const KernelTable* table_for(Backend b) {
    switch (b) {
        case Backend::scalar:
            return &scalar_kernels();
        case Backend::avx2:
#if defined(__x86_64__) || defined(_M_X64)
            return &avx2_kernels();
#else
            return nullptr;
#endif
        case Backend::neon:
#if defined(__aarch64__)
            return &neon_kernels();
#else
            return nullptr;
#endif
    }
    return nullptr;
}

Backend pick_default() {
    if (const char* env = std::getenv("CONVSEARCH_KERNELS")) {
        const std::string_view want{env};
        for (Backend b : {Backend::scalar, Backend::avx2, Backend::neon}) {
            if (want == backend_name(b) && backend_available(b)) return b;
        }
    }
#if defined(__x86_64__) || defined(_M_X64)
    if (avx2_supported()) return Backend::avx2;
#elif defined(__aarch64__)
    return Backend::neon;
#endif
    return Backend::scalar;
}

Dispatch& dispatch() {
    static Dispatch d = [] {
        const Backend b = pick_default();
        return Dispatch{table_for(b), b};
    }();
    return d;
}

}  // namespace

Backend active_backend() { return dispatch().backend; }

std::string_view backend_name(Backend b) {
    switch (b) {
        case Backend::scalar:
            return "scalar";
        case Backend::avx2:
            return "avx2";
        case Backend::neon:
            return "neon";
    }
    return "unknown";
}

std::vector<Backend> available_backends() {
    std::vector<Backend> out;
    for (Backend b : {Backend::scalar, Backend::avx2, Backend::neon}) {
        if (backend_available(b)) out.push_back(b);
    }
    return out;
}

bool set_backend(Backend b) {
    if (!backend_available(b)) return false;
    dispatch() = Dispatch{table_for(b), b};
    return true;
}

double dot(const double* x, const double* y, std::size_t n) {
    return dispatch().table->dot(x, y, n);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    dispatch().table->axpy(a, x, y, n);
}

void adamw_update(double* w, double* m, double* v, const double* g,
                  std::size_t n, const AdamWStep& c) {
    dispatch().table->adamw(w, m, v, g, n, c);
}

}  // namespace convsearch::kern
