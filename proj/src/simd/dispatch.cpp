#include "hnl/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace hnl::simd {
namespace {

const KernelTable& detect() {
    if (const char* env = std::getenv("HNL_SIMD")) {
        const std::string choice(env);
        if (choice == "scalar") return scalar_kernels();
        if (choice == "avx2" && avx2_kernels()) return *avx2_kernels();
        if (choice == "neon" && neon_kernels()) return *neon_kernels();
    }
    if (const KernelTable* t = avx2_kernels()) return *t;
    if (const KernelTable* t = neon_kernels()) return *t;
    return scalar_kernels();
}

std::atomic<const KernelTable*>& active() {
    static std::atomic<const KernelTable*> table{&detect()};
    return table;
}

}  // namespace

const KernelTable& kernels() { return *active().load(std::memory_order_acquire); }

bool force_isa(Isa isa) {
    const KernelTable* table = nullptr;
    switch (isa) {
        case Isa::scalar: table = &scalar_kernels(); break;
        case Isa::avx2: table = avx2_kernels(); break;
        case Isa::neon: table = neon_kernels(); break;
    }
    if (!table) return false;
    active().store(table, std::memory_order_release);
    return true;
}

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
        case Isa::neon: return "neon";
    }
    return "unknown";
}

}  // namespace hnl::simd
