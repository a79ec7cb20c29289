#include <atomic>

#include "fracbs/error.hpp"
#include "kernels_internal.hpp"

namespace fracbs::kernels {

namespace {

const Table* detect() noexcept {
    if (cpu_supports(Isa::Avx2)) {
        if (const Table* t = avx2_table()) return t;
    }
    return &scalar_table();
}

std::atomic<const Table*>& current() noexcept {
    static std::atomic<const Table*> table{detect()};
    return table;
}

}  // namespace

const Table* avx2_table() noexcept {
#if defined(FRACBS_HAVE_AVX2)
    return &avx2_table_impl();
#else
    return nullptr;
#endif
}

bool cpu_supports(Isa isa) noexcept {
    switch (isa) {
        case Isa::Scalar: return true;
        case Isa::Avx2:
#if defined(FRACBS_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
            __builtin_cpu_init();
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
    }
    return false;
}

const Table& active() noexcept { return *current().load(std::memory_order_acquire); }

void select(Isa isa) {
    if (isa == Isa::Scalar) {
        current().store(&scalar_table(), std::memory_order_release);
        return;
    }
    const Table* t = avx2_table();
    if (t == nullptr || !cpu_supports(isa)) throw ValidationError("AVX2 kernels are not available on this machine");
    current().store(t, std::memory_order_release);
}

}  // namespace fracbs::kernels
