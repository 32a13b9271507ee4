#include "tcat/kern/cpu.hpp"

namespace tcat::kern {

bool cpu_has_avx2() noexcept {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

} // namespace tcat::kern
