#pragma once

namespace tcat::kern {

/// True when the executing CPU supports AVX2 (always false off x86-64).
bool cpu_has_avx2() noexcept;

} // namespace tcat::kern
