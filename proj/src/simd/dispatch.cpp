#include <atomic>
#include <cstdlib>
#include <string>

#include "qgld/error.hpp"
#include "qgld/simd/kernels.hpp"

namespace qgld::simd {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(__x86_64__) || defined(_M_X64)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* pick_default() noexcept {
  if (const char* env = std::getenv("QGLD_SIMD")) {
    if (std::string(env) == "scalar") return &scalar_table();
  }
  if (isa_supported(Isa::avx2)) return detail::avx2_table();
  return &scalar_table();
}

std::atomic<const KernelTable*>& slot() noexcept {
  static std::atomic<const KernelTable*> current{pick_default()};
  return current;
}

}  // namespace

bool isa_supported(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2: return detail::avx2_table() != nullptr && cpu_has_avx2();
  }
  return false;
}

const KernelTable* table_for(Isa isa) noexcept {
  if (!isa_supported(isa)) return nullptr;
  return isa == Isa::scalar ? &scalar_table() : detail::avx2_table();
}

const KernelTable& active() noexcept { return *slot().load(std::memory_order_relaxed); }

void set_active(Isa isa) {
  const KernelTable* t = table_for(isa);
  if (t == nullptr) {
    throw Error(ErrorCode::InvalidArgument, "kernel variant '" + std::string(isa_name(isa)) + "' unavailable");
  }
  slot().store(t, std::memory_order_relaxed);
}

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

}  // namespace qgld::simd
