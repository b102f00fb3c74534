#include <cstdlib>
#include <stdexcept>
#include <string>

#include "mspde/kernels.hpp"

namespace mspde::kernels {

bool supported(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(__x86_64__) || defined(__i386__)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

const Table& table(Isa isa) {
  if (!supported(isa)) throw std::runtime_error("requested SIMD kernels are not supported on this CPU");
  return isa == Isa::avx2 ? detail::avx2_table() : detail::scalar_table();
}

const Table& active() {
  static const Table& chosen = []() -> const Table& {
    const char* env = std::getenv("MSPDE_SIMD");
    if (env != nullptr && std::string(env) == "scalar") return detail::scalar_table();
    return supported(Isa::avx2) ? detail::avx2_table() : detail::scalar_table();
  }();
  return chosen;
}

std::string_view name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

}  // namespace mspde::kernels
