#include "covscan/simd/dispatch.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <string>

#include "covscan/errors.hpp"

namespace covscan::simd {

namespace {

bool cpu_has_avx2() {
#if defined(COVSCAN_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__)) && \
    (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Level initial_level() {
  const char* env = std::getenv("COVSCAN_SIMD");
  if (env != nullptr && std::strcmp(env, "scalar") == 0) return Level::scalar;
  return detected_level();
}

std::atomic<Level>& active() {
  static std::atomic<Level> level{initial_level()};
  return level;
}

}  // namespace

std::string_view to_string(Level level) {
  switch (level) {
    case Level::scalar:
      return "scalar";
    case Level::avx2:
      return "avx2";
  }
  return "unknown";
}

bool level_supported(Level level) {
  switch (level) {
    case Level::scalar:
      return true;
    case Level::avx2:
      return cpu_has_avx2();
  }
  return false;
}

Level detected_level() {
  static const Level level = cpu_has_avx2() ? Level::avx2 : Level::scalar;
  return level;
}

Level active_level() { return active().load(std::memory_order_relaxed); }

void set_active_level(Level level) {
  if (!level_supported(level)) {
    throw InvalidArgument("SIMD level '" + std::string(to_string(level)) +
                          "' is not supported on this build/CPU");
  }
  active().store(level, std::memory_order_relaxed);
}

RowKernel row_kernel(Level level) {
  switch (level) {
    case Level::scalar:
      return &detail::row_scalar;
    case Level::avx2:
#if defined(COVSCAN_HAVE_AVX2)
      if (cpu_has_avx2()) return &detail::row_avx2;
#endif
      break;
  }
  throw InvalidArgument("SIMD level '" + std::string(to_string(level)) + "' unavailable");
}

}  // namespace covscan::simd
