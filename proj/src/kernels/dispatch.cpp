#include <cstdlib>
#include <cstring>

#include "fdsec/kernels.hpp"

namespace fdsec::kernels {

namespace {

const Table kScalar{&scalar::dot, &scalar::axpy, Isa::scalar};
#if defined(FDSEC_HAVE_AVX2_KERNELS)
const Table kAvx2{&avx2::dot, &avx2::axpy, Isa::avx2};
#endif
#if defined(FDSEC_HAVE_NEON_KERNELS)
const Table kNeon{&neon::dot, &neon::axpy, Isa::neon};
#endif

const Table& pick() {
  const char* env = std::getenv("FDSEC_KERNELS");
  if (env && std::strcmp(env, "scalar") == 0) return kScalar;
#if defined(FDSEC_HAVE_AVX2_KERNELS)
  if (avx2_available()) return kAvx2;
#endif
#if defined(FDSEC_HAVE_NEON_KERNELS)
  return kNeon;
#endif
  return kScalar;
}

}  // namespace

bool avx2_compiled() {
#if defined(FDSEC_HAVE_AVX2_KERNELS)
  return true;
#else
  return false;
#endif
}

bool avx2_available() {
#if defined(FDSEC_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

bool neon_available() {
#if defined(FDSEC_HAVE_NEON_KERNELS)
  return true;
#else
  return false;
#endif
}

const Table& active() {
  static const Table& t = pick();
  return t;
}

const Table& reference() { return kScalar; }

const Table* table_for(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return &kScalar;
    case Isa::avx2:
#if defined(FDSEC_HAVE_AVX2_KERNELS)
      if (avx2_available()) return &kAvx2;
#endif
      return nullptr;
    case Isa::neon:
#if defined(FDSEC_HAVE_NEON_KERNELS)
      return &kNeon;
#endif
      return nullptr;
  }
  return nullptr;
}

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "?";
}

}  // namespace fdsec::kernels
