#pragma once
#include <cstddef>

// Dense inner-product kernels used by the interior-point solver. A scalar
// reference is always available; vector variants are picked at runtime.
namespace fdsec::kernels {

enum class Isa { scalar, avx2, neon };

struct Table {
  double (*dot)(const double* x, const double* y, std::size_t n);
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  Isa isa;
};

namespace scalar {
double dot(const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
}  // namespace scalar

namespace avx2 {
double dot(const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
}  // namespace avx2

namespace neon {
double dot(const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
}  // namespace neon

bool avx2_compiled();
bool avx2_available();
bool neon_available();

// Best table for this CPU; FDSEC_KERNELS=scalar in the environment forces the reference.
const Table& active();
const Table& reference();
// Null when the ISA is unavailable on this build or CPU.
const Table* table_for(Isa isa);
const char* isa_name(Isa isa);

inline double dot(const double* x, const double* y, std::size_t n) { return active().dot(x, y, n); }
inline void axpy(double a, const double* x, double* y, std::size_t n) { active().axpy(a, x, y, n); }

}  // namespace fdsec::kernels
