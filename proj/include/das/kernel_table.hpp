#pragma once

// Kernel table shared by every backend. Kept free of standard-library headers
// beyond <cstddef> so ISA-specific translation units do not instantiate inline
// library code with wider instruction sets.

#include <cstddef>

namespace das::kernels {

enum class Isa { scalar, avx2, neon };

// Raw-pointer table shared by all backends. Lengths are element counts.
struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum_squares)(const double* a, std::size_t n);
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  // dst[i] = src[i] + alpha * x[i]; dst must not overlap src or x.
  void (*axpy_into)(double* dst, const double* src, double alpha, const double* x,
                    std::size_t n);
};

const KernelTable& scalar_table();
#if defined(__x86_64__) || defined(_M_X64)
const KernelTable& avx2_table();
#endif
#if defined(__aarch64__)
const KernelTable& neon_table();
#endif

}  // namespace das::kernels
