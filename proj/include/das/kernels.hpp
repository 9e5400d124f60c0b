#pragma once

// Dense double-precision kernels used by the conditioning hot path.
//
// Every kernel has a scalar reference implementation and, where the target
// supports it, an AVX2+FMA (x86-64) or NEON (aarch64) variant. The variant is
// picked once at startup from the CPU's capabilities; DAS_SIMD=scalar|avx2|neon
// in the environment overrides the choice.

#include <cstddef>
#include <span>
#include <string_view>

#include "das/kernel_table.hpp"

namespace das::kernels {

std::string_view to_string(Isa isa);

bool isa_supported(Isa isa);

// Best supported ISA, honoring DAS_SIMD when it names a supported ISA.
Isa detect_isa();

const KernelTable& table_for(Isa isa);

// The table used by the library. Switching is not synchronized with running
// simulations; do it before starting work.
const KernelTable& active();
bool set_active(Isa isa);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline double sum_squares(std::span<const double> a) {
  return active().sum_squares(a.data(), a.size());
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  return active().squared_distance(a.data(), b.data(), a.size());
}

inline void axpy_into(std::span<double> dst, std::span<const double> src, double alpha,
                      std::span<const double> x) {
  active().axpy_into(dst.data(), src.data(), alpha, x.data(), dst.size());
}

}  // namespace das::kernels
