#include "das/kernel_table.hpp"

namespace das::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_squares_scalar(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * a[i];
  return acc;
}

double squared_distance_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

void axpy_into_scalar(double* dst, const double* src, double alpha, const double* x,
                      std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = src[i] + alpha * x[i];
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{Isa::scalar, dot_scalar, sum_squares_scalar,
                                 squared_distance_scalar, axpy_into_scalar};
  return table;
}

}  // namespace das::kernels
