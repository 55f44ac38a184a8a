#include "kernels_impl.hpp"

namespace eqnorm::simd {
namespace {

double sum_scalar(const double* x, std::size_t n) {
  if (n <= kLeaf) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t half = split_point(n);
  return sum_scalar(x, half) + sum_scalar(x + half, n - half);
}

cplx dot_scalar(const cplx* x, const cplx* y, std::size_t n) {
  if (n <= kLeaf) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double a = x[i].real(), b = x[i].imag();
      const double c = y[i].real(), d = y[i].imag();
      re += a * c + b * d;
      im += a * d - b * c;
    }
    return {re, im};
  }
  const std::size_t half = split_point(n);
  return dot_scalar(x, y, half) + dot_scalar(x + half, y + half, n - half);
}

double norm2_scalar(const cplx* x, std::size_t n) {
  if (n <= kLeaf) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::norm(x[i]);
    return s;
  }
  const std::size_t half = split_point(n);
  return norm2_scalar(x, half) + norm2_scalar(x + half, n - half);
}

double weighted_norm2_scalar(const cplx* c, const double* f, std::size_t n) {
  if (n <= kLeaf) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::norm(c[i]) * f[i];
    return s;
  }
  const std::size_t half = split_point(n);
  return weighted_norm2_scalar(c, f, half) +
         weighted_norm2_scalar(c + half, f + half, n - half);
}

cplx form_columns_scalar(const cplx* a, std::size_t n, const cplx* y,
                         std::size_t col0, std::size_t ncols) {
  if (ncols <= kColumnLeaf) {
    cplx s{0.0, 0.0};
    for (std::size_t j = col0; j < col0 + ncols; ++j) {
      s += dot_scalar(y, a + j * n, n) * y[j];
    }
    return s;
  }
  const std::size_t half = split_point(ncols);
  return form_columns_scalar(a, n, y, col0, half) +
         form_columns_scalar(a, n, y, col0 + half, ncols - half);
}

cplx hermitian_form_scalar(const cplx* a, std::size_t n, const cplx* y) {
  if (n == 0) return {0.0, 0.0};
  return form_columns_scalar(a, n, y, 0, n);
}

void rotate_project_scalar(const double* re, const double* im, std::size_t n,
                           double cos_t, double sin_t, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = re[i] * cos_t - im[i] * sin_t;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{
      "scalar",          sum_scalar,
      dot_scalar,        norm2_scalar,
      weighted_norm2_scalar, hermitian_form_scalar,
      rotate_project_scalar,
  };
  return table;
}

}  // namespace eqnorm::simd
