// AVX2 + FMA variants. This file is compiled with -mavx2 -mfma and must only
// be entered after dispatch.cpp has confirmed the CPU supports both.

#include "kernels_impl.hpp"

#if defined(EQNORM_HAVE_AVX2)

#include <immintrin.h>

namespace eqnorm::simd {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(s) + _mm_cvtsd_f64(_mm_unpackhi_pd(s, s));
}

// Lanes hold [a0 b0 a1 b1]; returns a0 - b0 + a1 - b1.
inline double halt(__m256d v) {
  alignas(32) double t[4];
  _mm256_store_pd(t, v);
  return (t[0] - t[1]) + (t[2] - t[3]);
}

double sum_avx2(const double* x, std::size_t n) {
  if (n <= kLeaf) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    double s = hsum(acc);
    for (; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t half = split_point(n);
  return sum_avx2(x, half) + sum_avx2(x + half, n - half);
}

cplx dot_avx2(const cplx* x, const cplx* y, std::size_t n) {
  if (n <= kLeaf) {
    const double* xp = reinterpret_cast<const double*>(x);
    const double* yp = reinterpret_cast<const double*>(y);
    __m256d acc_re = _mm256_setzero_pd();
    __m256d acc_im = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
      const __m256d xv = _mm256_loadu_pd(xp + 2 * i);
      const __m256d yv = _mm256_loadu_pd(yp + 2 * i);
      const __m256d ys = _mm256_permute_pd(yv, 0b0101);
      acc_re = _mm256_fmadd_pd(xv, yv, acc_re);  // [ac, bd]
      acc_im = _mm256_fmadd_pd(xv, ys, acc_im);  // [ad, bc]
    }
    double re = hsum(acc_re);
    double im = halt(acc_im);
    for (; i < n; ++i) {
      const double a = x[i].real(), b = x[i].imag();
      const double c = y[i].real(), d = y[i].imag();
      re += a * c + b * d;
      im += a * d - b * c;
    }
    return {re, im};
  }
  const std::size_t half = split_point(n);
  return dot_avx2(x, y, half) + dot_avx2(x + half, y + half, n - half);
}

double norm2_avx2(const cplx* x, std::size_t n) {
  if (n <= kLeaf) {
    const double* xp = reinterpret_cast<const double*>(x);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
      const __m256d v = _mm256_loadu_pd(xp + 2 * i);
      acc = _mm256_fmadd_pd(v, v, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += std::norm(x[i]);
    return s;
  }
  const std::size_t half = split_point(n);
  return norm2_avx2(x, half) + norm2_avx2(x + half, n - half);
}

double weighted_norm2_avx2(const cplx* c, const double* f, std::size_t n) {
  if (n <= kLeaf) {
    const double* cp = reinterpret_cast<const double*>(c);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
      const __m256d v = _mm256_loadu_pd(cp + 2 * i);
      // [f0 f0 f1 f1]
      const __m128d f2 = _mm_loadu_pd(f + i);
      const __m256d fw = _mm256_permute4x64_pd(_mm256_castpd128_pd256(f2),
                                               0b01010000);
      acc = _mm256_fmadd_pd(_mm256_mul_pd(v, v), fw, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += std::norm(c[i]) * f[i];
    return s;
  }
  const std::size_t half = split_point(n);
  return weighted_norm2_avx2(c, f, half) +
         weighted_norm2_avx2(c + half, f + half, n - half);
}

cplx form_columns_avx2(const cplx* a, std::size_t n, const cplx* y,
                       std::size_t col0, std::size_t ncols) {
  if (ncols <= kColumnLeaf) {
    cplx s{0.0, 0.0};
    for (std::size_t j = col0; j < col0 + ncols; ++j) {
      s += dot_avx2(y, a + j * n, n) * y[j];
    }
    return s;
  }
  const std::size_t half = split_point(ncols);
  return form_columns_avx2(a, n, y, col0, half) +
         form_columns_avx2(a, n, y, col0 + half, ncols - half);
}

cplx hermitian_form_avx2(const cplx* a, std::size_t n, const cplx* y) {
  if (n == 0) return {0.0, 0.0};
  return form_columns_avx2(a, n, y, 0, n);
}

void rotate_project_avx2(const double* re, const double* im, std::size_t n,
                         double cos_t, double sin_t, double* out) {
  const __m256d c = _mm256_set1_pd(cos_t);
  const __m256d s = _mm256_set1_pd(sin_t);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_loadu_pd(re + i);
    const __m256d m = _mm256_loadu_pd(im + i);
    _mm256_storeu_pd(out + i, _mm256_fmsub_pd(r, c, _mm256_mul_pd(m, s)));
  }
  for (; i < n; ++i) out[i] = re[i] * cos_t - im[i] * sin_t;
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{
      "avx2",           sum_avx2,
      dot_avx2,         norm2_avx2,
      weighted_norm2_avx2, hermitian_form_avx2,
      rotate_project_avx2,
  };
  return table;
}

}  // namespace eqnorm::simd

#endif  // EQNORM_HAVE_AVX2
