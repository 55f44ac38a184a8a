#pragma once

// Data-parallel inner loops used by the spectral and dynamics code.
//
// Every kernel has a portable scalar reference implementation and, on x86-64,
// an AVX2/FMA variant. The active table is chosen once at first use from the
// CPU feature bits; setting EQNORM_SIMD=scalar forces the reference path.
// Reductions use a fixed blocking and pairwise combination so results are
// reproducible run to run on the same table.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace eqnorm::simd {

using cplx = std::complex<double>;

struct KernelTable {
  const char* name;

  // Pairwise sum of n doubles.
  double (*sum)(const double* x, std::size_t n);

  // sum_i conj(x_i) * y_i
  cplx (*dot)(const cplx* x, const cplx* y, std::size_t n);

  // sum_i |x_i|^2
  double (*norm2)(const cplx* x, std::size_t n);

  // sum_i |c_i|^2 f_i
  double (*weighted_norm2)(const cplx* c, const double* f, std::size_t n);

  // y^dagger A y for a column-major n x n matrix A.
  cplx (*hermitian_form)(const cplx* a, std::size_t n, const cplx* y);

  // out_i = re_i * cos_t - im_i * sin_t, i.e. Re(z_i e^{i t}).
  void (*rotate_project)(const double* re, const double* im, std::size_t n,
                         double cos_t, double sin_t, double* out);
};

const KernelTable& scalar_kernels();

// nullptr when the binary was built without AVX2 support or the CPU lacks it.
const KernelTable* avx2_kernels();

const KernelTable& active();

inline std::string_view active_name() { return active().name; }

inline double sum(std::span<const double> x) {
  return active().sum(x.data(), x.size());
}

inline cplx dot(std::span<const cplx> x, std::span<const cplx> y) {
  return active().dot(x.data(), y.data(), x.size());
}

inline double norm2(std::span<const cplx> x) {
  return active().norm2(x.data(), x.size());
}

inline double weighted_norm2(std::span<const cplx> c,
                             std::span<const double> f) {
  return active().weighted_norm2(c.data(), f.data(), c.size());
}

inline cplx hermitian_form(const cplx* a, std::size_t n,
                           std::span<const cplx> y) {
  return active().hermitian_form(a, n, y.data());
}

inline void rotate_project(std::span<const double> re,
                           std::span<const double> im, double cos_t,
                           double sin_t, std::span<double> out) {
  active().rotate_project(re.data(), im.data(), re.size(), cos_t, sin_t,
                          out.data());
}

}  // namespace eqnorm::simd
