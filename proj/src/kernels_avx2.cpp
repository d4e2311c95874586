#include "trinet/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

namespace trinet::kernels::detail {

namespace {

__attribute__((target("avx2,fma"))) inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

__attribute__((target("avx2,fma")))
void axpy_d(std::size_t n, double a, const double* x, double* y) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

__attribute__((target("avx2,fma")))
void axpy_c(std::size_t n, cxd a, const cxd* x, cxd* y) {
  const double* xd = reinterpret_cast<const double*>(x);
  double* yd = reinterpret_cast<double*>(y);
  const __m256d var = _mm256_set1_pd(a.real());
  const __m256d vai = _mm256_set1_pd(a.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {  // two complex values per vector
    const __m256d vx = _mm256_loadu_pd(xd + 2 * i);
    const __m256d vxs = _mm256_permute_pd(vx, 0x5);  // swap re/im pairs
    const __m256d prod = _mm256_fmaddsub_pd(vx, var, _mm256_mul_pd(vxs, vai));
    _mm256_storeu_pd(yd + 2 * i, _mm256_add_pd(_mm256_loadu_pd(yd + 2 * i), prod));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

__attribute__((target("avx2,fma")))
double dot_d(std::size_t n, const double* x, const double* y) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
  double r = hsum(acc);
  for (; i < n; ++i) r += x[i] * y[i];
  return r;
}

__attribute__((target("avx2,fma")))
cxd dotc_c(std::size_t n, const cxd* x, const cxd* y) {
  const double* xd = reinterpret_cast<const double*>(x);
  const double* yd = reinterpret_cast<const double*>(y);
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d vx = _mm256_loadu_pd(xd + 2 * i);
    const __m256d vy = _mm256_loadu_pd(yd + 2 * i);
    acc_re = _mm256_fmadd_pd(vx, vy, acc_re);
    const __m256d vxs = _mm256_permute_pd(vx, 0x5);
    // even lanes accumulate -xi*yr, odd lanes +xr*yi
    acc_im = _mm256_addsub_pd(acc_im, _mm256_mul_pd(vxs, vy));
  }
  double re = hsum(acc_re);
  double im = hsum(acc_im);
  for (; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    const double yr = y[i].real(), yi = y[i].imag();
    re += xr * yr + xi * yi;
    im += xr * yi - xi * yr;
  }
  return {re, im};
}

__attribute__((target("avx2,fma")))
double sum_abs2_c(std::size_t n, const cxd* x) {
  const double* xd = reinterpret_cast<const double*>(x);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d vx = _mm256_loadu_pd(xd + 2 * i);
    acc = _mm256_fmadd_pd(vx, vx, acc);
  }
  double r = hsum(acc);
  for (; i < n; ++i)
    r += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
  return r;
}

__attribute__((target("avx2,fma")))
void rot_c(std::size_t n, cxd* x, cxd* y, double c, cxd s) {
  double* xd = reinterpret_cast<double*>(x);
  double* yd = reinterpret_cast<double*>(y);
  const __m256d vc = _mm256_set1_pd(c);
  const __m256d vsr = _mm256_set1_pd(s.real());
  const __m256d vsi = _mm256_set1_pd(s.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d vx = _mm256_loadu_pd(xd + 2 * i);
    const __m256d vy = _mm256_loadu_pd(yd + 2 * i);
    const __m256d vxs = _mm256_permute_pd(vx, 0x5);
    const __m256d vys = _mm256_permute_pd(vy, 0x5);
    // s*y = (sr*yr - si*yi, sr*yi + si*yr)
    const __m256d sy = _mm256_fmaddsub_pd(vy, vsr, _mm256_mul_pd(vys, vsi));
    // conj(s)*x = (sr*xr + si*xi, sr*xi - si*xr)
    const __m256d csx = _mm256_fmsubadd_pd(vx, vsr, _mm256_mul_pd(vxs, vsi));
    _mm256_storeu_pd(xd + 2 * i, _mm256_fmadd_pd(vx, vc, sy));
    _mm256_storeu_pd(yd + 2 * i, _mm256_fmsub_pd(vy, vc, csx));
  }
  const cxd sc = std::conj(s);
  for (; i < n; ++i) {
    const cxd xi = x[i], yi = y[i];
    x[i] = c * xi + s * yi;
    y[i] = -sc * xi + c * yi;
  }
}

const Ops avx2_table{axpy_d, axpy_c, dot_d, dotc_c, sum_abs2_c, rot_c};

}  // namespace

const Ops* avx2_ops() {
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
    return &avx2_table;
  return nullptr;
}

}  // namespace trinet::kernels::detail

#else

namespace trinet::kernels::detail {
const Ops* avx2_ops() { return nullptr; }
}  // namespace trinet::kernels::detail

#endif
