#include "trinet/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

namespace trinet::kernels::detail {

namespace {

void axpy_d(std::size_t n, double a, const double* x, double* y) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t vy = vld1q_f64(y + i);
    vy = vfmaq_f64(vy, va, vld1q_f64(x + i));
    vst1q_f64(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

// One complex double per 128-bit vector: lane 0 = re, lane 1 = im.
inline float64x2_t cmul(float64x2_t a, float64x2_t b) {
  // (ar*br - ai*bi, ar*bi + ai*br)
  const float64x2_t ar = vdupq_laneq_f64(a, 0);
  const float64x2_t ai = vdupq_laneq_f64(a, 1);
  const float64x2_t bs = vextq_f64(b, b, 1);  // (bi, br)
  float64x2_t re_im = vmulq_f64(ar, b);
  const float64x2_t cross = vmulq_f64(ai, bs);
  const float64x2_t sign = {-1.0, 1.0};
  return vfmaq_f64(re_im, cross, sign);
}

void axpy_c(std::size_t n, cxd a, const cxd* x, cxd* y) {
  const double* xd = reinterpret_cast<const double*>(x);
  double* yd = reinterpret_cast<double*>(y);
  const float64x2_t va = {a.real(), a.imag()};
  for (std::size_t i = 0; i < n; ++i) {
    float64x2_t vy = vld1q_f64(yd + 2 * i);
    vy = vaddq_f64(vy, cmul(va, vld1q_f64(xd + 2 * i)));
    vst1q_f64(yd + 2 * i, vy);
  }
}

double dot_d(std::size_t n, const double* x, const double* y) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    acc = vfmaq_f64(acc, vld1q_f64(x + i), vld1q_f64(y + i));
  double r = vaddvq_f64(acc);
  for (; i < n; ++i) r += x[i] * y[i];
  return r;
}

cxd dotc_c(std::size_t n, const cxd* x, const cxd* y) {
  double re = 0.0, im = 0.0;
  float64x2_t acc_re = vdupq_n_f64(0.0);
  float64x2_t acc_im = vdupq_n_f64(0.0);
  const double* xd = reinterpret_cast<const double*>(x);
  const double* yd = reinterpret_cast<const double*>(y);
  const float64x2_t sign = {-1.0, 1.0};
  for (std::size_t i = 0; i < n; ++i) {
    const float64x2_t vx = vld1q_f64(xd + 2 * i);
    const float64x2_t vy = vld1q_f64(yd + 2 * i);
    acc_re = vfmaq_f64(acc_re, vx, vy);                       // xr*yr + xi*yi
    const float64x2_t vxs = vextq_f64(vx, vx, 1);             // (xi, xr)
    acc_im = vfmaq_f64(acc_im, vmulq_f64(vxs, vy), sign);     // -xi*yr + xr*yi
  }
  re += vaddvq_f64(acc_re);
  im += vaddvq_f64(acc_im);
  return {re, im};
}

double sum_abs2_c(std::size_t n, const cxd* x) {
  const double* xd = reinterpret_cast<const double*>(x);
  float64x2_t acc = vdupq_n_f64(0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const float64x2_t vx = vld1q_f64(xd + 2 * i);
    acc = vfmaq_f64(acc, vx, vx);
  }
  return vaddvq_f64(acc);
}

void rot_c(std::size_t n, cxd* x, cxd* y, double c, cxd s) {
  double* xd = reinterpret_cast<double*>(x);
  double* yd = reinterpret_cast<double*>(y);
  const float64x2_t vc = vdupq_n_f64(c);
  const float64x2_t vs = {s.real(), s.imag()};
  const float64x2_t vsc = {s.real(), -s.imag()};
  for (std::size_t i = 0; i < n; ++i) {
    const float64x2_t vx = vld1q_f64(xd + 2 * i);
    const float64x2_t vy = vld1q_f64(yd + 2 * i);
    const float64x2_t nx = vfmaq_f64(cmul(vs, vy), vx, vc);
    const float64x2_t ny = vsubq_f64(vmulq_f64(vy, vc), cmul(vsc, vx));
    vst1q_f64(xd + 2 * i, nx);
    vst1q_f64(yd + 2 * i, ny);
  }
}

const Ops neon_table{axpy_d, axpy_c, dot_d, dotc_c, sum_abs2_c, rot_c};

}  // namespace

const Ops* neon_ops() { return &neon_table; }

}  // namespace trinet::kernels::detail

#else

namespace trinet::kernels::detail {
const Ops* neon_ops() { return nullptr; }
}  // namespace trinet::kernels::detail

#endif
