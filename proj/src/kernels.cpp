#include "trinet/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace trinet::kernels {

namespace detail {

namespace {

void axpy_d_scalar(std::size_t n, double a, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void axpy_c_scalar(std::size_t n, cxd a, const cxd* x, cxd* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double dot_d_scalar(std::size_t n, const double* x, const double* y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

cxd dotc_c_scalar(std::size_t n, const cxd* x, const cxd* y) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    const double yr = y[i].real(), yi = y[i].imag();
    re += xr * yr + xi * yi;
    im += xr * yi - xi * yr;
  }
  return {re, im};
}

double sum_abs2_c_scalar(std::size_t n, const cxd* x) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    acc += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
  return acc;
}

void rot_c_scalar(std::size_t n, cxd* x, cxd* y, double c, cxd s) {
  const cxd sc = std::conj(s);
  for (std::size_t i = 0; i < n; ++i) {
    const cxd xi = x[i], yi = y[i];
    x[i] = c * xi + s * yi;
    y[i] = -sc * xi + c * yi;
  }
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops{axpy_d_scalar, axpy_c_scalar, dot_d_scalar,
                       dotc_c_scalar, sum_abs2_c_scalar, rot_c_scalar};
  return ops;
}

}  // namespace detail

namespace {

std::atomic<const detail::Ops*> g_ops{nullptr};
std::atomic<Backend> g_backend{Backend::scalar};

void select(Backend b, const detail::Ops* ops) {
  g_ops.store(ops, std::memory_order_release);
  g_backend.store(b, std::memory_order_release);
}

void detect() {
  const char* env = std::getenv("TRINET_SIMD");
  if (env != nullptr) {
    if (std::strcmp(env, "scalar") == 0) {
      select(Backend::scalar, &detail::scalar_ops());
      return;
    }
    if (std::strcmp(env, "avx2") == 0 && detail::avx2_ops() != nullptr) {
      select(Backend::avx2, detail::avx2_ops());
      return;
    }
    if (std::strcmp(env, "neon") == 0 && detail::neon_ops() != nullptr) {
      select(Backend::neon, detail::neon_ops());
      return;
    }
    // Unknown value or unsupported lane: fall through to auto.
  }
  if (const auto* ops = detail::avx2_ops()) {
    select(Backend::avx2, ops);
    return;
  }
  if (const auto* ops = detail::neon_ops()) {
    select(Backend::neon, ops);
    return;
  }
  select(Backend::scalar, &detail::scalar_ops());
}

const detail::Ops& ops() {
  const detail::Ops* p = g_ops.load(std::memory_order_acquire);
  if (p == nullptr) {
    detect();
    p = g_ops.load(std::memory_order_acquire);
  }
  return *p;
}

}  // namespace

Backend active_backend() {
  ops();
  return g_backend.load(std::memory_order_acquire);
}

bool set_backend(Backend b) {
  switch (b) {
    case Backend::scalar:
      select(Backend::scalar, &detail::scalar_ops());
      return true;
    case Backend::avx2:
      if (const auto* p = detail::avx2_ops()) {
        select(Backend::avx2, p);
        return true;
      }
      return false;
    case Backend::neon:
      if (const auto* p = detail::neon_ops()) {
        select(Backend::neon, p);
        return true;
      }
      return false;
  }
  return false;
}

void reset_backend() { detect(); }

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
    case Backend::neon: return "neon";
  }
  return "?";
}

void axpy(std::size_t n, double a, const double* x, double* y) {
  ops().axpy_d(n, a, x, y);
}

void axpy(std::size_t n, cxd a, const cxd* x, cxd* y) {
  ops().axpy_c(n, a, x, y);
}

double dot(std::size_t n, const double* x, const double* y) {
  return ops().dot_d(n, x, y);
}

cxd dotc(std::size_t n, const cxd* x, const cxd* y) {
  return ops().dotc_c(n, x, y);
}

double sum_abs2(std::size_t n, const cxd* x) { return ops().sum_abs2_c(n, x); }

void rot(std::size_t n, cxd* x, cxd* y, double c, cxd s) {
  ops().rot_c(n, x, y, c, s);
}

}  // namespace trinet::kernels
