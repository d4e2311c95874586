#pragma once

// Data-parallel inner loops used by the dense matrix layer, the seesaw ADMM
// solver and the LP pivots. Every operation has a scalar reference
// implementation; on x86 an AVX2+FMA variant and on aarch64 a NEON variant
// are selected at runtime. The variants are equivalence-tested against the
// scalar reference (see tests/test_kernels.cpp).

#include <complex>
#include <cstddef>
#include <string_view>

namespace trinet::kernels {

using cxd = std::complex<double>;

enum class Backend { scalar, avx2, neon };

// Currently active backend.
Backend active_backend();

// Force a backend; returns false (and leaves the dispatch unchanged) if the
// host does not support it. Intended for tests and benchmarks.
bool set_backend(Backend b);

// Re-detect the best backend, honoring TRINET_SIMD=scalar|avx2|neon|auto.
void reset_backend();

std::string_view backend_name(Backend b);

// y[i] += a * x[i]
void axpy(std::size_t n, double a, const double* x, double* y);
void axpy(std::size_t n, cxd a, const cxd* x, cxd* y);

// sum_i x[i] * y[i]
double dot(std::size_t n, const double* x, const double* y);

// sum_i conj(x[i]) * y[i]
cxd dotc(std::size_t n, const cxd* x, const cxd* y);

// sum_i |x[i]|^2
double sum_abs2(std::size_t n, const cxd* x);

// Plane rotation with real cosine: x'[i] = c*x[i] + s*y[i],
// y'[i] = -conj(s)*x[i] + c*y[i]. Used by the Jacobi eigensolver.
void rot(std::size_t n, cxd* x, cxd* y, double c, cxd s);

namespace detail {
struct Ops {
  void (*axpy_d)(std::size_t, double, const double*, double*);
  void (*axpy_c)(std::size_t, cxd, const cxd*, cxd*);
  double (*dot_d)(std::size_t, const double*, const double*);
  cxd (*dotc_c)(std::size_t, const cxd*, const cxd*);
  double (*sum_abs2_c)(std::size_t, const cxd*);
  void (*rot_c)(std::size_t, cxd*, cxd*, double, cxd);
};
const Ops& scalar_ops();
const Ops* avx2_ops();  // nullptr when unavailable
const Ops* neon_ops();  // nullptr when unavailable
}  // namespace detail

}  // namespace trinet::kernels
