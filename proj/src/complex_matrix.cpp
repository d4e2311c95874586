#include "trinet/complex_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "trinet/kernels.hpp"

namespace trinet {

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& rhs) {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
    throw std::invalid_argument("matrix addition: shape mismatch");
  kernels::axpy(a_.size(), cxd{1.0, 0.0}, rhs.a_.data(), a_.data());
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& rhs) {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
    throw std::invalid_argument("matrix subtraction: shape mismatch");
  kernels::axpy(a_.size(), cxd{-1.0, 0.0}, rhs.a_.data(), a_.data());
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cxd scale) {
  for (auto& v : a_) v *= scale;
  return *this;
}

ComplexMatrix ComplexMatrix::operator*(const ComplexMatrix& rhs) const {
  if (cols_ != rhs.rows_)
    throw std::invalid_argument("matrix product: shape mismatch");
  ComplexMatrix out(rows_, rhs.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    cxd* out_row = out.row(i);
    for (std::size_t k = 0; k < cols_; ++k) {
      const cxd aik = (*this)(i, k);
      if (aik == cxd{}) continue;
      kernels::axpy(rhs.cols_, aik, rhs.row(k), out_row);
    }
  }
  return out;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

ComplexMatrix ComplexMatrix::conjugate() const {
  ComplexMatrix out(rows_, cols_);
  for (std::size_t i = 0; i < a_.size(); ++i) out.a_[i] = std::conj(a_[i]);
  return out;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

cxd ComplexMatrix::trace() const {
  if (!square()) throw std::invalid_argument("trace: matrix not square");
  cxd t{};
  for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
  return t;
}

double ComplexMatrix::frobenius_norm() const {
  return std::sqrt(kernels::sum_abs2(a_.size(), a_.data()));
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& v : a_) m = std::max(m, std::abs(v));
  return m;
}

double ComplexMatrix::hermiticity_defect() const {
  if (!square()) return frobenius_norm();
  double d = 0.0;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i; j < cols_; ++j)
      d = std::max(d, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
  return d;
}

bool ComplexMatrix::is_hermitian(double tol) const {
  return square() && hermiticity_defect() <= tol;
}

ComplexMatrix ComplexMatrix::hermitized() const {
  if (!square()) throw std::invalid_argument("hermitized: matrix not square");
  ComplexMatrix out(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      out(i, j) = 0.5 * ((*this)(i, j) + std::conj((*this)(j, i)));
  return out;
}

cxd hs_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("hs_inner: shape mismatch");
  return kernels::dotc(a.rows() * a.cols(), a.data(), b.data());
}

double hs_inner_re(const ComplexMatrix& a, const ComplexMatrix& b) {
  return hs_inner(a, b).real();
}

std::size_t SubsystemShape::total() const {
  std::size_t t = 1;
  for (auto d : dims) t *= d;
  return t;
}

namespace {

void check_shape(const ComplexMatrix& m, const SubsystemShape& shape) {
  if (!m.square()) throw std::invalid_argument("subsystem op: matrix not square");
  if (shape.total() != m.rows())
    throw std::invalid_argument("subsystem op: shape does not match matrix");
  for (auto d : shape.dims)
    if (d == 0) throw std::invalid_argument("subsystem op: zero dimension");
}

// Strides for the fixed first-factor-most-significant convention.
std::vector<std::size_t> strides_of(const std::vector<std::size_t>& dims) {
  std::vector<std::size_t> s(dims.size());
  std::size_t acc = 1;
  for (std::size_t k = dims.size(); k-- > 0;) {
    s[k] = acc;
    acc *= dims[k];
  }
  return s;
}

}  // namespace

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const cxd aij = a(i, j);
      if (aij == cxd{}) continue;
      for (std::size_t k = 0; k < b.rows(); ++k) {
        cxd* dst = out.row(i * b.rows() + k) + j * b.cols();
        kernels::axpy(b.cols(), aij, b.row(k), dst);
      }
    }
  return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, const SubsystemShape& shape,
                            const std::vector<std::size_t>& keep) {
  check_shape(m, shape);
  const std::size_t nf = shape.dims.size();
  for (std::size_t k = 0; k < keep.size(); ++k) {
    if (keep[k] >= nf) throw std::out_of_range("partial_trace: index out of range");
    if (k > 0 && keep[k] <= keep[k - 1])
      throw std::invalid_argument("partial_trace: keep must be strictly increasing");
  }
  std::vector<bool> kept(nf, false);
  for (auto k : keep) kept[k] = true;
  std::vector<std::size_t> traced;
  for (std::size_t k = 0; k < nf; ++k)
    if (!kept[k]) traced.push_back(k);

  const auto strides = strides_of(shape.dims);
  std::size_t dim_keep = 1, dim_tr = 1;
  for (auto k : keep) dim_keep *= shape.dims[k];
  for (auto k : traced) dim_tr *= shape.dims[k];

  // Row offset of a composite (kept, traced) multi-index pair.
  auto offset = [&](std::size_t kept_lin, const std::vector<std::size_t>& axes) {
    std::size_t off = 0;
    for (std::size_t k = axes.size(); k-- > 0;) {
      const std::size_t d = shape.dims[axes[k]];
      off += (kept_lin % d) * strides[axes[k]];
      kept_lin /= d;
    }
    return off;
  };

  ComplexMatrix out(dim_keep, dim_keep);
  for (std::size_t i = 0; i < dim_keep; ++i) {
    const std::size_t ri = offset(i, keep);
    for (std::size_t j = 0; j < dim_keep; ++j) {
      const std::size_t cj = offset(j, keep);
      cxd acc{};
      for (std::size_t t = 0; t < dim_tr; ++t) {
        const std::size_t rt = offset(t, traced);
        acc += m(ri + rt, cj + rt);
      }
      out(i, j) = acc;
    }
  }
  return out;
}

ComplexMatrix partial_transpose(const ComplexMatrix& m,
                                const SubsystemShape& shape,
                                const std::vector<std::size_t>& subsystems) {
  check_shape(m, shape);
  const std::size_t nf = shape.dims.size();
  std::vector<bool> flip(nf, false);
  for (auto k : subsystems) {
    if (k >= nf)
      throw std::out_of_range("partial_transpose: index out of range");
    flip[k] = true;
  }
  const auto strides = strides_of(shape.dims);
  const std::size_t n = m.rows();
  ComplexMatrix out(n, n);
  std::vector<std::size_t> ridx(nf), cidx(nf);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = i;
    for (std::size_t k = 0; k < nf; ++k) {
      ridx[k] = r / strides[k];
      r %= strides[k];
    }
    for (std::size_t j = 0; j < n; ++j) {
      std::size_t c = j;
      for (std::size_t k = 0; k < nf; ++k) {
        cidx[k] = c / strides[k];
        c %= strides[k];
      }
      std::size_t ri = 0, cj = 0;
      for (std::size_t k = 0; k < nf; ++k) {
        const std::size_t rk = flip[k] ? cidx[k] : ridx[k];
        const std::size_t ck = flip[k] ? ridx[k] : cidx[k];
        ri += rk * strides[k];
        cj += ck * strides[k];
      }
      out(ri, cj) = m(i, j);
    }
  }
  return out;
}

ComplexMatrix permute_subsystems(const ComplexMatrix& m,
                                 const SubsystemShape& shape,
                                 const std::vector<std::size_t>& perm) {
  check_shape(m, shape);
  const std::size_t nf = shape.dims.size();
  if (perm.size() != nf)
    throw std::invalid_argument("permute_subsystems: bad permutation size");
  std::vector<bool> seen(nf, false);
  for (auto p : perm) {
    if (p >= nf || seen[p])
      throw std::invalid_argument("permute_subsystems: not a permutation");
    seen[p] = true;
  }
  std::vector<std::size_t> new_dims(nf);
  for (std::size_t t = 0; t < nf; ++t) new_dims[t] = shape.dims[perm[t]];
  const auto old_strides = strides_of(shape.dims);
  const auto new_strides = strides_of(new_dims);

  const std::size_t n = m.rows();
  // row_map[i] = index of old basis vector i in the permuted ordering
  std::vector<std::size_t> row_map(n);
  std::vector<std::size_t> idx(nf);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = i;
    for (std::size_t k = 0; k < nf; ++k) {
      idx[k] = r / old_strides[k];
      r %= old_strides[k];
    }
    std::size_t ni = 0;
    for (std::size_t t = 0; t < nf; ++t) ni += idx[perm[t]] * new_strides[t];
    row_map[i] = ni;
  }
  ComplexMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(row_map[i], row_map[j]) = m(i, j);
  return out;
}

namespace {

// One cyclic Jacobi sweep; returns the largest off-diagonal magnitude seen.
double jacobi_sweep(ComplexMatrix& a, ComplexMatrix& w, double thresh) {
  const std::size_t n = a.rows();
  double largest = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = p + 1; q < n; ++q) {
      const cxd apq = a(p, q);
      const double r = std::abs(apq);
      if (r > largest) largest = r;
      if (r <= thresh) continue;
      const double app = a(p, p).real();
      const double aqq = a(q, q).real();
      const cxd phase = apq / r;
      const double tau = (app - aqq) / (2.0 * r);
      const double t = (tau >= 0.0)
                           ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                           : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
      const double c = 1.0 / std::sqrt(1.0 + t * t);
      const double sigma = t * c;
      const cxd s = sigma * phase;  // rotation rows: p' = c*p + s*q

      // Rows p and q (contiguous): A <- G'A.
      kernels::rot(n, a.row(p), a.row(q), c, s);
      // The (p,q) corner of G'AG from the updated rows.
      const cxd scol = std::conj(s);
      const cxd apdp = a(p, p), apdq = a(p, q);
      const cxd aqdp = a(q, p), aqdq = a(q, q);
      a(p, p) = cxd{(c * apdp + scol * apdq).real(), 0.0};
      a(q, q) = cxd{(-s * aqdp + c * aqdq).real(), 0.0};
      a(p, q) = 0.0;
      a(q, p) = 0.0;
      // Remaining column entries follow from hermiticity.
      for (std::size_t k = 0; k < n; ++k) {
        if (k == p || k == q) continue;
        a(k, p) = std::conj(a(p, k));
        a(k, q) = std::conj(a(q, k));
      }
      // Accumulate W = G' W (rows of W are conjugated eigenvectors).
      kernels::rot(n, w.row(p), w.row(q), c, s);
    }
  }
  return largest;
}

}  // namespace

EigResult herm_eig(const ComplexMatrix& m) {
  if (!m.square()) throw std::invalid_argument("herm_eig: matrix not square");
  const double tol_herm = 1e-10 * std::max(1.0, m.max_abs());
  if (m.hermiticity_defect() > tol_herm)
    throw std::invalid_argument("herm_eig: input is not Hermitian");

  const std::size_t n = m.rows();
  ComplexMatrix a = m.hermitized();
  ComplexMatrix w = ComplexMatrix::identity(n);
  const double scale = std::max(a.max_abs(), 1e-300);
  const double stop = 1e-15 * scale;

  for (int sweep = 0; sweep < 60; ++sweep) {
    // Rotate anything above a sweep-adaptive threshold; the final sweeps
    // clean up to the stop level.
    const double thresh = sweep < 2 ? 1e-6 * scale : stop * 0.5;
    const double largest = jacobi_sweep(a, w, thresh);
    if (largest <= stop) break;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = a(i, i).real();
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return diag[x] < diag[y]; });

  EigResult res;
  res.eigenvalues.resize(n);
  res.eigenvectors = ComplexMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    res.eigenvalues[k] = diag[order[k]];
    // Eigenvector k is the conjugate of row order[k] of W.
    for (std::size_t i = 0; i < n; ++i)
      res.eigenvectors(i, k) = std::conj(w(order[k], i));
  }
  return res;
}

namespace {

ComplexMatrix rebuild(const EigResult& e,
                      const std::vector<double>& vals) {
  const std::size_t n = e.eigenvalues.size();
  ComplexMatrix out(n, n);
  std::vector<cxd> row(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (vals[k] == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j)
      row[j] = std::conj(e.eigenvectors(j, k));
    for (std::size_t i = 0; i < n; ++i)
      kernels::axpy(n, vals[k] * e.eigenvectors(i, k), row.data(), out.row(i));
  }
  return out;
}

}  // namespace

ComplexMatrix psd_projection(const ComplexMatrix& m) {
  EigResult e = herm_eig(m);
  std::size_t negatives = 0;
  for (double v : e.eigenvalues)
    if (v < 0.0) ++negatives;
  if (negatives == 0) return m.hermitized();
  if (2 * negatives < e.eigenvalues.size()) {
    // Subtract the (smaller) negative part from the symmetrized input.
    std::vector<double> vals = e.eigenvalues;
    for (auto& v : vals) v = std::min(v, 0.0);
    ComplexMatrix out = m.hermitized();
    out -= rebuild(e, vals);
    return out;
  }
  std::vector<double> vals = e.eigenvalues;
  for (auto& v : vals) v = std::max(v, 0.0);
  return rebuild(e, vals);
}

ComplexMatrix herm_sqrt(const ComplexMatrix& m) {
  EigResult e = herm_eig(m);
  std::vector<double> vals = e.eigenvalues;
  for (auto& v : vals) v = v > 0.0 ? std::sqrt(v) : 0.0;
  return rebuild(e, vals);
}

ComplexMatrix herm_pinv_sqrt(const ComplexMatrix& m, double cutoff) {
  EigResult e = herm_eig(m);
  std::vector<double> vals = e.eigenvalues;
  for (auto& v : vals) v = v > cutoff ? 1.0 / std::sqrt(v) : 0.0;
  return rebuild(e, vals);
}

ComplexMatrix support_projector(const ComplexMatrix& m, double cutoff) {
  EigResult e = herm_eig(m);
  std::vector<double> vals = e.eigenvalues;
  for (auto& v : vals) v = v > cutoff ? 1.0 : 0.0;
  return rebuild(e, vals);
}

double min_eigenvalue(const ComplexMatrix& m) {
  EigResult e = herm_eig(m);
  return e.eigenvalues.empty() ? 0.0 : e.eigenvalues.front();
}

}  // namespace trinet
