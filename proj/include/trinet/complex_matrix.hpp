#pragma once

// Dense complex matrix algebra over small multipartite Hilbert spaces.
// Composite indexing is fixed globally: the first tensor factor is the most
// significant digit of a row/column index, matching kron(A, B)[(i*rB+k),
// (j*cB+l)] = A[i,j]*B[k,l].

#include <complex>
#include <cstddef>
#include <vector>

namespace trinet {

using cxd = std::complex<double>;

class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols) {}

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix zero(std::size_t rows, std::size_t cols) {
    return ComplexMatrix(rows, cols);
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  cxd& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const cxd& operator()(std::size_t i, std::size_t j) const {
    return a_[i * cols_ + j];
  }

  cxd* data() { return a_.data(); }
  const cxd* data() const { return a_.data(); }
  cxd* row(std::size_t i) { return a_.data() + i * cols_; }
  const cxd* row(std::size_t i) const { return a_.data() + i * cols_; }

  ComplexMatrix& operator+=(const ComplexMatrix& rhs);
  ComplexMatrix& operator-=(const ComplexMatrix& rhs);
  ComplexMatrix& operator*=(cxd scale);
  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) {
    a += b;
    return a;
  }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) {
    a -= b;
    return a;
  }
  friend ComplexMatrix operator*(cxd s, ComplexMatrix a) {
    a *= s;
    return a;
  }
  friend ComplexMatrix operator*(ComplexMatrix a, cxd s) {
    a *= s;
    return a;
  }
  ComplexMatrix operator*(const ComplexMatrix& rhs) const;  // matrix product

  ComplexMatrix transpose() const;
  ComplexMatrix conjugate() const;
  ComplexMatrix adjoint() const;

  cxd trace() const;
  double frobenius_norm() const;
  double max_abs() const;
  // max_ij |M - M†|_ij
  double hermiticity_defect() const;
  bool is_hermitian(double tol = 1e-12) const;

  // (M + M†)/2
  ComplexMatrix hermitized() const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<cxd> a_;
};

// Hilbert-Schmidt inner product Tr[A† B].
cxd hs_inner(const ComplexMatrix& a, const ComplexMatrix& b);
// Re Tr[A† B] without forming the product.
double hs_inner_re(const ComplexMatrix& a, const ComplexMatrix& b);

// Tensor-factor structure of a square matrix.
struct SubsystemShape {
  std::vector<std::size_t> dims;
  std::size_t total() const;
};

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// Trace out every factor not listed in `keep`; kept factors stay in their
// original relative order. `keep` must be strictly increasing.
ComplexMatrix partial_trace(const ComplexMatrix& m, const SubsystemShape& shape,
                            const std::vector<std::size_t>& keep);

// Transpose the listed factors only.
ComplexMatrix partial_transpose(const ComplexMatrix& m,
                                const SubsystemShape& shape,
                                const std::vector<std::size_t>& subsystems);

// Reorder tensor factors: factor t of the result is factor perm[t] of the
// input.
ComplexMatrix permute_subsystems(const ComplexMatrix& m,
                                 const SubsystemShape& shape,
                                 const std::vector<std::size_t>& perm);

struct EigResult {
  std::vector<double> eigenvalues;  // ascending
  ComplexMatrix eigenvectors;       // columns, same order
};

// Cyclic Jacobi eigendecomposition of a Hermitian matrix. The input is
// symmetrized as (M+M†)/2 first; inputs with a hermiticity defect beyond
// 1e-10 * max(1, |M|_max) are rejected.
EigResult herm_eig(const ComplexMatrix& m);

// Nearest PSD matrix in Frobenius norm (eigenvalue clipping).
ComplexMatrix psd_projection(const ComplexMatrix& m);

// Principal square root of a PSD matrix (negative eigenvalues clipped to 0).
ComplexMatrix herm_sqrt(const ComplexMatrix& m);

// Pseudoinverse square root; eigenvalues below `cutoff` are treated as zero.
ComplexMatrix herm_pinv_sqrt(const ComplexMatrix& m, double cutoff = 1e-10);

// Projector onto the span of eigenvectors with eigenvalue > cutoff.
ComplexMatrix support_projector(const ComplexMatrix& m, double cutoff = 1e-10);

double min_eigenvalue(const ComplexMatrix& m);

}  // namespace trinet
