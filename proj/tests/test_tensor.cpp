#include <doctest.h>

#include <cmath>

#include "trinet/complex_matrix.hpp"
#include "trinet/labeled_operator.hpp"
#include "trinet/rng.hpp"

using namespace trinet;

namespace {

ComplexMatrix pauli_z() {
  ComplexMatrix m(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  return m;
}

ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  return m;
}

ComplexMatrix ketbra(int i, int j, std::size_t d) {
  ComplexMatrix m(d, d);
  m(i, j) = 1.0;
  return m;
}

ComplexMatrix random_matrix(Rng& rng, std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m(i, j) = cxd{rng.gaussian(), rng.gaussian()};
  return m;
}

ComplexMatrix random_hermitian(Rng& rng, std::size_t n) {
  return random_matrix(rng, n).hermitized();
}

ComplexMatrix bell_phi_plus() {
  // |F+><F+| with |F+> = (|00> + |11>)/sqrt(2)
  ComplexMatrix m(4, 4);
  m(0, 0) = m(0, 3) = m(3, 0) = m(3, 3) = 0.5;
  return m;
}

double mat_dist(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix d = a;
  d -= b;
  return d.max_abs();
}

}  // namespace

TEST_CASE("kron basics") {
  const ComplexMatrix i2 = ComplexMatrix::identity(2);
  CHECK(mat_dist(kron(i2, i2), ComplexMatrix::identity(4)) == 0.0);

  const ComplexMatrix p = kron(ketbra(0, 0, 2), ketbra(1, 1, 2));
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      CHECK(p(i, j) == (i == 1 && j == 1 ? cxd{1.0} : cxd{}));

  const ComplexMatrix zz = kron(pauli_z(), pauli_z());
  const double want[4] = {1.0, -1.0, -1.0, 1.0};
  for (std::size_t i = 0; i < 4; ++i) CHECK(zz(i, i).real() == want[i]);
}

TEST_CASE("partial trace examples") {
  const SubsystemShape s22{{2, 2}};

  const ComplexMatrix rho00 = kron(ketbra(0, 0, 2), ketbra(0, 0, 2));
  CHECK(mat_dist(partial_trace(rho00, s22, {0}), ketbra(0, 0, 2)) == 0.0);

  const ComplexMatrix half_i2 = 0.5 * ComplexMatrix::identity(2);
  CHECK(mat_dist(partial_trace(bell_phi_plus(), s22, {1}), half_i2) <= 1e-15);

  Rng rng(7);
  for (std::size_t da : {2u, 3u}) {
    for (std::size_t db : {2u, 4u}) {
      const ComplexMatrix a = random_matrix(rng, da);
      const ComplexMatrix b = random_matrix(rng, db);
      const ComplexMatrix expect = b.trace() * a;
      CHECK(mat_dist(partial_trace(kron(a, b), SubsystemShape{{da, db}}, {0}),
                     expect) <= 1e-13);
    }
  }

  CHECK_THROWS(partial_trace(rho00, s22, {5}));
}

TEST_CASE("partial trace preserves trace") {
  Rng rng(8);
  const ComplexMatrix m = random_matrix(rng, 12);
  const SubsystemShape s{{2, 3, 2}};
  const ComplexMatrix r = partial_trace(m, s, {1});
  CHECK(std::abs(r.trace() - m.trace()) <= 1e-12);
}

TEST_CASE("partial transpose") {
  Rng rng(9);
  const ComplexMatrix m = random_matrix(rng, 2);
  CHECK(mat_dist(partial_transpose(m, SubsystemShape{{2}}, {0}), m.transpose()) ==
        0.0);

  const ComplexMatrix big = random_matrix(rng, 8);
  const SubsystemShape s{{2, 2, 2}};
  const ComplexMatrix once = partial_transpose(big, s, {1});
  CHECK(mat_dist(partial_transpose(once, s, {1}), big) == 0.0);

  // PPT eigenvalue of the maximally entangled state.
  const ComplexMatrix pt = partial_transpose(bell_phi_plus(), SubsystemShape{{2, 2}}, {1});
  const EigResult e = herm_eig(pt);
  CHECK(e.eigenvalues.front() == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("permute subsystems") {
  Rng rng(10);
  const ComplexMatrix a = random_matrix(rng, 2);
  const ComplexMatrix b = random_matrix(rng, 3);
  const SubsystemShape s{{2, 3}};
  CHECK(mat_dist(permute_subsystems(kron(a, b), s, {1, 0}), kron(b, a)) <=
        1e-14);

  const ComplexMatrix m = random_matrix(rng, 6);
  CHECK(mat_dist(permute_subsystems(m, s, {0, 1}), m) == 0.0);
  const ComplexMatrix swapped = permute_subsystems(m, s, {1, 0});
  CHECK(mat_dist(permute_subsystems(swapped, SubsystemShape{{3, 2}}, {1, 0}), m) ==
        0.0);
  CHECK(std::abs(swapped.trace() - m.trace()) <= 1e-13);

  CHECK_THROWS(permute_subsystems(m, s, {0, 0}));
}

TEST_CASE("permute preserves spectrum") {
  Rng rng(11);
  const ComplexMatrix m = random_hermitian(rng, 8);
  const SubsystemShape s{{2, 2, 2}};
  const auto e1 = herm_eig(m).eigenvalues;
  const auto e2 = herm_eig(permute_subsystems(m, s, {2, 0, 1})).eigenvalues;
  for (std::size_t i = 0; i < e1.size(); ++i)
    CHECK(e1[i] == doctest::Approx(e2[i]).epsilon(1e-10));
}

TEST_CASE("herm_eig examples") {
  const EigResult ex = herm_eig(pauli_x());
  CHECK(ex.eigenvalues[0] == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(ex.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-13));

  ComplexMatrix d(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = 1.0;
  const EigResult ed = herm_eig(d);
  CHECK(ed.eigenvalues[0] == doctest::Approx(1.0));
  CHECK(ed.eigenvalues[1] == doctest::Approx(3.0));
  CHECK(std::abs(ed.eigenvectors(1, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(ed.eigenvectors(0, 1)) == doctest::Approx(1.0));

  // Rank-1 projector |w><w| for w = pi/8.
  const double w = 3.14159265358979323846 / 8.0;
  ComplexMatrix ww(4, 4);
  ww(0, 0) = std::cos(w) * std::cos(w);
  ww(0, 3) = -std::cos(w) * std::sin(w);
  ww(3, 0) = -std::sin(w) * std::cos(w);
  ww(3, 3) = std::sin(w) * std::sin(w);
  const EigResult ew = herm_eig(ww);
  CHECK(ew.eigenvalues[0] == doctest::Approx(0.0).epsilon(1e-13));
  CHECK(ew.eigenvalues[1] == doctest::Approx(0.0).epsilon(1e-13));
  CHECK(ew.eigenvalues[2] == doctest::Approx(0.0).epsilon(1e-13));
  CHECK(ew.eigenvalues[3] == doctest::Approx(1.0).epsilon(1e-13));

  CHECK_THROWS(herm_eig(ketbra(0, 1, 2)));
}

TEST_CASE("herm_eig reconstruction up to dim 64") {
  Rng rng(12);
  for (std::size_t n : {2u, 5u, 16u, 33u, 64u}) {
    const ComplexMatrix m = random_hermitian(rng, n);
    const EigResult e = herm_eig(m);
    ComplexMatrix rec(n, n);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          rec(i, j) += e.eigenvalues[k] * e.eigenvectors(i, k) *
                       std::conj(e.eigenvectors(j, k));
    rec -= m;
    CHECK(rec.frobenius_norm() <= 1e-10 * m.frobenius_norm());
  }
}

TEST_CASE("psd projection and square roots") {
  Rng rng(13);
  const ComplexMatrix m = random_hermitian(rng, 6);
  const ComplexMatrix p = psd_projection(m);
  CHECK(min_eigenvalue(p) >= -1e-12);

  const ComplexMatrix psd = p;
  const ComplexMatrix r = herm_sqrt(psd);
  CHECK(mat_dist(r * r, psd) <= 1e-10);

  const ComplexMatrix pinv = herm_pinv_sqrt(psd, 1e-10);
  const ComplexMatrix proj = support_projector(psd, 1e-10);
  CHECK(mat_dist(pinv * psd * pinv, proj) <= 1e-9);
}

TEST_CASE("link product: Born rule and tensor product") {
  Rng rng(14);
  // State and effect on one shared wire; measurement passed pre-transposed.
  ComplexMatrix rho = random_hermitian(rng, 3);
  rho = psd_projection(rho);
  rho *= cxd{1.0 / rho.trace().real(), 0.0};
  ComplexMatrix m = psd_projection(random_hermitian(rng, 3));

  const LabeledOperator lr(rho, {{"w", 3}});
  const LabeledOperator lm(m.transpose(), {{"w", 3}});
  const LabeledOperator out = link_product(lr, lm);
  CHECK(out.dim() == 1);
  CHECK(out.wires.empty());
  const cxd born = (rho * m).trace();
  CHECK(std::abs(out.m(0, 0) - born) <= 1e-12);

  // No shared labels: plain tensor product.
  const ComplexMatrix a = random_matrix(rng, 2);
  const ComplexMatrix b = random_matrix(rng, 3);
  const LabeledOperator la(a, {{"x", 2}});
  const LabeledOperator lb(b, {{"y", 3}});
  CHECK(mat_dist(link_product(la, lb).m, kron(a, b)) <= 1e-14);

  // Dimension mismatch on a shared label.
  const LabeledOperator bad(random_matrix(rng, 2), {{"w", 2}});
  CHECK_THROWS(link_product(lr, bad));
}

TEST_CASE("link product is associative and commutative on chains") {
  Rng rng(15);
  // A(x,y) * B(y,z) * C(z,u) with distinct labels.
  const LabeledOperator a(random_matrix(rng, 4), {{"x", 2}, {"y", 2}});
  const LabeledOperator b(random_matrix(rng, 4), {{"y", 2}, {"z", 2}});
  const LabeledOperator c(random_matrix(rng, 4), {{"z", 2}, {"u", 2}});

  const LabeledOperator left = link_product(link_product(a, b), c);
  const LabeledOperator right = link_product(a, link_product(b, c));
  CHECK(left.wires.size() == 2);
  CHECK(mat_dist(left.m, right.m) <= 1e-12);

  // Commutativity up to wire reordering.
  const LabeledOperator ab = link_product(a, b);
  LabeledOperator ba = link_product(b, a);
  // ab wires: (x, z); ba wires: (z, x).
  ba = ba.permuted({1, 0});
  CHECK(mat_dist(ab.m, ba.m) <= 1e-12);
}
