#include "trinet/tester.hpp"

#include <stdexcept>

#include "trinet/labeled_operator.hpp"

namespace trinet {

ComplexMatrix Tester::element_sum() const {
  if (elements.empty()) throw std::invalid_argument("tester has no elements");
  ComplexMatrix s = elements.front();
  for (std::size_t o = 1; o < elements.size(); ++o) s += elements[o];
  return s;
}

Tester from_state_measurement(const ComplexMatrix& rho, std::size_t d_out,
                              std::size_t d_mid,
                              const std::vector<ComplexMatrix>& povm,
                              std::size_t d_in) {
  if (rho.rows() != d_out * d_mid)
    throw std::invalid_argument("from_state_measurement: state dim mismatch");
  if (povm.empty())
    throw std::invalid_argument("from_state_measurement: empty measurement");
  for (const auto& m : povm)
    if (m.rows() != d_mid * d_in || !m.square())
      throw std::invalid_argument("from_state_measurement: POVM dim mismatch");

  if (std::abs(rho.trace().real() - 1.0) > 1e-8 ||
      std::abs(rho.trace().imag()) > 1e-8)
    throw std::invalid_argument("from_state_measurement: state trace != 1");
  if (min_eigenvalue(rho.hermitized()) < -1e-8)
    throw std::invalid_argument("from_state_measurement: state not PSD");
  ComplexMatrix povm_sum = povm.front();
  for (std::size_t o = 1; o < povm.size(); ++o) povm_sum += povm[o];
  povm_sum -= ComplexMatrix::identity(d_mid * d_in);
  if (povm_sum.max_abs() > 1e-8)
    throw std::invalid_argument("from_state_measurement: POVM does not sum to 1");
  for (const auto& m : povm)
    if (min_eigenvalue(m.hermitized()) < -1e-8)
      throw std::invalid_argument("from_state_measurement: POVM element not PSD");

  const LabeledOperator state(rho, {{"out", d_out}, {"mid", d_mid}});
  Tester t;
  t.d_out = d_out;
  t.d_in = d_in;
  for (const auto& m : povm) {
    const LabeledOperator effect(m.transpose(), {{"mid", d_mid}, {"in", d_in}});
    t.elements.push_back(link_product(state, effect).m.hermitized());
  }
  return t;
}

TesterResiduals check_tester(const Tester& t) {
  TesterResiduals r;
  if (t.elements.empty() || t.d_out == 0 || t.d_in == 0)
    throw std::invalid_argument("check_tester: malformed tester");
  for (const auto& e : t.elements) {
    if (e.rows() != t.dim())
      throw std::invalid_argument("check_tester: element dim mismatch");
    r.min_eigenvalue =
        std::min(r.min_eigenvalue, min_eigenvalue(e.hermitized()));
  }
  const ComplexMatrix sum = t.element_sum().hermitized();
  r.trace_deviation =
      std::abs(sum.trace().real() - static_cast<double>(t.d_in));
  const SubsystemShape shape{{t.d_out, t.d_in}};
  const ComplexMatrix reduced = partial_trace(sum, shape, {0});
  ComplexMatrix marg = kron(reduced, ComplexMatrix::identity(t.d_in));
  marg *= cxd{1.0 / static_cast<double>(t.d_in), 0.0};
  marg -= sum;
  r.marginal_deviation = marg.frobenius_norm();
  return r;
}

bool is_valid(const Tester& t, double tol) {
  return check_tester(t).valid(tol);
}

Realization realize(const Tester& t) {
  const TesterResiduals res = check_tester(t);
  if (!res.valid(1e-8))
    throw std::invalid_argument("realize: tester fails validity at 1e-8");

  const SubsystemShape shape{{t.d_out, t.d_in}};
  const ComplexMatrix sum = t.element_sum().hermitized();
  ComplexMatrix sigma = partial_trace(sum, shape, {0});
  sigma *= cxd{1.0 / static_cast<double>(t.d_in), 0.0};
  sigma = sigma.hermitized();

  const std::size_t d = t.d_out;
  const ComplexMatrix root = herm_sqrt(sigma);
  // rho = (sqrt(sigma) (x) 1) |Omega><Omega| (sqrt(sigma) (x) 1) on (out, mid)
  ComplexMatrix rho(d * d, d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t ip = 0; ip < d; ++ip)
      for (std::size_t j = 0; j < d; ++j)
        for (std::size_t jp = 0; jp < d; ++jp)
          rho(i * d + ip, j * d + jp) = root(i, ip) * std::conj(root(j, jp));

  const ComplexMatrix pinv = herm_pinv_sqrt(sigma, 1e-10);
  const ComplexMatrix supp = support_projector(sigma, 1e-10);
  const ComplexMatrix conj_op = kron(pinv, ComplexMatrix::identity(t.d_in));
  ComplexMatrix tail = kron(
      (ComplexMatrix::identity(d) - supp).transpose(),
      ComplexMatrix::identity(t.d_in));
  tail *= cxd{1.0 / static_cast<double>(t.elements.size()), 0.0};

  Realization out;
  out.d_mid = d;
  out.rho = rho;
  for (const auto& e : t.elements) {
    ComplexMatrix m = (conj_op * e * conj_op).transpose();
    m += tail;
    out.povm.push_back(m.hermitized());
  }
  return out;
}

TripartiteDistribution contract_triangle(const Tester& r, const Tester& s,
                                         const Tester& t) {
  if (r.d_out != s.d_in || s.d_out != t.d_in || t.d_out != r.d_in)
    throw std::invalid_argument(
        "contract_triangle: wire dims inconsistent around the cycle");
  if (r.elements.size() != 2 || s.elements.size() != 2 || t.elements.size() != 2)
    throw std::invalid_argument("contract_triangle: binary outcomes expected");

  std::array<double, 8> p{};
  for (int a = 0; a < 2; ++a) {
    const LabeledOperator ra(r.elements[a],
                             {{"rs", r.d_out}, {"tr", r.d_in}});
    for (int b = 0; b < 2; ++b) {
      const LabeledOperator sb(s.elements[b],
                               {{"st", s.d_out}, {"rs", s.d_in}});
      const LabeledOperator rs = link_product(ra, sb);
      for (int c = 0; c < 2; ++c) {
        const LabeledOperator tc(t.elements[c],
                                 {{"tr", t.d_out}, {"st", t.d_in}});
        const LabeledOperator scalar = link_product(rs, tc);
        p[4 * a + 2 * b + c] = scalar.m(0, 0).real();
      }
    }
  }
  return TripartiteDistribution::from_values_normalized(p, 1e-9);
}

Tester random_tester(std::size_t d_out, std::size_t d_in, std::size_t d_mid,
                     Rng& rng) {
  // Haar-like pure state on (out, mid).
  const std::size_t ds = d_out * d_mid;
  std::vector<cxd> psi(ds);
  double norm2 = 0.0;
  for (auto& x : psi) {
    x = {rng.gaussian(), rng.gaussian()};
    norm2 += std::norm(x);
  }
  const double inv = 1.0 / std::sqrt(norm2);
  ComplexMatrix rho(ds, ds);
  for (std::size_t i = 0; i < ds; ++i)
    for (std::size_t j = 0; j < ds; ++j)
      rho(i, j) = psi[i] * std::conj(psi[j]) * (inv * inv);

  // Random binary projective measurement on (mid, in): project onto half the
  // eigenvectors of a random Hermitian matrix.
  const std::size_t dm = d_mid * d_in;
  ComplexMatrix h(dm, dm);
  for (std::size_t i = 0; i < dm; ++i)
    for (std::size_t j = 0; j < dm; ++j) h(i, j) = {rng.gaussian(), rng.gaussian()};
  const EigResult eig = herm_eig(h.hermitized());
  ComplexMatrix p0(dm, dm);
  for (std::size_t k = 0; k < dm / 2; ++k)
    for (std::size_t i = 0; i < dm; ++i)
      for (std::size_t j = 0; j < dm; ++j)
        p0(i, j) += eig.eigenvectors(i, k) * std::conj(eig.eigenvectors(j, k));
  const ComplexMatrix p1 = ComplexMatrix::identity(dm) - p0;
  return from_state_measurement(rho, d_out, d_mid, {p0, p1}, d_in);
}

std::array<Tester, 3> model_testers(const ModelParams& mp) {
  const SubsystemShape four_qubits{{2, 2, 2, 2}};
  const SubsystemShape three_qubits{{2, 2, 2}};
  const SubsystemShape two_qubits{{2, 2}};

  // R: gamma source + measurement A. State (out = gamma->B, mid = gamma->A);
  // gamma_source is on (cA, qA, cB, qB).
  const ComplexMatrix rho_r = permute_subsystems(
      gamma_source(mp.p_empty, mp.omega), four_qubits, {2, 3, 0, 1});
  // A acts on (beta bit, coin, qubit) -> (mid = coin, qubit; in = bit).
  std::vector<ComplexMatrix> povm_r;
  for (int a = 0; a < 2; ++a)
    povm_r.push_back(permute_subsystems(povm_ab(mp.theta0, mp.theta1, a),
                                        three_qubits, {1, 2, 0}));
  const Tester r = from_state_measurement(rho_r, 4, 4, povm_r, 2);

  // S: alpha source + measurement B. alpha_source is on (bit->B, bit->C);
  // out = bit->C, mid = bit->B.
  const ComplexMatrix rho_s =
      permute_subsystems(alpha_source(mp.p0), two_qubits, {1, 0});
  // B acts on (alpha bit, coin, qubit) = (mid, in) already.
  std::vector<ComplexMatrix> povm_s{povm_ab(mp.theta0, mp.theta1, 0),
                                    povm_ab(mp.theta0, mp.theta1, 1)};
  const Tester s = from_state_measurement(rho_s, 2, 2, povm_s, 4);

  // T: beta source + measurement C. beta_source is on (bit->A, bit->C) =
  // (out, mid) already.
  const ComplexMatrix rho_t = beta_source(mp.p0);
  // C acts on (alpha bit, beta bit) -> (mid = beta bit, in = alpha bit).
  std::vector<ComplexMatrix> povm_t;
  for (int c = 0; c < 2; ++c)
    povm_t.push_back(permute_subsystems(povm_c(c), two_qubits, {1, 0}));
  const Tester t = from_state_measurement(rho_t, 2, 2, povm_t, 2);

  return {r, s, t};
}

}  // namespace trinet
