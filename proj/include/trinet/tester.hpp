#pragma once

// Quantum testers: the object obtained by absorbing a source into an
// adjacent measurement. Element matrices live on wire order (out, in):
// `out` is the source's free wire toward the next party, `in` is the wire
// feeding the absorbed measurement from the neighboring tester. A set of
// operators is a tester iff
//   T_o >= 0 for all o,
//   Tr sum_o T_o = d_in,
//   sum_o T_o = (Tr_in sum_o T_o) (x) 1_in / d_in,
// and every such set is generated by some (state, measurement) pair.

#include <array>
#include <vector>

#include "trinet/complex_matrix.hpp"
#include "trinet/dist.hpp"
#include "trinet/quantum_model.hpp"
#include "trinet/rng.hpp"

namespace trinet {

struct Tester {
  std::size_t d_out = 0, d_in = 0;
  std::vector<ComplexMatrix> elements;

  std::size_t dim() const { return d_out * d_in; }
  ComplexMatrix element_sum() const;
};

// rho on (out, mid), POVM elements on (mid, in). The measurement transpose
// required by the construction is applied internally.
Tester from_state_measurement(const ComplexMatrix& rho, std::size_t d_out,
                              std::size_t d_mid,
                              const std::vector<ComplexMatrix>& povm,
                              std::size_t d_in);

struct TesterResiduals {
  double min_eigenvalue = 0.0;      // most negative eigenvalue over elements
  double trace_deviation = 0.0;     // |Tr sum T_o - d_in|
  double marginal_deviation = 0.0;  // ||sum - (Tr_in sum) (x) 1/d_in||_F

  bool valid(double tol) const {
    return min_eigenvalue >= -tol && trace_deviation <= tol &&
           marginal_deviation <= tol;
  }
};

TesterResiduals check_tester(const Tester& t);
bool is_valid(const Tester& t, double tol = 1e-9);

struct Realization {
  ComplexMatrix rho;  // on (out, mid) with d_mid = d_out
  std::size_t d_mid = 0;
  std::vector<ComplexMatrix> povm;  // on (mid, in)
};

// Canonical realizing pair: sigma = Tr_in(sum T_o)/d_in, purified through an
// unnormalized maximally entangled pair; elements conjugated by the
// pseudoinverse square root of sigma on the mid wire. Requires validity at
// 1e-8.
Realization realize(const Tester& t);

// p(a,b,c) = R_a * S_b * T_c with the cycle R.out -> S.in, S.out -> T.in,
// T.out -> R.in.
TripartiteDistribution contract_triangle(const Tester& r, const Tester& s,
                                         const Tester& t);

// Random valid tester: Haar-like random pure state on (out, mid) and a
// random binary projective measurement on (mid, in), pushed through the
// construction (valid by construction).
Tester random_tester(std::size_t d_out, std::size_t d_in, std::size_t d_mid,
                     Rng& rng);

// The explicit model as three testers: R = gamma source + measurement A,
// S = alpha source + measurement B, T = beta source + measurement C.
// contract_triangle of these equals evaluate_model.
std::array<Tester, 3> model_testers(const ModelParams& p);

}  // namespace trinet
