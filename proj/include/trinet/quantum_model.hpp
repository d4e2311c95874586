#pragma once

// The explicit five-parameter quantum realization for the binary triangle
// network: two classical bit sources with bias p0 feeding party C, and one
// source distributing a classical coin (bias p_empty) together with the
// two-qubit state |w> = cos(omega)|00> - sin(omega)|11>. Parties A and B
// either announce the bit received from their classical source (coin = 0) or
// measure their half of |w> in the X-Z plane at angle theta_bit (coin = 1);
// party C outputs 1 exactly when both classical bits are 0.

#include <array>
#include <vector>

#include "trinet/complex_matrix.hpp"
#include "trinet/dist.hpp"

namespace trinet {

struct ModelParams {
  double p0 = 0.0;
  double p_empty = 0.0;
  double omega = 0.0;
  double theta0 = 0.0;
  double theta1 = 0.0;
};

struct DerivedParams {
  double p0 = 0.0;
  double p_empty = 0.0;
  double omega = 0.0;
  bool feasible = false;
};

// Analytic relations tying p0, p_empty and omega to (v, theta0, theta1).
// Returns feasible=false when p_empty leaves [0,1], |cos 2w| exceeds 1, or a
// denominator vanishes; this is a value, not an error.
DerivedParams derived_params(const Visibility& v, double theta0, double theta1);

// Full contraction on the 2^8-dimensional space with the triangle wiring.
TripartiteDistribution evaluate_model(const ModelParams& p);

// Closed-form evaluation of the same distribution (equal to evaluate_model to
// machine precision; used inside fits and scans).
TripartiteDistribution evaluate_model_fast(const ModelParams& p);

struct FitResult {
  ModelParams params;
  double l2 = 0.0;
  Visibility v;
  int iterations = 0;
};

// Minimize l2(model, W_v) over (theta0, theta1) with the analytic relations
// supplying the remaining parameters: coarse grid then Levenberg-Marquardt
// refinement. Deterministic. Throws when every grid point is infeasible.
FitResult fit_model(const Visibility& v, int grid = 64, int refine_iters = 200);

// Same, refining from a starting point (used by scans for warm starts).
// Falls back to a grid fit when the start is infeasible.
FitResult fit_model_warm(const Visibility& v, double theta0, double theta1,
                         int grid = 64, int refine_iters = 200);

// Fit at each grid visibility v_from, v_from+step, ..., <= v_to, warm-started
// from the previous optimum.
std::vector<FitResult> scan_model(const Visibility& v_from,
                                  const Visibility& v_to, const Rational& step,
                                  int grid = 64, int refine_iters = 200);

// Fit following the continuous parameter branch from v = 0 (the branch the
// parameter curves and the bipartite CHSH analysis live on). The optimum at
// fixed v is not unique; warm-starting along the family selects the branch
// deterministically.
FitResult fit_model_branch(const Visibility& v, int steps = 64);

// Effective bipartite experiment: treat (beta, alpha) as inputs and look at
// the conditional distribution of (a, b) generated by the gamma source.
struct ChshResult {
  // p[beta][alpha][a][b] = p(a,b | beta, alpha)
  double p[2][2][2][2] = {};
  double correlator[2][2] = {};  // E(beta, alpha)
  double value = 0.0;            // max over the 8 CHSH sign conventions
};

ChshResult bipartite_chsh(const ModelParams& p);

// Model components, exposed for the tester-side construction and tests.
// Wire orders are part of the contract:
//   alpha_source / beta_source: (bit kept by B resp. A, bit sent to C)
//   gamma_source: (coin_A, qubit_A, coin_B, qubit_B)
//   povm_ab:      (partner bit, coin, qubit)
//   povm_c:       (alpha bit, beta bit)
ComplexMatrix alpha_source(double p0);
ComplexMatrix beta_source(double p0);
ComplexMatrix gamma_source(double p_empty, double omega);
ComplexMatrix observable_ab(double theta0, double theta1);
ComplexMatrix povm_ab(double theta0, double theta1, int outcome);
ComplexMatrix povm_c(int outcome);

// Distribution of a generic triangle strategy. Sources are given on their
// two output wires, (wire to the first adjacent party, wire to the second):
// rho_a on (d_ab, d_ac), rho_b on (d_ba, d_bc), rho_g on (d_ga, d_gb).
// POVMs act on what each party receives, A: (d_ba, d_ga), B: (d_ab, d_gb),
// C: (d_ac, d_bc).
TripartiteDistribution triangle_distribution(
    const ComplexMatrix& rho_a, std::size_t d_ab, std::size_t d_ac,
    const ComplexMatrix& rho_b, std::size_t d_ba, std::size_t d_bc,
    const ComplexMatrix& rho_g, std::size_t d_ga, std::size_t d_gb,
    const std::array<ComplexMatrix, 2>& povm_a,
    const std::array<ComplexMatrix, 2>& povm_b,
    const std::array<ComplexMatrix, 2>& povm_c);

}  // namespace trinet
