#pragma once

// Seesaw over the three triangle testers: with two testers fixed, the map
// tester -> distribution is linear, so each block subproblem is a convex
// least-squares over the tester spectrahedron (PSD elements intersected with
// the affine normalization). Blocks are solved by consensus ADMM with a
// closed-form affine projection and eigenvalue clipping, then polished onto
// the feasible set by Dykstra alternating projections.

#include <array>
#include <cstdint>
#include <vector>

#include "trinet/dist.hpp"
#include "trinet/tester.hpp"

namespace trinet::seesaw {

struct SeesawConfig {
  std::size_t wire_dim = 4;
  int restarts = 32;
  int max_sweeps = 500;
  double block_tol = 1e-10;
  double conv_tol = 1e-12;
  std::uint64_t seed = 20240001;
  int threads = 1;  // restarts are independent; reduction is order-free
  // Stop a restart once its l2 falls below this value (0 disables; the
  // default grinds to the conv_tol floor).
  double target_l2 = 0.0;
};

struct SeesawResult {
  Tester r, s, t;
  double l2 = 0.0;
  int sweeps_used = 0;
  int restart_index = 0;
  std::vector<double> trace;  // best restart's per-sweep l2
  std::vector<std::vector<double>> all_traces;  // per restart
};

// Orthogonal projection onto the tester feasible set (Dykstra between the
// PSD cone per element and the affine normalization subspace). Returns the
// worst remaining constraint residual.
double project_tester_feasible(std::vector<ComplexMatrix>& elements,
                               std::size_t d_out, std::size_t d_in,
                               double tol = 1e-10, int max_rounds = 2000);

// Opaque consensus-ADMM state; reusing it warm-starts consecutive solves of
// slowly changing block problems (the seesaw sweeps).
struct BlockState {
  std::vector<ComplexMatrix> z1, z2, u1, u2;
  double rho = 1.0;
};

// Minimize l2(contract_triangle(...), target) over the tester in position
// `which` (0 = R, 1 = S, 2 = T) with the other two fixed (given in cycle
// order: fixed1 follows the free block, fixed2 precedes it). `warm` seeds
// the solver when provided; `state` carries ADMM variables across calls.
Tester block_solve(const TripartiteDistribution& target, const Tester& fixed1,
                   const Tester& fixed2, int which, std::size_t d_in,
                   std::size_t d_out, double tol, const Tester* warm = nullptr,
                   BlockState* state = nullptr);

SeesawResult run(const TripartiteDistribution& target, const SeesawConfig& cfg);

// Baseline alternating optimization over the six raw variables (three
// source states on wire pairs, three binary measurements), kept for
// comparison with the three-tester form: twice the block count and markedly
// less stable in practice. Supported for wire_dim <= 2.
struct RawSeesawResult {
  ComplexMatrix rho_a, rho_b, rho_g;
  std::array<ComplexMatrix, 2> povm_a, povm_b, povm_c;
  double l2 = 0.0;
  int sweeps_used = 0;
  int restart_index = 0;
  std::vector<double> trace;
  std::vector<std::vector<double>> all_traces;
};

RawSeesawResult run_raw(const TripartiteDistribution& target,
                        const SeesawConfig& cfg);

}  // namespace trinet::seesaw
