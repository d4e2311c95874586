#pragma once

// Dense phase-1 primal simplex for standard-form feasibility problems
//   A x = b, x >= 0,
// with Farkas infeasibility certificates harvested from the phase-1 duals
// (y with y^T b > 0 and y^T A <= 0 entrywise). Pivoting is Dantzig by
// default with a permanent switch to Bland's rule when the objective stalls,
// so runs are deterministic and cycle-free.

#include <cstdint>
#include <vector>

#include "trinet/dist.hpp"  // Rational

namespace trinet::lp {

struct Problem {
  std::size_t nvars = 0;
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
};

enum class Status { feasible, infeasible, failure };

struct Solution {
  Status status = Status::failure;
  std::vector<double> x;          // feasible point (status == feasible)
  std::vector<double> farkas_y;   // certificate (status == infeasible)
  double residual = 0.0;          // max |Ax - b| of the feasible point
  int iterations = 0;
};

Solution solve(const Problem& p, int max_iterations = 0);  // 0 = automatic cap

// Float check: y^T b > 10 * tol and max_j (y^T A)_j <= tol.
bool verify_certificate_float(const Problem& p, const std::vector<double>& y,
                              double tol = 1e-9);

// Exact-arithmetic view of the same constraints (integer coefficients,
// rational right-hand sides), stored sparse.
struct ExactProblem {
  std::size_t nvars = 0;
  std::vector<std::vector<std::pair<std::size_t, long long>>> rows;
  std::vector<Rational> rhs;
};

// Rationalize a float vector by continued fractions with denominators
// bounded by den_cap; entries below zero_snap (relative to the max) become 0.
std::vector<Rational> rationalize(const std::vector<double>& y,
                                  std::int64_t den_cap = 1000000,
                                  double zero_snap = 1e-12);

// Exact Farkas check of the rationalized dual. Returns true when
// y^T b > 0 and y^T A <= 0 hold exactly.
bool verify_certificate_exact(const ExactProblem& p,
                              const std::vector<Rational>& y);

}  // namespace trinet::lp
