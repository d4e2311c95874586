#pragma once

// Classical triangle-local models: three independent latent sources and
// deterministic-or-stochastic binary response functions,
//   p(a,b,c) = sum_{x,y,z} q(x) r(y) s(z) pA(a|y,z) pB(b|z,x) pC(c|x,y).
// Response tables store the probability of outcome 0, with arguments in the
// order written above (pA rows indexed by y=beta, columns by z=gamma, etc).

#include <cstdint>
#include <vector>

#include "trinet/dist.hpp"

namespace trinet {

struct ResponseTable {
  std::size_t rows = 0, cols = 0;
  std::vector<double> p0;  // row-major probability of outcome 0

  double operator()(std::size_t i, std::size_t j) const {
    return p0[i * cols + j];
  }
  double& operator()(std::size_t i, std::size_t j) { return p0[i * cols + j]; }
};

struct LocalModel {
  std::vector<double> q;  // alpha source
  std::vector<double> r;  // beta source
  std::vector<double> s;  // gamma source
  ResponseTable pa;       // pA(a=0 | beta, gamma)
  ResponseTable pb;       // pB(b=0 | gamma, alpha)
  ResponseTable pc;       // pC(c=0 | alpha, beta)

  std::size_t card_alpha() const { return q.size(); }
  std::size_t card_beta() const { return r.size(); }
  std::size_t card_gamma() const { return s.size(); }

  // Throws when shapes are inconsistent, sources do not sum to 1 within
  // 1e-12, or any response entry leaves [0, 1].
  void validate() const;
};

TripartiteDistribution evaluate(const LocalModel& m);

// The explicit model printed in the paper appendix for the p_empty = 0
// distribution at v = 0.6245 (cardinalities 3, 2, 2).
LocalModel appendix_b_model();
// The distribution it is stated to produce (6-decimal values, symmetric
// closure p(a,b,c) = p(b,a,c)).
TripartiteDistribution appendix_b_distribution();

struct AppendixBReport {
  double l2_vs_printed = 0.0;
  double l2_self = 0.0;
  double l2_vs_quantum_pempty0 = 0.0;  // requires a quantum-model fit
  bool pass = false;
};

// Evaluates the appendix model and compares it against the printed
// distribution and against the fitted quantum model with p_empty forced to 0.
AppendixBReport verify_appendix_b();

struct LocalSearchResult {
  LocalModel model;
  double l2 = 0.0;
  int restarts_used = 0;
};

// Multi-restart coordinate descent over the model parameters. Response
// entries are updated by exact clamped quadratic minimization and source
// weights by pairwise mass transfers, so deterministic 0/1 entries are
// reachable exactly. Deterministic for a fixed seed.
LocalSearchResult search_local(const TripartiteDistribution& target,
                               std::size_t card_alpha, std::size_t card_beta,
                               std::size_t card_gamma, int restarts,
                               std::uint64_t seed, int max_sweeps = 400);

}  // namespace trinet
