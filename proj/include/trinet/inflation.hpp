#pragma once

// Classical inflation for the triangle network at level n: n copies of each
// source, parties A_ij (parents beta_i, gamma_j), B_jl (gamma_j, alpha_l),
// C_li (alpha_l, beta_i). Compatibility of a target distribution implies
// feasibility of a linear program over the 2^(3n^2) inflation events with
// normalization, source-copy-symmetry and injectable-marginal constraints;
// an exactly verified Farkas certificate of infeasibility witnesses
// nonlocality.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "trinet/dist.hpp"
#include "trinet/lp.hpp"

namespace trinet::inflation {

struct Party {
  char type = 'A';  // 'A', 'B' or 'C'
  int first = 0;    // A_ij: i (beta copy);  B_jl: j (gamma copy);  C_li: l (alpha copy)
  int second = 0;   // A_ij: j (gamma copy); B_jl: l (alpha copy);  C_li: i (beta copy)

  std::string name() const;
};

struct InflationScenario {
  int level = 0;
  std::vector<Party> parties;  // A block, then B, then C; copies lexicographic

  std::size_t party_count() const { return parties.size(); }
  std::uint64_t event_count() const {
    return std::uint64_t{1} << parties.size();
  }
  // Source instances as (source type 0=alpha,1=beta,2=gamma, copy index).
  std::array<std::pair<int, int>, 2> parents(const Party& p) const;
  // Outcome bit of party k in event e (party 0 most significant).
  int bit(std::uint64_t event, std::size_t k) const {
    return static_cast<int>((event >> (parties.size() - 1 - k)) & 1);
  }
};

InflationScenario build_scenario(int n);

struct InjectableSet {
  std::vector<std::size_t> parties;               // ascending
  std::vector<std::vector<std::size_t>> components;  // partition of `parties`
};

// Every subset of size <= max_size whose source-sharing components each
// contain at most one party per original type and use at most one copy per
// source type.
std::vector<InjectableSet> injectable_sets(const InflationScenario& s,
                                           std::size_t max_size);

struct AssembleOptions {
  std::size_t max_injectable = 6;
  bool reduce_symmetry = true;  // solve over orbit representatives
  bool maximal_only = false;    // drop injectable sets contained in others
  bool symmetry_rows = true;    // unreduced mode: emit x[e] = x[rep(e)] rows
  bool dedupe = true;           // drop duplicate constraint rows
};

struct InflationLP {
  int level = 0;
  bool reduced = false;
  lp::Problem problem;        // double view
  lp::ExactProblem exact;     // integer coefficients, rational rhs
  std::vector<std::string> constraint_names;

  // Reduced-variable bookkeeping (empty when !reduced).
  std::vector<std::uint32_t> orbit_rep;   // variable -> representative event
  std::vector<std::uint32_t> orbit_size;  // variable -> orbit cardinality
  std::vector<std::uint32_t> var_of_event;  // event -> variable
};

// Target entries must be exact; use w_dist_exact or exact conversions of
// doubles. Assembly is guarded to n <= 2 (2^27 events at n = 3 are beyond
// desk scale).
InflationLP assemble_lp(const InflationScenario& s,
                        const std::array<Rational, 8>& target,
                        const AssembleOptions& opts = {});

struct Certificate {
  std::vector<double> y;
  std::vector<Rational> y_exact;
  bool verified_float = false;
  bool verified_exact = false;
};

enum class Verdict { feasible, infeasible, failure };

struct SolveResult {
  Verdict verdict = Verdict::failure;
  std::vector<double> x;  // feasible point over the LP variables
  double residual = 0.0;
  Certificate certificate;
  int iterations = 0;
};

// Solve and, when infeasible, verify the certificate (float always; exact
// rational when requested).
SolveResult solve(const InflationLP& lp, bool exact_certificate = true);

// Re-verify a certificate against an LP.
bool verify_certificate(const InflationLP& lp, const Certificate& cert,
                        bool exact);

// Expand a reduced feasible point to the full event space.
std::vector<double> expand_feasible_point(const InflationLP& reduced,
                                          const std::vector<double>& x);

// Lift an exact Farkas certificate of the reduced LP to the full LP (both
// assembled with dedupe = false so constraint rows align; the full LP must
// carry its symmetry rows). The lifted dual reproduces y^T b and distributes
// each orbit's column slack uniformly via the symmetry rows.
std::vector<Rational> transfer_certificate_to_full(
    const InflationLP& reduced, const InflationLP& full,
    const std::vector<Rational>& y_reduced);

// Bisect the level-n detection boundary over the W_v family.
struct ThresholdBracket {
  Visibility lo;  // feasible
  Visibility hi;  // infeasible
};
ThresholdBracket bisect_threshold(int n, const Visibility& v_lo,
                                  const Visibility& v_hi, int depth,
                                  const AssembleOptions& opts = {});

// Party/event/constraint statistics without assembling the LP (usable at
// n = 3 where assembly is out of scope).
struct ScenarioStats {
  int level = 0;
  std::size_t parties = 0;
  std::uint64_t events = 0;
  std::size_t injectable_sets = 0;
  std::uint64_t group_order = 0;
};
ScenarioStats scenario_stats(int n, std::size_t max_injectable = 6);

}  // namespace trinet::inflation
