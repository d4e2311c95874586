#include "trinet/inflation.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace trinet::inflation {

namespace {

std::uint64_t factorial(int n) {
  std::uint64_t f = 1;
  for (int k = 2; k <= n; ++k) f *= static_cast<std::uint64_t>(k);
  return f;
}

// All permutations of {0..n-1} in lexicographic order.
std::vector<std::vector<int>> all_perms(int n) {
  std::vector<int> base(n);
  for (int i = 0; i < n; ++i) base[i] = i;
  std::vector<std::vector<int>> out;
  do {
    out.push_back(base);
  } while (std::next_permutation(base.begin(), base.end()));
  return out;
}

}  // namespace

std::string Party::name() const {
  return std::string(1, type) + "_" + std::to_string(first + 1) +
         std::to_string(second + 1);
}

std::array<std::pair<int, int>, 2> InflationScenario::parents(
    const Party& p) const {
  switch (p.type) {
    case 'A': return {{{1, p.first}, {2, p.second}}};  // beta_i, gamma_j
    case 'B': return {{{2, p.first}, {0, p.second}}};  // gamma_j, alpha_l
    default:  return {{{0, p.first}, {1, p.second}}};  // alpha_l, beta_i
  }
}

InflationScenario build_scenario(int n) {
  if (n < 1) throw std::invalid_argument("build_scenario: level must be >= 1");
  InflationScenario s;
  s.level = n;
  for (char type : {'A', 'B', 'C'})
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) s.parties.push_back(Party{type, x, y});
  return s;
}

std::vector<InjectableSet> injectable_sets(const InflationScenario& s,
                                           std::size_t max_size) {
  const std::size_t np = s.party_count();
  if (max_size > np)
    throw std::invalid_argument("injectable_sets: max_size exceeds party count");

  std::vector<InjectableSet> out;
  std::vector<std::size_t> current;

  // Check the component rules for a candidate set; fills the decomposition.
  auto classify = [&](const std::vector<std::size_t>& set,
                      InjectableSet& result) {
    const std::size_t k = set.size();
    // Union-find over the set via shared source instances.
    std::vector<std::size_t> root(k);
    for (std::size_t i = 0; i < k; ++i) root[i] = i;
    auto find = [&](std::size_t i) {
      while (root[i] != i) i = root[i] = root[root[i]];
      return i;
    };
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i + 1; j < k; ++j) {
        const auto pi = s.parents(s.parties[set[i]]);
        const auto pj = s.parents(s.parties[set[j]]);
        for (const auto& a : pi)
          for (const auto& b : pj)
            if (a == b) root[find(i)] = find(j);
      }
    std::map<std::size_t, std::vector<std::size_t>> comps;
    for (std::size_t i = 0; i < k; ++i) comps[find(i)].push_back(i);

    result.parties = set;
    result.components.clear();
    for (const auto& [rep, members] : comps) {
      (void)rep;
      bool type_seen[3] = {false, false, false};
      int copy_used[3] = {-1, -1, -1};  // per source type
      for (const auto mi : members) {
        const Party& p = s.parties[set[mi]];
        const int t = p.type - 'A';
        if (type_seen[t]) return false;  // two parties of one type linked
        type_seen[t] = true;
        for (const auto& [src, copy] : s.parents(p)) {
          if (copy_used[src] >= 0 && copy_used[src] != copy)
            return false;  // two copies of one source type in a component
          copy_used[src] = copy;
        }
      }
      std::vector<std::size_t> comp;
      for (const auto mi : members) comp.push_back(set[mi]);
      result.components.push_back(std::move(comp));
    }
    return true;
  };

  // Enumerate subsets of size <= max_size.
  auto recurse = [&](auto&& self, std::size_t next) -> void {
    if (!current.empty()) {
      InjectableSet cand;
      if (classify(current, cand)) out.push_back(std::move(cand));
    }
    if (current.size() == max_size) return;
    for (std::size_t p = next; p < np; ++p) {
      current.push_back(p);
      self(self, p + 1);
      current.pop_back();
    }
  };
  recurse(recurse, 0);
  return out;
}

namespace {

// Group elements of S_n^3 as party permutations.
std::vector<std::vector<std::size_t>> party_group(const InflationScenario& s) {
  const int n = s.level;
  const auto perms = all_perms(n);
  std::vector<std::vector<std::size_t>> group;
  // Index of party (type, first, second).
  auto pidx = [&](char type, int f, int sec) {
    const int block = (type - 'A');
    return static_cast<std::size_t>(block * n * n + f * n + sec);
  };
  for (const auto& pa : perms)
    for (const auto& pb : perms)
      for (const auto& pg : perms) {
        std::vector<std::size_t> g(s.party_count());
        for (std::size_t k = 0; k < s.party_count(); ++k) {
          const Party& p = s.parties[k];
          switch (p.type) {
            case 'A':  // A_ij -> A_{pb(i), pg(j)}
              g[k] = pidx('A', pb[p.first], pg[p.second]);
              break;
            case 'B':  // B_jl -> B_{pg(j), pa(l)}
              g[k] = pidx('B', pg[p.first], pa[p.second]);
              break;
            default:  // C_li -> C_{pa(l), pb(i)}
              g[k] = pidx('C', pa[p.first], pb[p.second]);
          }
        }
        group.push_back(std::move(g));
      }
  return group;
}

// Image of an event under a party permutation: bit at g[k] = bit at k.
std::uint64_t act(const InflationScenario& s,
                  const std::vector<std::size_t>& g, std::uint64_t e) {
  const std::size_t np = s.party_count();
  std::uint64_t out = 0;
  for (std::size_t k = 0; k < np; ++k)
    if (s.bit(e, k)) out |= std::uint64_t{1} << (np - 1 - g[k]);
  return out;
}

// Marginal of the exact target over a component's party types at the
// component's outcomes.
Rational component_marginal(const InflationScenario& s,
                            const std::array<Rational, 8>& target,
                            const std::vector<std::size_t>& component,
                            std::uint64_t event) {
  bool fixed[3] = {false, false, false};
  int val[3] = {0, 0, 0};
  for (const auto p : component) {
    const int t = s.parties[p].type - 'A';
    fixed[t] = true;
    val[t] = s.bit(event, p);
  }
  Rational sum(0);
  for (int a = 0; a < 2; ++a) {
    if (fixed[0] && a != val[0]) continue;
    for (int b = 0; b < 2; ++b) {
      if (fixed[1] && b != val[1]) continue;
      for (int c = 0; c < 2; ++c) {
        if (fixed[2] && c != val[2]) continue;
        sum += target[4 * a + 2 * b + c];
      }
    }
  }
  return sum;
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace

InflationLP assemble_lp(const InflationScenario& s,
                        const std::array<Rational, 8>& target,
                        const AssembleOptions& opts) {
  if (s.level > 2)
    throw std::invalid_argument(
        "assemble_lp: level > 2 is beyond desk scale (2^27 events); see "
        "scenario_stats");
  const std::size_t np = s.party_count();
  const std::uint64_t ne = s.event_count();

  InflationLP lp;
  lp.level = s.level;
  lp.reduced = opts.reduce_symmetry;

  // Orbits of the source-copy symmetry group.
  const auto group = party_group(s);
  std::vector<std::uint32_t> rep(ne);
  for (std::uint64_t e = 0; e < ne; ++e) {
    std::uint64_t r = e;
    for (const auto& g : group) r = std::min(r, act(s, g, e));
    rep[e] = static_cast<std::uint32_t>(r);
  }

  std::size_t nvars = 0;
  if (lp.reduced) {
    lp.var_of_event.assign(ne, 0);
    std::map<std::uint32_t, std::uint32_t> var_of_rep;
    for (std::uint64_t e = 0; e < ne; ++e) {
      if (rep[e] == e) {
        var_of_rep[static_cast<std::uint32_t>(e)] =
            static_cast<std::uint32_t>(lp.orbit_rep.size());
        lp.orbit_rep.push_back(static_cast<std::uint32_t>(e));
        lp.orbit_size.push_back(0);
      }
    }
    for (std::uint64_t e = 0; e < ne; ++e) {
      const std::uint32_t v = var_of_rep.at(rep[e]);
      lp.var_of_event[e] = v;
      lp.orbit_size[v] += 1;
    }
    nvars = lp.orbit_rep.size();
  } else {
    nvars = static_cast<std::size_t>(ne);
  }
  lp.problem.nvars = nvars;
  lp.exact.nvars = nvars;

  // Deduplicated row insertion (identical exact rows collapse).
  std::map<std::pair<std::vector<std::pair<std::size_t, long long>>, Rational>,
           bool>
      seen;
  auto add_row = [&](std::vector<std::pair<std::size_t, long long>> row,
                     const Rational& rhs, std::string name) {
    std::sort(row.begin(), row.end());
    if (opts.dedupe && !seen.emplace(std::make_pair(row, rhs), true).second)
      return;
    std::vector<double> dense(nvars, 0.0);
    for (const auto& [j, c] : row) dense[j] += static_cast<double>(c);
    lp.problem.rows.push_back(std::move(dense));
    lp.problem.rhs.push_back(to_double(rhs));
    lp.exact.rows.push_back(std::move(row));
    lp.exact.rhs.push_back(rhs);
    lp.constraint_names.push_back(std::move(name));
  };

  // Normalization.
  {
    std::vector<std::pair<std::size_t, long long>> row;
    if (lp.reduced) {
      for (std::size_t v = 0; v < nvars; ++v)
        row.emplace_back(v, static_cast<long long>(lp.orbit_size[v]));
    } else {
      for (std::size_t v = 0; v < nvars; ++v) row.emplace_back(v, 1);
    }
    add_row(std::move(row), Rational(1), "normalization");
  }

  // Symmetry constraints (unreduced mode): x[e] = x[rep(e)]. They are
  // feasibility-redundant (group-averaging a feasible point preserves the
  // group-covariant marginal constraints) and can be dropped via the option.
  if (!lp.reduced && opts.symmetry_rows) {
    for (std::uint64_t e = 0; e < ne; ++e) {
      if (rep[e] == e) continue;
      std::vector<std::pair<std::size_t, long long>> row{
          {static_cast<std::size_t>(e), 1},
          {static_cast<std::size_t>(rep[e]), -1}};
      add_row(std::move(row), Rational(0),
              "symmetry e" + std::to_string(e) + "=e" + std::to_string(rep[e]));
    }
  }

  // Injectable marginal constraints.
  auto sets =
      injectable_sets(s, std::min(opts.max_injectable, s.party_count()));
  if (opts.maximal_only) {
    std::vector<InjectableSet> maximal;
    for (std::size_t i = 0; i < sets.size(); ++i) {
      bool contained = false;
      for (std::size_t j = 0; j < sets.size() && !contained; ++j) {
        if (i == j || sets[j].parties.size() <= sets[i].parties.size())
          continue;
        contained = std::includes(sets[j].parties.begin(),
                                  sets[j].parties.end(),
                                  sets[i].parties.begin(),
                                  sets[i].parties.end());
      }
      if (!contained) maximal.push_back(sets[i]);
    }
    sets = std::move(maximal);
  }

  for (const auto& set : sets) {
    const std::size_t k = set.parties.size();
    // One constraint per outcome assignment over the set.
    for (std::uint64_t o = 0; o < (std::uint64_t{1} << k); ++o) {
      // Build a template event carrying the assignment.
      std::uint64_t pattern = 0, mask = 0;
      for (std::size_t t = 0; t < k; ++t) {
        const std::size_t p = set.parties[t];
        mask |= std::uint64_t{1} << (np - 1 - p);
        if ((o >> (k - 1 - t)) & 1) pattern |= std::uint64_t{1} << (np - 1 - p);
      }
      Rational rhs(1);
      for (const auto& comp : set.components)
        rhs *= component_marginal(s, target, comp, pattern);

      std::vector<long long> coeff(nvars, 0);
      for (std::uint64_t e = 0; e < ne; ++e) {
        if ((e & mask) != pattern) continue;
        const std::size_t v =
            lp.reduced ? lp.var_of_event[e] : static_cast<std::size_t>(e);
        coeff[v] += 1;
      }
      std::vector<std::pair<std::size_t, long long>> row;
      for (std::size_t v = 0; v < nvars; ++v)
        if (coeff[v] != 0) row.emplace_back(v, coeff[v]);

      std::string name = "marginal {";
      for (std::size_t t = 0; t < k; ++t) {
        name += s.parties[set.parties[t]].name();
        name += (t + 1 < k) ? ' ' : '}';
      }
      name += " o=" + std::to_string(o);
      add_row(std::move(row), rhs, std::move(name));
    }
  }
  return lp;
}

SolveResult solve(const InflationLP& lp, bool exact_certificate) {
  SolveResult out;
  const lp::Solution sol = lp::solve(lp.problem);
  out.iterations = sol.iterations;
  switch (sol.status) {
    case lp::Status::failure:
      out.verdict = Verdict::failure;
      return out;
    case lp::Status::feasible:
      out.verdict = Verdict::feasible;
      out.x = sol.x;
      out.residual = sol.residual;
      if (out.residual > 1e-8) out.verdict = Verdict::failure;
      return out;
    case lp::Status::infeasible:
      break;
  }
  out.verdict = Verdict::infeasible;
  out.certificate.y = sol.farkas_y;
  out.certificate.verified_float =
      lp::verify_certificate_float(lp.problem, sol.farkas_y);
  if (exact_certificate) {
    out.certificate.y_exact = lp::rationalize(sol.farkas_y);
    out.certificate.verified_exact =
        lp::verify_certificate_exact(lp.exact, out.certificate.y_exact);
  }
  if (!out.certificate.verified_float && !out.certificate.verified_exact)
    out.verdict = Verdict::failure;
  return out;
}

bool verify_certificate(const InflationLP& lp, const Certificate& cert,
                        bool exact) {
  if (!exact) return lp::verify_certificate_float(lp.problem, cert.y);
  if (cert.y_exact.empty()) return false;
  return lp::verify_certificate_exact(lp.exact, cert.y_exact);
}

std::vector<double> expand_feasible_point(const InflationLP& reduced,
                                          const std::vector<double>& x) {
  if (!reduced.reduced || x.size() != reduced.problem.nvars)
    throw std::invalid_argument("expand_feasible_point: not a reduced solution");
  std::vector<double> full(reduced.var_of_event.size());
  for (std::size_t e = 0; e < full.size(); ++e)
    full[e] = x[reduced.var_of_event[e]];
  return full;
}

std::vector<Rational> transfer_certificate_to_full(
    const InflationLP& reduced, const InflationLP& full,
    const std::vector<Rational>& y_reduced) {
  if (!reduced.reduced || full.reduced)
    throw std::invalid_argument("transfer_certificate_to_full: wrong LP modes");
  const std::size_t ne = reduced.var_of_event.size();
  const std::size_t sym_rows = ne - reduced.problem.nvars;
  if (full.problem.rows.size() != sym_rows + reduced.problem.rows.size())
    throw std::invalid_argument(
        "transfer_certificate_to_full: assemble both LPs with dedupe=false");
  if (y_reduced.size() != reduced.problem.rows.size())
    throw std::invalid_argument("transfer_certificate_to_full: dual size");

  std::vector<Rational> y_full(full.problem.rows.size(), Rational(0));
  y_full[0] = y_reduced[0];
  for (std::size_t k = 1; k < y_reduced.size(); ++k)
    y_full[sym_rows + k] = y_reduced[k];

  // Per-event column contribution of the normalization + marginal rows.
  std::vector<Rational> contribution(ne, Rational(0));
  auto accumulate = [&](std::size_t row) {
    if (y_full[row] == 0) return;
    for (const auto& [e, c] : full.exact.rows[row])
      contribution[e] += y_full[row] * c;
  };
  accumulate(0);
  for (std::size_t r = sym_rows + 1; r < y_full.size(); ++r) accumulate(r);

  // Orbit averages; the reduced certificate guarantees avg <= 0.
  std::vector<Rational> avg(reduced.problem.nvars, Rational(0));
  for (std::size_t e = 0; e < ne; ++e)
    avg[reduced.var_of_event[e]] += contribution[e];
  for (std::size_t v = 0; v < avg.size(); ++v)
    avg[v] /= static_cast<long long>(reduced.orbit_size[v]);

  // Symmetry duals flatten every column of an orbit onto its average.
  std::size_t sym_index = 0;
  for (std::size_t e = 0; e < ne; ++e) {
    const std::uint32_t v = reduced.var_of_event[e];
    if (reduced.orbit_rep[v] == e) continue;
    y_full[1 + sym_index] = avg[v] - contribution[e];
    ++sym_index;
  }
  if (sym_index != sym_rows)
    throw std::logic_error("transfer_certificate_to_full: symmetry row count");
  return y_full;
}

ThresholdBracket bisect_threshold(int n, const Visibility& v_lo,
                                  const Visibility& v_hi, int depth,
                                  const AssembleOptions& opts) {
  if (!(v_lo.value() < v_hi.value()))
    throw std::invalid_argument("bisect_threshold: need v_lo < v_hi");
  const InflationScenario s = build_scenario(n);

  auto verdict_at = [&](const Visibility& v) {
    const auto res = solve(assemble_lp(s, w_dist_exact(v), opts), false);
    if (res.verdict == Verdict::failure)
      throw std::runtime_error("bisect_threshold: numerical failure at v = " +
                               v.str());
    return res.verdict;
  };

  if (verdict_at(v_lo) != Verdict::feasible)
    throw std::invalid_argument("bisect_threshold: v_lo is not feasible");
  if (verdict_at(v_hi) != Verdict::infeasible)
    throw std::invalid_argument("bisect_threshold: v_hi is not infeasible");

  ThresholdBracket b{v_lo, v_hi};
  for (int k = 0; k < depth; ++k) {
    const Visibility mid((b.lo.value() + b.hi.value()) / 2);
    if (verdict_at(mid) == Verdict::feasible)
      b.lo = mid;
    else
      b.hi = mid;
  }
  return b;
}

ScenarioStats scenario_stats(int n, std::size_t max_injectable) {
  ScenarioStats st;
  const InflationScenario s = build_scenario(n);
  st.level = n;
  st.parties = s.party_count();
  st.events = s.event_count();
  st.injectable_sets =
      injectable_sets(s, std::min(max_injectable, s.party_count())).size();
  const std::uint64_t f = factorial(n);
  st.group_order = f * f * f;
  return st;
}

}  // namespace trinet::inflation
