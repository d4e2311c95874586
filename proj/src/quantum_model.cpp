#include "trinet/quantum_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace trinet {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

ComplexMatrix correlated_bit_pair(double p_first) {
  // p_first |00><00| + (1 - p_first) |11><11| on two qubit wires.
  ComplexMatrix m(4, 4);
  m(0, 0) = p_first;
  m(3, 3) = 1.0 - p_first;
  return m;
}

}  // namespace

ComplexMatrix alpha_source(double p0) { return correlated_bit_pair(p0); }
ComplexMatrix beta_source(double p0) { return correlated_bit_pair(p0); }

ComplexMatrix gamma_source(double p_empty, double omega) {
  // Coin pair (cA, cB) tensor |w><w| on (qA, qB), reordered to
  // (cA, qA, cB, qB) so that each party's systems are adjacent.
  const ComplexMatrix coins = correlated_bit_pair(p_empty);
  const double cw = std::cos(omega), sw = std::sin(omega);
  ComplexMatrix w(4, 4);
  w(0, 0) = cw * cw;
  w(0, 3) = -cw * sw;
  w(3, 0) = -sw * cw;
  w(3, 3) = sw * sw;
  ComplexMatrix full = kron(coins, w);  // (cA, cB, qA, qB)
  return permute_subsystems(full, SubsystemShape{{2, 2, 2, 2}}, {0, 2, 1, 3});
}

ComplexMatrix observable_ab(double theta0, double theta1) {
  // sigma_z (x) |0><0| (x) 1  +  sum_j |j><j| (x) |1><1| (x) M_j,
  // wire order (partner bit, coin, qubit), M_j = cos(t_j) sz + sin(t_j) sx.
  ComplexMatrix obs(8, 8);
  auto m_of = [](double t) {
    ComplexMatrix m(2, 2);
    m(0, 0) = std::cos(t);
    m(1, 1) = -std::cos(t);
    m(0, 1) = std::sin(t);
    m(1, 0) = std::sin(t);
    return m;
  };
  const ComplexMatrix m[2] = {m_of(theta0), m_of(theta1)};
  for (int bit = 0; bit < 2; ++bit) {
    const double z = bit ? -1.0 : 1.0;
    // coin = 0 block: z * identity on the qubit
    for (int qb = 0; qb < 2; ++qb) {
      const std::size_t i = 4 * bit + 0 + qb;  // (bit, coin=0, qubit)
      obs(i, i) = z;
    }
    // coin = 1 block: M_bit on the qubit
    for (int q1 = 0; q1 < 2; ++q1)
      for (int q2 = 0; q2 < 2; ++q2)
        obs(4 * bit + 2 + q1, 4 * bit + 2 + q2) = m[bit](q1, q2);
  }
  return obs;
}

ComplexMatrix povm_ab(double theta0, double theta1, int outcome) {
  // Outcome 0 <-> eigenvalue +1.
  const ComplexMatrix obs = observable_ab(theta0, theta1);
  const double sign = outcome ? -1.0 : 1.0;
  ComplexMatrix p = ComplexMatrix::identity(8);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j)
      p(i, j) = 0.5 * ((i == j ? 1.0 : 0.0) + sign * obs(i, j).real());
  return p;
}

ComplexMatrix povm_c(int outcome) {
  // c = (alpha xor 1)(beta xor 1): outcome 1 iff both bits are 0.
  ComplexMatrix one(4, 4);
  one(0, 0) = 1.0;
  if (outcome == 1) return one;
  ComplexMatrix p = ComplexMatrix::identity(4);
  p(0, 0) = 0.0;
  return p;
}

TripartiteDistribution triangle_distribution(
    const ComplexMatrix& rho_a, std::size_t d_ab, std::size_t d_ac,
    const ComplexMatrix& rho_b, std::size_t d_ba, std::size_t d_bc,
    const ComplexMatrix& rho_g, std::size_t d_ga, std::size_t d_gb,
    const std::array<ComplexMatrix, 2>& povm_a,
    const std::array<ComplexMatrix, 2>& povm_b,
    const std::array<ComplexMatrix, 2>& povm_c) {
  if (rho_a.rows() != d_ab * d_ac || rho_b.rows() != d_ba * d_bc ||
      rho_g.rows() != d_ga * d_gb)
    throw std::invalid_argument("triangle_distribution: source dims mismatch");

  // Global wire order (aB, aC, bA, bC, gA, gB).
  const ComplexMatrix rho = kron(kron(rho_a, rho_b), rho_g);
  const SubsystemShape party_shape{{d_ba, d_ga, d_ab, d_gb, d_ac, d_bc}};
  // kron(A, B, C) lives on (bA, gA, aB, gB, aC, bC); the permutation below
  // maps it onto the global order.
  const std::vector<std::size_t> perm{2, 4, 0, 5, 1, 3};

  std::array<double, 8> p{};
  for (int a = 0; a < 2; ++a) {
    const ComplexMatrix ab_part = povm_a[a];
    for (int b = 0; b < 2; ++b) {
      const ComplexMatrix ab = kron(ab_part, povm_b[b]);
      for (int c = 0; c < 2; ++c) {
        ComplexMatrix full = kron(ab, povm_c[c]);
        full = permute_subsystems(full, party_shape, perm);
        p[4 * a + 2 * b + c] = hs_inner(rho, full).real();
      }
    }
  }
  return TripartiteDistribution::from_values_normalized(p, 1e-9);
}

TripartiteDistribution evaluate_model(const ModelParams& mp) {
  if (mp.p0 < 0.0 || mp.p0 > 1.0 || mp.p_empty < 0.0 || mp.p_empty > 1.0)
    throw std::invalid_argument("evaluate_model: probabilities outside [0,1]");
  if (!std::isfinite(mp.omega) || !std::isfinite(mp.theta0) ||
      !std::isfinite(mp.theta1))
    throw std::invalid_argument("evaluate_model: non-finite angle");

  const std::array<ComplexMatrix, 2> pa{povm_ab(mp.theta0, mp.theta1, 0),
                                        povm_ab(mp.theta0, mp.theta1, 1)};
  const std::array<ComplexMatrix, 2> pc{povm_c(0), povm_c(1)};
  return triangle_distribution(alpha_source(mp.p0), 2, 2, beta_source(mp.p0),
                               2, 2, gamma_source(mp.p_empty, mp.omega), 4, 4,
                               pa, pa, pc);
}

TripartiteDistribution evaluate_model_fast(const ModelParams& mp) {
  const double p = mp.p0;
  const double f = mp.p_empty;
  const double c2w = std::cos(2.0 * mp.omega);
  const double s2w = std::sin(2.0 * mp.omega);
  const double ct[2] = {std::cos(mp.theta0), std::cos(mp.theta1)};
  const double st[2] = {std::sin(mp.theta0), std::sin(mp.theta1)};
  const double pa[2] = {p, 1.0 - p};

  std::array<double, 8> out{};
  for (int x = 0; x < 2; ++x) {    // alpha bit (received by B)
    for (int y = 0; y < 2; ++y) {  // beta bit (received by A)
      const double w = pa[x] * pa[y];
      const int c = (x == 0 && y == 0) ? 1 : 0;
      const double ma = c2w * ct[y];
      const double mb = c2w * ct[x];
      const double eab = ct[y] * ct[x] - s2w * st[y] * st[x];
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          const double sa = a ? -1.0 : 1.0;
          const double sb = b ? -1.0 : 1.0;
          const double quantum =
              0.25 * (1.0 + sa * ma + sb * mb + sa * sb * eab);
          const double classical = (a == y && b == x) ? 1.0 : 0.0;
          out[4 * a + 2 * b + c] += w * (f * classical + (1.0 - f) * quantum);
        }
    }
  }
  return TripartiteDistribution::from_values(out, 1e-12);
}

DerivedParams derived_params(const Visibility& vis, double theta0,
                             double theta1) {
  DerivedParams d;
  const double v = vis.to_double();
  d.p0 = std::sqrt(0.5 - v / 6.0);

  const double c0 = std::cos(theta0), c1 = std::cos(theta1);
  const double root = std::sqrt(6.0 * (3.0 - v));

  const double den_pe = (3.0 - v) * (c0 + c1);
  if (std::abs(den_pe) < 1e-12) return d;
  double pe = (v / 3.0) * (root * c0 + 6.0 * c1) / den_pe;
  if (pe < -1e-12 || pe > 1.0 + 1e-12) return d;
  pe = std::clamp(pe, 0.0, 1.0);

  const double den_cw = (v * (3.0 + root) - 9.0) * c0 - 9.0 * (1.0 - v) * c1;
  if (std::abs(den_cw) < 1e-12) return d;
  // Sign flip relative to the printed closed form: the printed expression
  // corresponds to the theta -> pi - theta reparameterization of the stated
  // observables. With the observables taken literally, the single-body
  // matching conditions pin cos 2w to the opposite sign (see
  // tests/test_quantum_model.cpp, "matching conditions").
  double c2w = -v * (6.0 - root) / den_cw;
  if (std::abs(c2w) > 1.0 + 1e-12) return d;
  c2w = std::clamp(c2w, -1.0, 1.0);

  d.p_empty = pe;
  d.omega = 0.5 * std::acos(c2w);
  d.feasible = true;
  return d;
}

namespace {

struct Objective {
  const Visibility& v;
  std::array<double, 8> target;

  // Residual vector; returns false when (theta0, theta1) is infeasible.
  bool residual(double t0, double t1, std::array<double, 8>& r) const {
    const DerivedParams d = derived_params(v, t0, t1);
    if (!d.feasible) return false;
    const ModelParams mp{d.p0, d.p_empty, d.omega, t0, t1};
    const std::array<double, 8> p = evaluate_model_fast(mp).values();
    for (int i = 0; i < 8; ++i) r[i] = p[i] - target[i];
    return true;
  }

  double l2(double t0, double t1) const {
    std::array<double, 8> r;
    if (!residual(t0, t1, r)) return std::numeric_limits<double>::infinity();
    double s = 0.0;
    for (double x : r) s += x * x;
    return std::sqrt(s);
  }
};

// Levenberg-Marquardt on the 2-d residual map.
int refine(const Objective& obj, double& t0, double& t1, int max_iters) {
  std::array<double, 8> r;
  if (!obj.residual(t0, t1, r)) return 0;
  double f = 0.0;
  for (double x : r) f += x * x;

  double lambda = 1e-3;
  int iters = 0;
  for (; iters < max_iters; ++iters) {
    // Central-difference Jacobian.
    const double h0 = 1e-7 * std::max(1.0, std::abs(t0));
    const double h1 = 1e-7 * std::max(1.0, std::abs(t1));
    std::array<double, 8> rp, rm;
    double jac[8][2];
    if (!obj.residual(t0 + h0, t1, rp) || !obj.residual(t0 - h0, t1, rm))
      break;
    for (int i = 0; i < 8; ++i) jac[i][0] = (rp[i] - rm[i]) / (2.0 * h0);
    if (!obj.residual(t0, t1 + h1, rp) || !obj.residual(t0, t1 - h1, rm))
      break;
    for (int i = 0; i < 8; ++i) jac[i][1] = (rp[i] - rm[i]) / (2.0 * h1);

    double jtj[2][2] = {}, jtr[2] = {};
    for (int i = 0; i < 8; ++i) {
      jtj[0][0] += jac[i][0] * jac[i][0];
      jtj[0][1] += jac[i][0] * jac[i][1];
      jtj[1][1] += jac[i][1] * jac[i][1];
      jtr[0] += jac[i][0] * r[i];
      jtr[1] += jac[i][1] * r[i];
    }
    jtj[1][0] = jtj[0][1];
    if (std::max(std::abs(jtr[0]), std::abs(jtr[1])) < 1e-18) break;

    bool stepped = false;
    for (int tries = 0; tries < 40; ++tries) {
      const double a = jtj[0][0] * (1.0 + lambda);
      const double dmid = jtj[0][1];
      const double b = jtj[1][1] * (1.0 + lambda);
      const double det = a * b - dmid * dmid;
      if (std::abs(det) < 1e-300) {
        lambda *= 10.0;
        continue;
      }
      const double d0 = -(b * jtr[0] - dmid * jtr[1]) / det;
      const double d1 = -(-dmid * jtr[0] + a * jtr[1]) / det;
      std::array<double, 8> rn;
      if (obj.residual(t0 + d0, t1 + d1, rn)) {
        double fn = 0.0;
        for (double x : rn) fn += x * x;
        if (fn < f) {
          t0 += d0;
          t1 += d1;
          r = rn;
          const double gain = f - fn;
          f = fn;
          lambda = std::max(lambda / 3.0, 1e-15);
          stepped = true;
          if (gain < 1e-32 && f < 1e-24) return iters + 1;
          break;
        }
      }
      lambda *= 10.0;
      if (lambda > 1e12) return iters + 1;
    }
    if (!stepped) break;
  }
  return iters;
}

FitResult finish_fit(const Visibility& v, double t0, double t1, int iters,
                     const Objective& obj) {
  // Canonical branch: (t0, t1) -> (-t0, -t1) leaves the distribution and the
  // derived parameters unchanged; report the representative with t0 >= 0.
  if (t0 < 0.0 || (t0 == 0.0 && t1 < 0.0)) {
    t0 = -t0;
    t1 = -t1;
  }
  const DerivedParams d = derived_params(v, t0, t1);
  if (!d.feasible) throw std::runtime_error("fit: optimum became infeasible");
  FitResult res;
  res.params = ModelParams{d.p0, d.p_empty, d.omega, t0, t1};
  res.l2 = obj.l2(t0, t1);
  res.v = v;
  res.iterations = iters;
  return res;
}

}  // namespace

FitResult fit_model(const Visibility& v, int grid, int refine_iters) {
  if (grid < 2) throw std::invalid_argument("fit_model: grid too small");
  Objective obj{v, w_dist(v).values()};

  double best_l2 = std::numeric_limits<double>::infinity();
  double best_t0 = 0.0, best_t1 = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double t0 = -kPi + 2.0 * kPi * (i + 1) / grid;
    for (int j = 0; j < grid; ++j) {
      const double t1 = -kPi + 2.0 * kPi * (j + 1) / grid;
      const double l2 = obj.l2(t0, t1);
      if (l2 < best_l2) {
        best_l2 = l2;
        best_t0 = t0;
        best_t1 = t1;
      }
    }
  }
  if (!std::isfinite(best_l2))
    throw std::runtime_error("fit_model: every grid point is infeasible");

  const int iters = refine(obj, best_t0, best_t1, refine_iters);
  return finish_fit(v, best_t0, best_t1, iters, obj);
}

FitResult fit_model_warm(const Visibility& v, double theta0, double theta1,
                         int grid, int refine_iters) {
  Objective obj{v, w_dist(v).values()};
  if (!std::isfinite(obj.l2(theta0, theta1)))
    return fit_model(v, grid, refine_iters);
  double t0 = theta0, t1 = theta1;
  const int iters = refine(obj, t0, t1, refine_iters);
  return finish_fit(v, t0, t1, iters, obj);
}

std::vector<FitResult> scan_model(const Visibility& v_from,
                                  const Visibility& v_to, const Rational& step,
                                  int grid, int refine_iters) {
  if (step <= 0) throw std::invalid_argument("scan_model: step must be > 0");
  std::vector<FitResult> out;
  if (v_from.value() > v_to.value()) return out;

  bool have_prev = false;
  double prev_t0 = 0.0, prev_t1 = 0.0;
  for (Rational v = v_from.value(); v <= v_to.value(); v += step) {
    const Visibility vis(v);
    FitResult fr = have_prev
                       ? fit_model_warm(vis, prev_t0, prev_t1, grid, refine_iters)
                       : fit_model(vis, grid, refine_iters);
    prev_t0 = fr.params.theta0;
    prev_t1 = fr.params.theta1;
    have_prev = true;
    out.push_back(std::move(fr));
  }
  return out;
}

FitResult fit_model_branch(const Visibility& v, int steps) {
  if (steps < 1) throw std::invalid_argument("fit_model_branch: steps < 1");
  if (v.value() == 0) return fit_model(v);
  FitResult fr = fit_model(Visibility(0, 1));
  for (int k = 1; k <= steps; ++k) {
    const Visibility vk(v.value() * k / steps);
    fr = fit_model_warm(vk, fr.params.theta0, fr.params.theta1);
  }
  return fr;
}

ChshResult bipartite_chsh(const ModelParams& mp) {
  if (mp.p_empty < 0.0 || mp.p_empty > 1.0)
    throw std::invalid_argument("bipartite_chsh: p_empty outside [0,1]");
  ChshResult res;
  const double f = mp.p_empty;
  const double c2w = std::cos(2.0 * mp.omega);
  const double s2w = std::sin(2.0 * mp.omega);
  const double ct[2] = {std::cos(mp.theta0), std::cos(mp.theta1)};
  const double st[2] = {std::sin(mp.theta0), std::sin(mp.theta1)};

  for (int y = 0; y < 2; ++y) {    // beta, input of A
    for (int x = 0; x < 2; ++x) {  // alpha, input of B
      const double ma = c2w * ct[y];
      const double mb = c2w * ct[x];
      const double eab = ct[y] * ct[x] - s2w * st[y] * st[x];
      double corr = 0.0;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          const double sa = a ? -1.0 : 1.0;
          const double sb = b ? -1.0 : 1.0;
          const double quantum =
              0.25 * (1.0 + sa * ma + sb * mb + sa * sb * eab);
          const double classical = (a == y && b == x) ? 1.0 : 0.0;
          const double prob = f * classical + (1.0 - f) * quantum;
          res.p[y][x][a][b] = prob;
          corr += sa * sb * prob;
        }
      res.correlator[y][x] = corr;
    }
  }
  const double e00 = res.correlator[0][0], e01 = res.correlator[0][1];
  const double e10 = res.correlator[1][0], e11 = res.correlator[1][1];
  res.value = std::max({std::abs(e00 + e01 + e10 - e11),
                        std::abs(e00 + e01 - e10 + e11),
                        std::abs(e00 - e01 + e10 + e11),
                        std::abs(-e00 + e01 + e10 + e11)});
  return res;
}

}  // namespace trinet
