#include "trinet/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "trinet/kernels.hpp"

namespace trinet::lp {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kEnterTol = 1e-9;

}  // namespace

Solution solve(const Problem& p, int max_iterations) {
  const std::size_t m = p.rows.size();
  const std::size_t n = p.nvars;
  if (p.rhs.size() != m)
    throw std::invalid_argument("lp::solve: rhs size mismatch");
  for (const auto& r : p.rows)
    if (r.size() != n) throw std::invalid_argument("lp::solve: row size mismatch");
  if (max_iterations <= 0)
    max_iterations = 200 * static_cast<int>(m + n) + 20000;

  // Tableau [A | I | b] with rows flipped so b >= 0; artificial basis.
  const std::size_t width = n + m + 1;
  std::vector<std::vector<double>> tab(m, std::vector<double>(width, 0.0));
  std::vector<double> flip(m, 1.0);
  double bmax = 1.0;
  for (std::size_t i = 0; i < m; ++i) {
    flip[i] = (p.rhs[i] < 0.0) ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) tab[i][j] = flip[i] * p.rows[i][j];
    tab[i][n + i] = 1.0;
    tab[i][width - 1] = flip[i] * p.rhs[i];
    bmax = std::max(bmax, tab[i][width - 1]);
  }
  // Objective row: z_j - c_j for the phase-1 costs (artificials cost 1).
  // Initially y = 1, so the x-columns carry the column sums of A and the
  // artificial columns carry 0; objective value = sum b.
  std::vector<double> obj(width, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    kernels::axpy(width, 1.0, tab[i].data(), obj.data());
  for (std::size_t i = 0; i < m; ++i) obj[n + i] = 0.0;

  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;

  Solution sol;
  bool bland = false;
  int stall = 0;
  double last_obj = obj[width - 1];

  for (int iter = 0; iter < max_iterations; ++iter) {
    // Entering column.
    std::size_t enter = width;
    if (!bland) {
      double best = kEnterTol;
      for (std::size_t j = 0; j + 1 < width; ++j)
        if (obj[j] > best) {
          best = obj[j];
          enter = j;
        }
    } else {
      for (std::size_t j = 0; j + 1 < width; ++j)
        if (obj[j] > kEnterTol) {
          enter = j;
          break;
        }
    }
    if (enter == width) {  // optimal
      sol.iterations = iter;
      const double value = obj[width - 1];
      if (value <= 1e-9 * bmax) {
        sol.status = Status::feasible;
        sol.x.assign(n, 0.0);
        for (std::size_t i = 0; i < m; ++i)
          if (basis[i] < n) sol.x[basis[i]] = std::max(tab[i][width - 1], 0.0);
        double res = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          const double ax = kernels::dot(n, p.rows[i].data(), sol.x.data());
          res = std::max(res, std::abs(ax - p.rhs[i]));
        }
        sol.residual = res;
      } else {
        sol.status = Status::infeasible;
        // y_i = 1 + (objective entry of artificial column i), then undo the
        // row flips.
        sol.farkas_y.assign(m, 0.0);
        for (std::size_t i = 0; i < m; ++i)
          sol.farkas_y[i] = flip[i] * (1.0 + obj[n + i]);
      }
      return sol;
    }

    // Ratio test; Bland-compatible tie-break on the smallest basis index.
    std::size_t leave = m;
    double best_ratio = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double a = tab[i][enter];
      if (a > kPivotTol) {
        const double ratio = tab[i][width - 1] / a;
        if (leave == m || ratio < best_ratio - 1e-12 ||
            (ratio < best_ratio + 1e-12 && basis[i] < basis[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
    }
    if (leave == m) {
      // Phase-1 objective is bounded below by 0, so an unbounded ray means
      // numerical breakdown.
      sol.status = Status::failure;
      sol.iterations = iter;
      return sol;
    }

    // Pivot on (leave, enter).
    auto& prow = tab[leave];
    const double pivot = prow[enter];
    const double inv = 1.0 / pivot;
    for (auto& v : prow) v *= inv;
    prow[enter] = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == leave) continue;
      const double factor = tab[i][enter];
      if (factor != 0.0) {
        kernels::axpy(width, -factor, prow.data(), tab[i].data());
        tab[i][enter] = 0.0;
      }
    }
    const double ofac = obj[enter];
    if (ofac != 0.0) {
      kernels::axpy(width, -ofac, prow.data(), obj.data());
      obj[enter] = 0.0;
    }
    basis[leave] = enter;

    if (obj[width - 1] < last_obj - 1e-12) {
      last_obj = obj[width - 1];
      stall = 0;
    } else if (++stall > 1000 && !bland) {
      bland = true;  // anti-cycling from here on
    }
  }
  sol.status = Status::failure;
  sol.iterations = max_iterations;
  return sol;
}

bool verify_certificate_float(const Problem& p, const std::vector<double>& y,
                              double tol) {
  if (y.size() != p.rows.size()) return false;
  double yb = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) yb += y[i] * p.rhs[i];
  if (!(yb > 10.0 * tol)) return false;
  for (std::size_t j = 0; j < p.nvars; ++j) {
    double yaj = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) yaj += y[i] * p.rows[i][j];
    if (yaj > tol) return false;
  }
  return true;
}

std::vector<Rational> rationalize(const std::vector<double>& y,
                                  std::int64_t den_cap, double zero_snap) {
  double ymax = 0.0;
  for (double v : y) ymax = std::max(ymax, std::abs(v));
  if (ymax == 0.0) return std::vector<Rational>(y.size(), Rational(0));

  std::vector<Rational> out;
  out.reserve(y.size());
  for (double v : y) {
    const double t = v / ymax;
    if (std::abs(t) <= zero_snap) {
      out.emplace_back(0);
      continue;
    }
    // Continued-fraction convergents of |t| with denominator cap.
    const bool neg = t < 0.0;
    double x = std::abs(t);
    std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    for (int k = 0; k < 64; ++k) {
      const double fa = std::floor(x);
      if (fa > 9e17) break;
      const std::int64_t a = static_cast<std::int64_t>(fa);
      if (q1 != 0 && (a > (den_cap - q0) / q1)) break;
      const std::int64_t p2 = a * p1 + p0;
      const std::int64_t q2 = a * q1 + q0;
      p0 = p1;
      q0 = q1;
      p1 = p2;
      q1 = q2;
      const double frac = x - fa;
      if (frac < 1e-15) break;
      x = 1.0 / frac;
    }
    Rational r(p1, q1 == 0 ? 1 : q1);
    if (neg) r = -r;
    out.push_back(r);
  }
  return out;
}

bool verify_certificate_exact(const ExactProblem& p,
                              const std::vector<Rational>& y) {
  if (y.size() != p.rows.size()) return false;
  Rational yb(0);
  for (std::size_t i = 0; i < y.size(); ++i) yb += y[i] * p.rhs[i];
  if (!(yb > 0)) return false;
  std::vector<Rational> ya(p.nvars, Rational(0));
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] == 0) continue;
    for (const auto& [j, coeff] : p.rows[i]) ya[j] += y[i] * coeff;
  }
  for (const auto& v : ya)
    if (v > 0) return false;
  return true;
}

}  // namespace trinet::lp
