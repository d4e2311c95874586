#pragma once

// Distributions over three binary outcomes: the noisy-W family, distances,
// marginals and correlators. Outcome events are indexed 4a+2b+c throughout
// the project and in all file outputs.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace trinet {

using Rational = boost::multiprecision::cpp_rational;

// Visibility of a noisy-W distribution, carried as an exact rational with a
// real-valued view. The inflation certificate checker relies on exactness.
class Visibility {
 public:
  Visibility() : value_(0) {}
  explicit Visibility(const Rational& value);
  Visibility(std::int64_t num, std::int64_t den);
  // Accepts "num/den", integers and plain decimals ("0.6245").
  static Visibility parse(const std::string& text);

  const Rational& value() const { return value_; }
  double to_double() const;
  std::string str() const;

 private:
  Rational value_;
};

class TripartiteDistribution {
 public:
  TripartiteDistribution();  // uniform

  // Validates: entries >= -1e-12 (clamped to 0) and summing to 1 within
  // sum_tol. Entries are stored as given, without renormalization.
  static TripartiteDistribution from_values(const std::array<double, 8>& p,
                                            double sum_tol = 1e-10);
  // Same, but rescales to unit sum after validation (used for numerically
  // contracted distributions).
  static TripartiteDistribution from_values_normalized(
      const std::array<double, 8>& p, double sum_tol = 1e-9);

  double operator[](std::size_t idx) const { return p_[idx]; }
  double at(int a, int b, int c) const { return p_[4 * a + 2 * b + c]; }
  const std::array<double, 8>& values() const { return p_; }

  double sum() const;

 private:
  std::array<double, 8> p_;
};

// Eq.-style noisy W distribution: v/3 on the one-hot events plus (1-v)/8.
TripartiteDistribution w_dist(const Visibility& v);

// Exact rational entries of the same distribution.
std::array<Rational, 8> w_dist_exact(const Visibility& v);

double l2_distance(const TripartiteDistribution& p,
                   const TripartiteDistribution& q);
double l2_distance(const std::array<double, 8>& p,
                   const std::array<double, 8>& q);

// Marginal over the given parties (0=A,1=B,2=C; strictly increasing,
// nonempty). The result is indexed with the first kept party most
// significant.
std::vector<double> marginal(const TripartiteDistribution& p,
                             const std::vector<int>& parties);

// Correlators with outcomes mapped 0 -> +1, 1 -> -1. When the distribution is
// not party-symmetric (within sym_tol), `symmetric` is false and the
// per-party / per-pair values are the authoritative output.
struct Correlators {
  double E1 = 0.0;  // mean single-body
  double E2 = 0.0;  // mean two-body
  double E3 = 0.0;
  bool symmetric = true;
  std::array<double, 3> singles{};  // <A>, <B>, <C>
  std::array<double, 3> pairs{};    // <AB>, <AC>, <BC>
};

Correlators correlators(const TripartiteDistribution& p, double sym_tol = 1e-9);

}  // namespace trinet
