#include "trinet/dist.hpp"

#include <cmath>
#include <stdexcept>

namespace trinet {

Visibility::Visibility(const Rational& value) : value_(value) {
  if (value_ < 0 || value_ > 1)
    throw std::invalid_argument("visibility must lie in [0, 1]");
}

Visibility::Visibility(std::int64_t num, std::int64_t den)
    : Visibility(Rational(num, den)) {}

Visibility Visibility::parse(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty visibility");
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    const std::string num = text.substr(0, slash);
    const std::string den = text.substr(slash + 1);
    return Visibility(Rational(boost::multiprecision::cpp_int(num),
                               boost::multiprecision::cpp_int(den)));
  }
  const auto dot = text.find('.');
  if (dot != std::string::npos) {
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    const std::size_t frac_len = text.size() - dot - 1;
    // Strip leading zeros; cpp_int would read them as an octal prefix.
    const auto first = digits.find_first_not_of('0');
    digits = (first == std::string::npos) ? "0" : digits.substr(first);
    if (frac_len == 0) throw std::invalid_argument("bad visibility: " + text);
    boost::multiprecision::cpp_int den = 1;
    for (std::size_t i = 0; i < frac_len; ++i) den *= 10;
    return Visibility(Rational(boost::multiprecision::cpp_int(digits), den));
  }
  return Visibility(Rational(boost::multiprecision::cpp_int(text), 1));
}

double Visibility::to_double() const { return value_.convert_to<double>(); }

std::string Visibility::str() const {
  return value_.str();
}

TripartiteDistribution::TripartiteDistribution() { p_.fill(0.125); }

TripartiteDistribution TripartiteDistribution::from_values(
    const std::array<double, 8>& p, double sum_tol) {
  TripartiteDistribution d;
  double s = 0.0;
  for (std::size_t i = 0; i < 8; ++i) {
    double v = p[i];
    if (v < -1e-12)
      throw std::invalid_argument("distribution entry below -1e-12");
    if (v < 0.0) v = 0.0;
    d.p_[i] = v;
    s += v;
  }
  if (std::abs(s - 1.0) > sum_tol)
    throw std::invalid_argument("distribution does not sum to 1");
  return d;
}

TripartiteDistribution TripartiteDistribution::from_values_normalized(
    const std::array<double, 8>& p, double sum_tol) {
  TripartiteDistribution d = from_values(p, sum_tol);
  const double s = d.sum();
  for (auto& v : d.p_) v /= s;
  return d;
}

double TripartiteDistribution::sum() const {
  double s = 0.0;
  for (auto v : p_) s += v;
  return s;
}

TripartiteDistribution w_dist(const Visibility& v) {
  const double vd = v.to_double();
  const double noise = (1.0 - vd) / 8.0;
  const double peak = vd / 3.0 + noise;
  std::array<double, 8> p;
  p.fill(noise);
  p[0b001] = peak;
  p[0b010] = peak;
  p[0b100] = peak;
  return TripartiteDistribution::from_values(p);
}

std::array<Rational, 8> w_dist_exact(const Visibility& v) {
  const Rational& r = v.value();
  const Rational noise = (1 - r) / 8;
  const Rational peak = r / 3 + noise;
  std::array<Rational, 8> p;
  p.fill(noise);
  p[0b001] = peak;
  p[0b010] = peak;
  p[0b100] = peak;
  return p;
}

double l2_distance(const std::array<double, 8>& p,
                   const std::array<double, 8>& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < 8; ++i) {
    const double d = p[i] - q[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double l2_distance(const TripartiteDistribution& p,
                   const TripartiteDistribution& q) {
  return l2_distance(p.values(), q.values());
}

std::vector<double> marginal(const TripartiteDistribution& p,
                             const std::vector<int>& parties) {
  if (parties.empty()) throw std::invalid_argument("marginal: empty party set");
  for (std::size_t k = 0; k < parties.size(); ++k) {
    if (parties[k] < 0 || parties[k] > 2)
      throw std::out_of_range("marginal: party index out of range");
    if (k > 0 && parties[k] <= parties[k - 1])
      throw std::invalid_argument("marginal: parties must be strictly increasing");
  }
  std::vector<double> out(std::size_t{1} << parties.size(), 0.0);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) {
        const int bits[3] = {a, b, c};
        std::size_t idx = 0;
        for (auto q : parties) idx = 2 * idx + bits[q];
        out[idx] += p.at(a, b, c);
      }
  return out;
}

Correlators correlators(const TripartiteDistribution& p, double sym_tol) {
  Correlators c;
  c.singles.fill(0.0);
  c.pairs.fill(0.0);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int cc = 0; cc < 2; ++cc) {
        const double w = p.at(a, b, cc);
        const double sa = a ? -1.0 : 1.0;
        const double sb = b ? -1.0 : 1.0;
        const double sc = cc ? -1.0 : 1.0;
        c.singles[0] += sa * w;
        c.singles[1] += sb * w;
        c.singles[2] += sc * w;
        c.pairs[0] += sa * sb * w;
        c.pairs[1] += sa * sc * w;
        c.pairs[2] += sb * sc * w;
        c.E3 += sa * sb * sc * w;
      }
  c.E1 = (c.singles[0] + c.singles[1] + c.singles[2]) / 3.0;
  c.E2 = (c.pairs[0] + c.pairs[1] + c.pairs[2]) / 3.0;

  // Full party symmetry: p(a,b,c) invariant under all 6 permutations.
  const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                           {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (const auto& pm : perms) {
    for (int a = 0; a < 2 && c.symmetric; ++a)
      for (int b = 0; b < 2 && c.symmetric; ++b)
        for (int cc = 0; cc < 2 && c.symmetric; ++cc) {
          const int o[3] = {a, b, cc};
          const double lhs = p.at(a, b, cc);
          const double rhs = p.at(o[pm[0]], o[pm[1]], o[pm[2]]);
          if (std::abs(lhs - rhs) > sym_tol) c.symmetric = false;
        }
  }
  return c;
}

}  // namespace trinet
