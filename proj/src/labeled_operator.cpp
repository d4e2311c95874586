#include "trinet/labeled_operator.hpp"

#include <stdexcept>

namespace trinet {

LabeledOperator::LabeledOperator(ComplexMatrix mat, std::vector<Wire> ws)
    : m(std::move(mat)), wires(std::move(ws)) {
  std::size_t total = 1;
  for (std::size_t i = 0; i < wires.size(); ++i) {
    if (wires[i].dim == 0)
      throw std::invalid_argument("LabeledOperator: zero wire dimension");
    for (std::size_t j = i + 1; j < wires.size(); ++j)
      if (wires[i].label == wires[j].label)
        throw std::invalid_argument("LabeledOperator: duplicate wire label");
    total *= wires[i].dim;
  }
  if (!m.square() || m.rows() != total)
    throw std::invalid_argument("LabeledOperator: wire dims do not match matrix");
}

SubsystemShape LabeledOperator::shape() const {
  SubsystemShape s;
  for (const auto& w : wires) s.dims.push_back(w.dim);
  return s;
}

std::size_t LabeledOperator::find(const std::string& label) const {
  for (std::size_t i = 0; i < wires.size(); ++i)
    if (wires[i].label == label) return i;
  return static_cast<std::size_t>(-1);
}

LabeledOperator LabeledOperator::permuted(
    const std::vector<std::size_t>& new_order) const {
  ComplexMatrix pm = permute_subsystems(m, shape(), new_order);
  std::vector<Wire> ws(new_order.size());
  for (std::size_t t = 0; t < new_order.size(); ++t) ws[t] = wires[new_order[t]];
  return LabeledOperator(std::move(pm), std::move(ws));
}

LabeledOperator link_product(const LabeledOperator& a, const LabeledOperator& b) {
  constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::vector<std::size_t> a_shared, a_only, b_shared, b_only;
  for (std::size_t i = 0; i < a.wires.size(); ++i) {
    const std::size_t j = b.find(a.wires[i].label);
    if (j == npos) {
      a_only.push_back(i);
    } else {
      if (a.wires[i].dim != b.wires[j].dim)
        throw std::invalid_argument("link_product: dimension mismatch on wire '" +
                                    a.wires[i].label + "'");
      a_shared.push_back(i);
      b_shared.push_back(j);
    }
  }
  for (std::size_t j = 0; j < b.wires.size(); ++j)
    if (a.find(b.wires[j].label) == npos) b_only.push_back(j);

  // Arrange A as (A-only, shared) and B as (shared, B-only), with the shared
  // wires in matching order.
  std::vector<std::size_t> a_order = a_only;
  a_order.insert(a_order.end(), a_shared.begin(), a_shared.end());
  std::vector<std::size_t> b_order = b_shared;
  b_order.insert(b_order.end(), b_only.begin(), b_only.end());
  const LabeledOperator ap = a.permuted(a_order);
  const LabeledOperator bp = b.permuted(b_order);

  std::size_t da = 1, ds = 1, db = 1;
  for (auto i : a_only) da *= a.wires[i].dim;
  for (auto i : a_shared) ds *= a.wires[i].dim;
  for (auto j : b_only) db *= b.wires[j].dim;

  // C[(i,k),(j,l)] = sum_{s,u} A'[(i,u),(j,s)] B'[(u,k),(s,l)]
  ComplexMatrix c(da * db, da * db);
  for (std::size_t i = 0; i < da; ++i)
    for (std::size_t j = 0; j < da; ++j)
      for (std::size_t k = 0; k < db; ++k)
        for (std::size_t l = 0; l < db; ++l) {
          cxd acc{};
          for (std::size_t s = 0; s < ds; ++s)
            for (std::size_t u = 0; u < ds; ++u)
              acc += ap.m(i * ds + u, j * ds + s) * bp.m(u * db + k, s * db + l);
          c(i * db + k, j * db + l) = acc;
        }

  std::vector<Wire> wires;
  for (auto i : a_only) wires.push_back(a.wires[i]);
  for (auto j : b_only) wires.push_back(b.wires[j]);
  return LabeledOperator(std::move(c), std::move(wires));
}

}  // namespace trinet
