#pragma once

// Operators with named tensor wires and the link product
//   A * B = Tr_shared[(A^{T_shared} x 1)(1 x B)],
// the contraction over shared wire labels with a partial transpose on the
// contracted factors. No implicit transposes: callers that need M^T (as in a
// tester built from a measurement) pass the operator already transposed.

#include <string>
#include <vector>

#include "trinet/complex_matrix.hpp"

namespace trinet {

struct Wire {
  std::string label;
  std::size_t dim = 0;
};

struct LabeledOperator {
  ComplexMatrix m;
  std::vector<Wire> wires;

  LabeledOperator() = default;
  LabeledOperator(ComplexMatrix mat, std::vector<Wire> ws);

  std::size_t dim() const { return m.rows(); }
  SubsystemShape shape() const;
  // Position of a label, or npos.
  std::size_t find(const std::string& label) const;

  // Reorder wires; new_order lists current wire positions.
  LabeledOperator permuted(const std::vector<std::size_t>& new_order) const;
};

// Result wires: A-only wires (in A's order) followed by B-only wires (in B's
// order). When every wire is shared the result is 1x1 with no wires.
LabeledOperator link_product(const LabeledOperator& a, const LabeledOperator& b);

}  // namespace trinet
