// Copyright (c) 2026 the approxwfomc authors
// Distributed under the MIT license (see LICENSE)

#pragma once

#include <map>
#include <utility>
#include <vector>

#include "wfomc/fol.hpp"

namespace wfomc {

// Per-weighted-predicate interval on the number of true groundings. Keys are
// predicate ids in registration order (std::map keeps them sorted, which is
// registration order for ids).
struct CardinalityBox {
  std::map<int, std::pair<Int, Int>> bounds;

  bool all_singleton() const {
    for (const auto& [p, lu] : bounds)
      if (lu.first != lu.second) return false;
    return true;
  }
};

// Hands out fresh variable ids above the base problem. A call reserves a
// contiguous block, so concurrent encoders can share one allocator.
class VarAllocator {
 public:
  explicit VarAllocator(int num_vars) : next_(num_vars + 1) {}
  int reserve(int count) {
    int start = next_;
    next_ += count;
    return start;
  }
  int high_water() const { return next_ - 1; }

 private:
  int next_;
};

struct TotalizerEncoding {
  std::vector<std::vector<int>> clauses;
  std::vector<int> aux_vars;
  // counter_outputs[k-1] is true iff at least k inputs are true.
  std::vector<int> counter_outputs;
};

// Unary counter over input_vars (Bailleux-Boutier totalizer): builds a
// balanced merge tree in ascending variable-id order. Both implication
// directions are encoded, so the auxiliary variables are a dependent
// support: every input assignment extends to exactly one model.
TotalizerEncoding encode_totalizer(std::vector<int> input_vars,
                                   VarAllocator& alloc);

// Unit clauses clamping the unary count into [lo, hi].
std::vector<std::vector<int>> encode_comparator(
    const std::vector<int>& counter_outputs, const Int& lo, const Int& hi);

struct BoxEncoding {
  std::vector<std::vector<int>> clauses;
  std::vector<int> aux_vars;
};

// One totalizer+comparator per constrained predicate over its ground-atom
// variables. Unconstrained entries (0, d^arity) produce no clauses.
BoxEncoding encode_box(const Sentence& s, const GroundProblem& gp,
                       const CardinalityBox& box, VarAllocator& alloc);

}  // namespace wfomc
