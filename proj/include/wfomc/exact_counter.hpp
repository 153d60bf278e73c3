// Copyright (c) 2026 the approxwfomc authors
// Distributed under the MIT license (see LICENSE)

#pragma once

#include <cstdint>
#include <vector>

#include "wfomc/rational.hpp"

namespace wfomc {

// Exact projected model counter: counts distinct satisfying assignments
// restricted to a sampling set. DPLL with unit propagation, branching on
// sampling variables first; once no unsatisfied clause mentions an
// unassigned sampling variable, the remaining sampling variables are free
// (factor 2^k) and a single satisfiability check settles the subtree.
class ExactCounter {
 public:
  ExactCounter(int num_vars, std::vector<std::vector<int>> clauses);

  // Distinct projections onto sampling_set (1-based variable ids) of the
  // models of the clause set. deadline_ms = 0 disables the time cap.
  Int count_projected(const std::vector<int>& sampling_set,
                      long deadline_ms = 0);

 private:
  struct ClauseState {
    int sat_count = 0;
    int nonfalse = 0;
  };

  bool assign(int lit);
  void undo_to(size_t mark);
  bool propagate();
  Int count_rec();
  bool extension_exists();

  int num_vars_;
  std::vector<std::vector<int>> clauses_;
  std::vector<std::vector<int>> occ_;  // var -> clause indices
  std::vector<int8_t> assign_;         // 1-based; 0 unknown
  std::vector<ClauseState> state_;
  std::vector<int> trail_;
  std::vector<int> prop_queue_;
  std::vector<char> is_sampling_;
  int unassigned_sampling_ = 0;
  int active_clauses_ = 0;
  long deadline_ms_ = 0;
  long start_ms_ = 0;
  long nodes_ = 0;
};

}  // namespace wfomc
