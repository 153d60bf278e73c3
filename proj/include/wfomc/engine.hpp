// Copyright (c) 2026 the approxwfomc authors
// Distributed under the MIT license (see LICENSE)

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wfomc/cardenc.hpp"
#include "wfomc/fol.hpp"
#include "wfomc/oracle.hpp"

namespace wfomc {

struct Region {
  CardinalityBox box;
  Rat lb = 0;
  Rat ub = 0;
  long insertion_index = 0;
};

enum class StopReason {
  tolerance_met,
  queue_exhausted,
  budget_exhausted,
  resource_limit
};

const char* to_string(StopReason r);

struct ProgressRecord {
  long iter = 0;
  Rat lb = 0;
  Rat ub = 0;
  std::optional<Rat> ratio;  // empty when lb == 0
  int oracle_calls = 0;
  Rat delta_consumed = 0;
  long elapsed_ms = 0;
};

struct BoundsReport {
  Rat lb = 0;
  Rat ub = 0;
  std::optional<Rat> pac_lb;  // external mode only
  std::optional<Rat> pac_ub;
  std::optional<Rat> ratio;   // empty when lb == 0
  int oracle_calls = 0;
  Rat delta_consumed = 0;
  long iterations = 0;
  StopReason terminated_by = StopReason::tolerance_met;
  std::vector<ProgressRecord> trace;
};

struct EngineConfig {
  Rat tau = Rat(1, 1000000);
  long max_ground_clauses = 1000000;
  Int max_terms = 100000;  // decompose mode cap
  long time_limit_ms = 0;  // whole-run cap; 0 = none
  // sibling oracle calls may run concurrently; contributions are always
  // folded in child-enumeration order, so traces stay deterministic
  int oracle_threads = 1;
  std::function<void(const ProgressRecord&)> progress;
};

// M(phi, d) = prod over weighted predicates of (d^arity + 1): the number of
// terms in the exact decomposition.
Int term_count(const Sentence& s, int domain_size);

// Conservative a-priori bound on the number of oracle calls the anytime
// search can make: the full split tree has at most 2*M(phi,d) nodes
// including the initialization call.
Int engine_max_calls(const Sentence& s, int domain_size);

// Children of a box: every non-singleton interval (l,u) splits at
// m = floor((l+u)/2) into (l,m), (m+1,u); singletons carry through; the
// result is the Cartesian product in key order with the last key varying
// fastest. Empty when the box is all-singleton.
std::vector<CardinalityBox> split_box(const CardinalityBox& box);

// Per-predicate weight extremes over the box: f(n) = w^n * wbar^(xi - n) is
// evaluated at both interval endpoints (f is monotone, so endpoints are the
// global extremes); returns the products of the per-predicate minima and
// maxima.
std::pair<Rat, Rat> region_weight_bounds(const Sentence& s,
                                         const CardinalityBox& box,
                                         int domain_size);

// The anytime search: splits the region with the largest |ub - lb| until
// UB/LB < 1 + tau, the queue empties, or a budget/resource limit fires.
BoundsReport run(const Sentence& s, int domain_size, FomcOracle& oracle,
                 const EngineConfig& config);

// Exact Theorem-style decomposition: sum over all per-predicate exact
// counts of weight * FOMC. Requires an exact oracle for an exact result.
struct DecomposeResult {
  Rat value;
  int oracle_calls = 0;
  Int terms;
};
DecomposeResult decompose_exact(const Sentence& s, int domain_size,
                                FomcOracle& oracle, const Int& max_terms);

// Theorem-3 adjustment for an approximate oracle with tolerance epsilon.
std::pair<Rat, Rat> pac_adjust(const Rat& lb, const Rat& ub,
                               const Rat& epsilon);

}  // namespace wfomc
