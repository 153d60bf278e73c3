// Copyright (c) 2026 the approxwfomc authors
// Distributed under the MIT license (see LICENSE)

#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "wfomc/fol.hpp"

namespace wfomc {

// Term of a quantifier-free formula: a named variable or a domain constant.
struct FTerm {
  bool is_var = true;
  std::string var;
  int constant = 0;

  static FTerm v(std::string name) { return {true, std::move(name), 0}; }
  static FTerm c(int value) { return {false, {}, value}; }
  bool operator==(const FTerm&) const = default;
};

enum class FKind { atom, neg, conj, disj, implies, iff };

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  FKind kind = FKind::atom;
  int pred = -1;               // atom
  std::vector<FTerm> args;     // atom
  std::vector<FormulaPtr> kids;

  static FormulaPtr atom(int pred, std::vector<FTerm> args);
  static FormulaPtr neg(FormulaPtr f);
  static FormulaPtr conj(std::vector<FormulaPtr> kids);
  static FormulaPtr disj(std::vector<FormulaPtr> kids);
  static FormulaPtr implies(FormulaPtr a, FormulaPtr b);
  static FormulaPtr iff(FormulaPtr a, FormulaPtr b);
};

// Free variables in first-appearance (left-to-right) order.
std::vector<std::string> free_vars(const FormulaPtr& f);

// First-order literal with named terms; the building block of clause
// construction before per-clause variable indexing.
struct NLit {
  int pred = -1;
  bool positive = true;
  std::vector<FTerm> args;
  bool operator==(const NLit&) const = default;
};
using NClause = std::vector<NLit>;

// Converts named-literal clauses into Sentence clauses (variable names are
// indexed per clause in first-appearance order).
Clause to_clause(const NClause& nc);

// Number of clauses plain distribution of `f` (negated first when
// `negated`) would produce; saturates at `cap`.
long cnf_size_estimate(const FormulaPtr& f, bool negated, long cap);

// CNF of `f` (negated first when `negated`) by distribution. No auxiliary
// predicates; use cnf_biconditional for budgeted conversion.
std::vector<NClause> cnf_distribute(const FormulaPtr& f, bool negated);

// Clauses equivalent to `head(args) <-> f`. When plain distribution of
// either direction would exceed clause_budget, subformulas are replaced by
// fresh auxiliary predicates (full biconditional definitions, so models are
// preserved one-to-one and the auxiliaries stay a dependent support).
// Auxiliary predicates are registered in `s` with the given name prefix.
std::vector<NClause> cnf_biconditional(Sentence& s, const NLit& head,
                                       const FormulaPtr& f, long clause_budget,
                                       const std::string& aux_prefix);

// Evaluates `f` under a fixed interpretation, used by test oracles and the
// MLN ground-truth path: `truth(pred, constant args) -> bool`.
bool eval_formula(const FormulaPtr& f,
                  const std::vector<std::pair<std::string, int>>& binding,
                  const std::function<bool(int, const std::vector<int>&)>& truth);

}  // namespace wfomc
