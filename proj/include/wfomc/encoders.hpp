// Copyright (c) 2026 the approxwfomc authors
// Distributed under the MIT license (see LICENSE)

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wfomc/engine.hpp"
#include "wfomc/fol.hpp"
#include "wfomc/formula.hpp"

namespace wfomc {

// ---------------------------------------------------------------- MLN ----

struct MlnRule {
  // Either a log-space MLN weight (converted to exp(w) as a rational at a
  // configurable precision) or a direct rational weight for the auxiliary
  // predicate.
  std::optional<Rat> direct_weight;
  std::string log_weight;
  FormulaPtr formula;
};

struct MlnProgram {
  Sentence skeleton;  // declared predicates only (all neutral, ordinary)
  std::vector<MlnRule> rules;
};

// Alchemy-like subset: `//` comments, `Pred(type, ...)` declarations, one
// `<weight> <formula>` rule per line (operators ! ^ v => <=>).
MlnProgram parse_mln(std::istream& in, bool direct_weights = false);
MlnProgram parse_mln_file(const std::string& path, bool direct_weights = false);

struct EncodeOptions {
  long tseitin_budget = 32;  // max clauses per rule before Tseitin kicks in
  int exp_digits = 12;       // significant digits for e^w conversion
};

struct EncodeResult {
  Sentence sentence;
  std::vector<std::string> notes;  // e.g. weight-conversion records
};

// One auxiliary predicate P_i per rule, clauses of P_i <-> formula_i,
// w(P_i) = e^{w_i} (or the direct rational), everything else neutral;
// sampling set stays on the original predicates.
EncodeResult encode_mln(const MlnProgram& mln, const EncodeOptions& opts = {});

// ------------------------------------------------------------ ProbLog ----

struct ProblogFact {
  Rat p;
  int pred;
};

struct ProblogRule {
  int head_pred;
  std::vector<std::string> head_vars;  // distinct variables
  std::vector<NLit> body;              // positive atoms (definite program)
};

struct ProblogProgram {
  Sentence skeleton;  // predicate registry
  std::vector<ProblogFact> facts;
  std::vector<ProblogRule> rules;
};

// `p :: atom.` facts, `head :- body.` rules, `%` comments.
ProblogProgram parse_problog(std::istream& in);
ProblogProgram parse_problog_file(const std::string& path);

// ------------------------------------------------- Skolemization ----

// One clause of a universally quantified sentence whose disjuncts may
// include existential blocks  exists ys . (conjunction of literals).
// Variables not bound by a block are implicitly universal.
struct ExistsBlock {
  std::vector<std::string> vars;
  std::vector<NLit> body;
};

struct PseudoClause {
  std::vector<NLit> literals;
  std::vector<ExistsBlock> blocks;
};

struct QSentence {
  Sentence base;  // predicates registered; clauses ignored
  std::vector<PseudoClause> clauses;
};

// WFOMC-preserving elimination of the existential blocks: each block
// exists y.psi(x,y) is replaced by a fresh neutral predicate Z(x) with
//   forall x,y  psi -> Z(x)
//   forall x    Z(x) v S(x)
//   forall x,y  psi -> S(x)
// where S carries weights (1, -1) and the -1 cancels the spurious models in
// which Z holds without a witness. Blocks with no bound variables become
// plain biconditional (Tseitin) definitions instead.
Sentence skolemize(const QSentence& qs);

// Clark's completion of a tight program followed by skolemize; fact
// predicates get weights (p, 1-p), everything else neutral; derived, Tseitin
// and Skolem predicates are excluded from the sampling set.
EncodeResult encode_problog(const ProblogProgram& prog);

// ------------------------------------------------------ query wrapper ----

struct QueryAtom {
  int pred;
  std::vector<int> constants;
};

// Parses "series" / "attends(1)" against the encoded sentence.
QueryAtom parse_query(const Sentence& s, const std::string& text);

struct ProbabilityInterval {
  Rat lo, hi;
  BoundsReport denominator;
  BoundsReport numerator;  // run on Delta AND NOT q
};

// P(q) from two engine runs: a denominator run on Delta and a numerator run
// on Delta AND NOT q, with P(q) in [1 - N.ub/D.lb, 1 - N.lb/D.ub] (clamped
// to [0,1]). The complement run keeps counting sound for positive queries
// under the Skolem relaxation.
ProbabilityInterval query_probability(const Sentence& encoded,
                                      const QueryAtom& q, int domain_size,
                                      const OracleConfig& oracle_config,
                                      const EngineConfig& engine_config);

}  // namespace wfomc
