// Copyright (c) 2026 the approxwfomc authors
// Distributed under the MIT license (see LICENSE)

#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wfomc/rational.hpp"

namespace wfomc {

struct ParseError : std::runtime_error {
  int line = 0, col = 0;
  ParseError(const std::string& msg, int line_, int col_)
      : std::runtime_error("parse error at " + std::to_string(line_) + ":" +
                           std::to_string(col_) + ": " + msg),
        line(line_),
        col(col_) {}
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ResourceLimit : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class PredRole { ordinary, auxiliary, skolem };

struct Predicate {
  std::string name;
  int arity = 0;
  Rat w = 1;     // positive-literal weight
  Rat wbar = 1;  // negative-literal weight
  PredRole role = PredRole::ordinary;

  bool neutral() const { return w == 1 && wbar == 1; }
};

// A term is a logical variable (index into a per-clause variable list) or a
// domain constant in 1..d.
struct Term {
  bool is_var = true;
  int value = 0;  // variable index, or constant

  static Term var(int idx) { return {true, idx}; }
  static Term constant(int c) { return {false, c}; }
  bool operator==(const Term&) const = default;
};

struct Literal {
  int pred = -1;  // index into Sentence::predicates
  bool positive = true;
  std::vector<Term> args;
  bool operator==(const Literal&) const = default;
};

// Implicitly universally quantified disjunction. var_names[i] names variable
// index i (for printing and for deterministic grounding order).
struct Clause {
  std::vector<Literal> literals;
  std::vector<std::string> var_names;
  int num_vars() const { return static_cast<int>(var_names.size()); }
};

class Sentence {
 public:
  std::vector<Predicate> predicates;
  std::vector<Clause> clauses;

  int add_predicate(Predicate p);
  int find_predicate(const std::string& name) const;  // -1 if absent
  const Predicate& pred(int i) const { return predicates[i]; }

  // Predicates with (w, wbar) != (1, 1), excluding skolem, in registration
  // order.
  std::vector<int> weighted_predicates() const;

  void add_clause(Clause c) { clauses.push_back(std::move(c)); }

  // Ground unit clause pinning `atom` (a fully-constant literal) to
  // `positive`.
  void add_ground_unit(const Literal& lit);

  void validate() const;

 private:
  std::map<std::string, int> index_;
};

// Propositional image of a Sentence over domain {1..d}. Variables are
// 1-based DIMACS-style; a literal is +v or -v.
struct GroundProblem {
  int num_vars = 0;
  std::vector<std::vector<int>> clauses;
  int domain_size = 0;

  // atom_table: variable ids are assigned lexicographically by (predicate
  // registration order, argument tuple in row-major order over {1..d}).
  std::vector<int> pred_offset;  // predicates.size()+1 entries
  std::vector<int> sampling_set;

  // Variable id of pred's ground atom with 0-based row-major tuple index.
  int atom_var(int pred, long tuple_index) const {
    return pred_offset[pred] + static_cast<int>(tuple_index) + 1;
  }
};

struct ParsedModel {
  Sentence sentence;
  std::optional<int> domain_size;
};

// Native model format: `domain <d>`, `predicate Name/k [w=.. wbar=..]`,
// `clause [!]Name(T,..) ...` lines, `#` comments.
ParsedModel parse_model(std::istream& in);
ParsedModel parse_model_string(const std::string& text);
ParsedModel parse_model_file(const std::string& path);

Int ground_count(const Predicate& p, int domain_size);

GroundProblem ground(const Sentence& s, int domain_size,
                     long max_ground_clauses = 1000000);

// Renders a Sentence back into the native model format.
std::string to_native_format(const Sentence& s,
                             std::optional<int> domain_size);

}  // namespace wfomc
