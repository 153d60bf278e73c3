// Copyright (c) 2026 the approxwfomc authors
// Distributed under the MIT license (see LICENSE)

#include "wfomc/formula.hpp"

#include <algorithm>

namespace wfomc {

FormulaPtr Formula::atom(int pred, std::vector<FTerm> args) {
  auto f = std::make_shared<Formula>();
  f->kind = FKind::atom;
  f->pred = pred;
  f->args = std::move(args);
  return f;
}
FormulaPtr Formula::neg(FormulaPtr a) {
  auto f = std::make_shared<Formula>();
  f->kind = FKind::neg;
  f->kids = {std::move(a)};
  return f;
}
FormulaPtr Formula::conj(std::vector<FormulaPtr> kids) {
  auto f = std::make_shared<Formula>();
  f->kind = FKind::conj;
  f->kids = std::move(kids);
  return f;
}
FormulaPtr Formula::disj(std::vector<FormulaPtr> kids) {
  auto f = std::make_shared<Formula>();
  f->kind = FKind::disj;
  f->kids = std::move(kids);
  return f;
}
FormulaPtr Formula::implies(FormulaPtr a, FormulaPtr b) {
  auto f = std::make_shared<Formula>();
  f->kind = FKind::implies;
  f->kids = {std::move(a), std::move(b)};
  return f;
}
FormulaPtr Formula::iff(FormulaPtr a, FormulaPtr b) {
  auto f = std::make_shared<Formula>();
  f->kind = FKind::iff;
  f->kids = {std::move(a), std::move(b)};
  return f;
}

namespace {

void collect_vars(const FormulaPtr& f, std::vector<std::string>& out) {
  if (f->kind == FKind::atom) {
    for (const auto& t : f->args)
      if (t.is_var && std::find(out.begin(), out.end(), t.var) == out.end())
        out.push_back(t.var);
    return;
  }
  for (const auto& k : f->kids) collect_vars(k, out);
}

// NNF with only atom / neg-of-atom / conj / disj nodes.
FormulaPtr nnf(const FormulaPtr& f, bool negate) {
  switch (f->kind) {
    case FKind::atom:
      return negate ? Formula::neg(f) : f;
    case FKind::neg:
      return nnf(f->kids[0], !negate);
    case FKind::conj:
    case FKind::disj: {
      std::vector<FormulaPtr> kids;
      for (const auto& k : f->kids) kids.push_back(nnf(k, negate));
      bool is_conj = (f->kind == FKind::conj) != negate;
      return is_conj ? Formula::conj(std::move(kids))
                     : Formula::disj(std::move(kids));
    }
    case FKind::implies: {
      // a -> b  ==  !a v b
      auto d = Formula::disj({Formula::neg(f->kids[0]), f->kids[1]});
      return nnf(d, negate);
    }
    case FKind::iff: {
      // a <-> b  ==  (a -> b) ^ (b -> a)
      auto c = Formula::conj({Formula::implies(f->kids[0], f->kids[1]),
                              Formula::implies(f->kids[1], f->kids[0])});
      return nnf(c, negate);
    }
  }
  throw ValidationError("bad formula node");
}

NLit to_nlit(const FormulaPtr& f) {
  if (f->kind == FKind::atom) return {f->pred, true, f->args};
  return {f->kids[0]->pred, false, f->kids[0]->args};
}

bool is_literal(const FormulaPtr& f) {
  return f->kind == FKind::atom ||
         (f->kind == FKind::neg && f->kids[0]->kind == FKind::atom);
}

long estimate_nnf(const FormulaPtr& f, long cap) {
  if (is_literal(f)) return 1;
  long total = f->kind == FKind::conj ? 0 : 1;
  for (const auto& k : f->kids) {
    long e = estimate_nnf(k, cap);
    if (f->kind == FKind::conj)
      total += e;
    else
      total *= e;
    if (total > cap) return cap + 1;
  }
  return total;
}

// adds lit to every clause, dropping clauses that become tautologies
void add_literal(std::vector<NClause>& clauses, const NLit& lit) {
  std::vector<NClause> out;
  for (auto& c : clauses) {
    bool taut = false, dup = false;
    for (const auto& l : c) {
      if (l.pred == lit.pred && l.args == lit.args) {
        if (l.positive != lit.positive) taut = true;
        else dup = true;
      }
    }
    if (taut) continue;
    if (!dup) c.push_back(lit);
    out.push_back(std::move(c));
  }
  clauses = std::move(out);
}

std::vector<NClause> distribute_nnf(const FormulaPtr& f) {
  if (is_literal(f)) return {{to_nlit(f)}};
  if (f->kind == FKind::conj) {
    std::vector<NClause> out;
    for (const auto& k : f->kids)
      for (auto& c : distribute_nnf(k)) out.push_back(std::move(c));
    return out;
  }
  // disjunction: cross product
  std::vector<NClause> acc{{}};
  for (const auto& k : f->kids) {
    auto part = distribute_nnf(k);
    std::vector<NClause> next;
    for (const auto& a : acc) {
      for (const auto& p : part) {
        NClause merged = a;
        bool taut = false;
        for (const auto& lit : p) {
          bool dup = false;
          for (const auto& l : merged)
            if (l.pred == lit.pred && l.args == lit.args) {
              if (l.positive != lit.positive) taut = true;
              else dup = true;
            }
          if (taut) break;
          if (!dup) merged.push_back(lit);
        }
        if (!taut) next.push_back(std::move(merged));
      }
    }
    acc = std::move(next);
  }
  return acc;
}

}  // namespace

std::vector<std::string> free_vars(const FormulaPtr& f) {
  std::vector<std::string> out;
  collect_vars(f, out);
  return out;
}

Clause to_clause(const NClause& nc) {
  Clause c;
  for (const auto& nl : nc) {
    Literal lit;
    lit.pred = nl.pred;
    lit.positive = nl.positive;
    for (const auto& t : nl.args) {
      if (t.is_var) {
        auto it = std::find(c.var_names.begin(), c.var_names.end(), t.var);
        int idx;
        if (it == c.var_names.end()) {
          idx = static_cast<int>(c.var_names.size());
          c.var_names.push_back(t.var);
        } else {
          idx = static_cast<int>(it - c.var_names.begin());
        }
        lit.args.push_back(Term::var(idx));
      } else {
        lit.args.push_back(Term::constant(t.constant));
      }
    }
    c.literals.push_back(std::move(lit));
  }
  return c;
}

long cnf_size_estimate(const FormulaPtr& f, bool negated, long cap) {
  return estimate_nnf(nnf(f, negated), cap);
}

std::vector<NClause> cnf_distribute(const FormulaPtr& f, bool negated) {
  return distribute_nnf(nnf(f, negated));
}

namespace {

// Tseitin over an NNF tree: every internal node gets a fresh predicate with
// a full biconditional definition.
NLit tseitin_rec(Sentence& s, const FormulaPtr& f, std::vector<NClause>& defs,
                 const std::string& prefix, int& counter) {
  if (is_literal(f)) return to_nlit(f);

  std::vector<NLit> kid_lits;
  for (const auto& k : f->kids)
    kid_lits.push_back(tseitin_rec(s, k, defs, prefix, counter));

  std::vector<std::string> vars = free_vars(f);
  Predicate aux;
  do {
    aux.name = prefix + std::to_string(++counter);
  } while (s.find_predicate(aux.name) >= 0);
  aux.arity = static_cast<int>(vars.size());
  aux.role = PredRole::auxiliary;
  int pid = s.add_predicate(aux);
  NLit t{pid, true, {}};
  for (const auto& v : vars) t.args.push_back(FTerm::v(v));

  NLit nt = t;
  nt.positive = false;
  if (f->kind == FKind::conj) {
    NClause big{t};
    for (auto kl : kid_lits) {
      defs.push_back({nt, kl});  // t -> kid
      kl.positive = !kl.positive;
      big.push_back(kl);  // kids -> t
    }
    defs.push_back(std::move(big));
  } else {
    NClause big{nt};
    for (auto kl : kid_lits) {
      big.push_back(kl);  // t -> some kid
      kl.positive = !kl.positive;
      defs.push_back({t, kl});  // kid -> t
    }
    defs.push_back(std::move(big));
  }
  return t;
}

}  // namespace

std::vector<NClause> cnf_biconditional(Sentence& s, const NLit& head,
                                       const FormulaPtr& f, long clause_budget,
                                       const std::string& aux_prefix) {
  NLit nhead = head;
  nhead.positive = !head.positive;

  long pos_est = cnf_size_estimate(f, false, clause_budget);
  long neg_est = cnf_size_estimate(f, true, clause_budget);
  std::vector<NClause> out;
  if (pos_est + neg_est <= clause_budget) {
    for (auto& c : cnf_distribute(f, false)) {
      c.insert(c.begin(), nhead);  // head -> f
      out.push_back(std::move(c));
    }
    for (auto& c : cnf_distribute(f, true)) {
      c.insert(c.begin(), head);  // f -> head
      out.push_back(std::move(c));
    }
    return out;
  }

  int counter = 0;
  NLit t = tseitin_rec(s, nnf(f, false), out, aux_prefix, counter);
  NLit nt = t;
  nt.positive = !t.positive;
  out.push_back({nhead, t});
  out.push_back({head, nt});
  return out;
}

bool eval_formula(
    const FormulaPtr& f,
    const std::vector<std::pair<std::string, int>>& binding,
    const std::function<bool(int, const std::vector<int>&)>& truth) {
  switch (f->kind) {
    case FKind::atom: {
      std::vector<int> args;
      for (const auto& t : f->args) {
        if (t.is_var) {
          int val = -1;
          for (const auto& [name, v] : binding)
            if (name == t.var) {
              val = v;
              break;
            }
          if (val < 0) throw ValidationError("unbound variable " + t.var);
          args.push_back(val);
        } else {
          args.push_back(t.constant);
        }
      }
      return truth(f->pred, args);
    }
    case FKind::neg:
      return !eval_formula(f->kids[0], binding, truth);
    case FKind::conj:
      for (const auto& k : f->kids)
        if (!eval_formula(k, binding, truth)) return false;
      return true;
    case FKind::disj:
      for (const auto& k : f->kids)
        if (eval_formula(k, binding, truth)) return true;
      return false;
    case FKind::implies:
      return !eval_formula(f->kids[0], binding, truth) ||
             eval_formula(f->kids[1], binding, truth);
    case FKind::iff:
      return eval_formula(f->kids[0], binding, truth) ==
             eval_formula(f->kids[1], binding, truth);
  }
  throw ValidationError("bad formula node");
}

}  // namespace wfomc
