// Copyright (c) 2026 the approxwfomc authors
// Distributed under the MIT license (see LICENSE)
//
// Shared test helpers: independent brute-force oracles and input generators.
// Everything here enumerates; nothing reuses the library's counting or
// search paths.

#pragma once

#include <algorithm>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "wfomc/encoders.hpp"
#include "wfomc/fol.hpp"
#include "wfomc/formula.hpp"
#include "wfomc/rational.hpp"

namespace wfomc::test {

inline const char* kCoinText =
    "domain 6\n"
    "predicate Heads/1 w=0.5 wbar=1\n"
    "predicate Tails/1 w=0.1 wbar=1\n"
    "clause Heads(X) Tails(X)\n"
    "clause !Heads(X) !Tails(X)\n";

inline Sentence coin_sentence() { return parse_model_string(kCoinText).sentence; }

// Distinct projections onto `sampling` of the models of `clauses`, by full
// enumeration over all 2^num_vars assignments. num_vars <= ~20.
inline Int brute_projected_count(int num_vars,
                                 const std::vector<std::vector<int>>& clauses,
                                 const std::vector<int>& sampling) {
  std::set<std::vector<bool>> projections;
  for (unsigned long long m = 0; m < (1ULL << num_vars); ++m) {
    bool ok = true;
    for (const auto& cl : clauses) {
      bool sat = false;
      for (int lit : cl) {
        bool val = (m >> (std::abs(lit) - 1)) & 1;
        if ((lit > 0) == val) {
          sat = true;
          break;
        }
      }
      if (!sat) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    std::vector<bool> proj;
    for (int v : sampling) proj.push_back((m >> (v - 1)) & 1);
    projections.insert(std::move(proj));
  }
  return Int(static_cast<long>(projections.size()));
}

// Number of full models extending a fixed partial assignment (enumeration).
inline long brute_extension_count(int num_vars,
                                  const std::vector<std::vector<int>>& clauses,
                                  const std::vector<int>& fixed_lits) {
  long count = 0;
  for (unsigned long long m = 0; m < (1ULL << num_vars); ++m) {
    bool ok = true;
    for (int lit : fixed_lits) {
      bool val = (m >> (std::abs(lit) - 1)) & 1;
      if ((lit > 0) != val) {
        ok = false;
        break;
      }
    }
    for (const auto& cl : clauses) {
      if (!ok) break;
      bool sat = false;
      for (int lit : cl) {
        bool val = (m >> (std::abs(lit) - 1)) & 1;
        if ((lit > 0) == val) {
          sat = true;
          break;
        }
      }
      if (!sat) ok = false;
    }
    if (ok) ++count;
  }
  return count;
}

// Random CNF over num_vars variables.
inline std::vector<std::vector<int>> random_cnf(std::mt19937& rng, int num_vars,
                                                int num_clauses,
                                                int max_len = 3) {
  std::uniform_int_distribution<int> var(1, num_vars);
  std::uniform_int_distribution<int> len(1, max_len);
  std::uniform_int_distribution<int> sign(0, 1);
  std::vector<std::vector<int>> clauses;
  for (int c = 0; c < num_clauses; ++c) {
    std::vector<int> cl;
    int k = len(rng);
    for (int i = 0; i < k; ++i) cl.push_back(var(rng) * (sign(rng) ? 1 : -1));
    std::sort(cl.begin(), cl.end());
    cl.erase(std::unique(cl.begin(), cl.end()), cl.end());
    clauses.push_back(std::move(cl));
  }
  return clauses;
}

inline Rat random_positive_rat(std::mt19937& rng, int max_num = 6,
                               int max_den = 6) {
  std::uniform_int_distribution<int> num(1, max_num), den(1, max_den);
  Rat q(num(rng), den(rng));
  q.canonicalize();
  return q;
}

// Random sentence: <= 2 weighted predicates of arity <= 2, a couple of
// clauses over variables X, Y. Ground atom total stays <= max_atoms.
inline Sentence random_sentence(std::mt19937& rng, int domain_size,
                                int max_atoms = 18,
                                bool positive_weights = true) {
  Sentence s;
  std::uniform_int_distribution<int> arity_dist(0, 2);
  std::uniform_int_distribution<int> coin(0, 1);
  int atoms = 0;
  int num_preds = 1 + coin(rng) + coin(rng);
  for (int i = 0; i < num_preds; ++i) {
    Predicate p;
    p.name = std::string(1, static_cast<char>('p' + i));
    for (int tries = 0; tries < 4; ++tries) {
      p.arity = arity_dist(rng);
      Int cnt = ipow(domain_size, p.arity);
      if (atoms + cnt.get_si() <= max_atoms) break;
      p.arity = 0;
    }
    atoms += static_cast<int>(ipow(domain_size, p.arity).get_si());
    if (i < 2) {
      p.w = random_positive_rat(rng);
      p.wbar = random_positive_rat(rng);
      if (!positive_weights && coin(rng)) p.w = 0;
      if (p.w == 1 && p.wbar == 1) p.w = Rat(1, 2);
    }
    s.add_predicate(std::move(p));
  }
  std::uniform_int_distribution<int> nclauses(1, 3), nlits(1, 3);
  std::uniform_int_distribution<int> pred_dist(0, num_preds - 1);
  for (int c = nclauses(rng); c > 0; --c) {
    Clause cl;
    cl.var_names = {"X", "Y"};
    for (int l = nlits(rng); l > 0; --l) {
      Literal lit;
      lit.pred = pred_dist(rng);
      lit.positive = coin(rng);
      for (int a = 0; a < s.pred(lit.pred).arity; ++a) {
        if (coin(rng))
          lit.args.push_back(Term::var(coin(rng)));
        else
          lit.args.push_back(
              Term::constant(1 + (rng() % static_cast<unsigned>(domain_size))));
      }
      cl.literals.push_back(std::move(lit));
    }
    s.add_clause(std::move(cl));
  }
  s.validate();
  return s;
}

// Direct MLN semantics: sum over all worlds of the original ground atoms of
// prod_i r_i^{n_i(world)}, where n_i counts true groundings of rule i and
// r_i is the rule's (direct rational) weight.
inline Rat mln_partition_enumeration(const MlnProgram& mln, int domain_size) {
  const Sentence& reg = mln.skeleton;
  GroundProblem gp = ground(reg, domain_size);
  const int n = gp.num_vars;
  Rat total = 0;
  for (unsigned long long world = 0; world < (1ULL << n); ++world) {
    auto truth = [&](int pred, const std::vector<int>& args) {
      long tuple = 0;
      for (int a : args) tuple = tuple * domain_size + (a - 1);
      int var = gp.atom_var(pred, tuple);
      return static_cast<bool>((world >> (var - 1)) & 1);
    };
    Rat w = 1;
    for (const auto& rule : mln.rules) {
      auto vars = free_vars(rule.formula);
      long trues = 0;
      std::vector<std::pair<std::string, int>> binding;
      for (const auto& v : vars) binding.push_back({v, 1});
      while (true) {
        if (eval_formula(rule.formula, binding, truth)) ++trues;
        size_t pos = binding.size();
        while (pos > 0 && binding[pos - 1].second == domain_size) {
          binding[pos - 1].second = 1;
          --pos;
        }
        if (pos == 0) break;
        ++binding[pos - 1].second;
      }
      w *= qpow(*rule.direct_weight, Int(trues));
    }
    total += w;
  }
  return total;
}

// Signed WFOMC of a QSentence by enumeration over the ground atoms of its
// registered predicates, expanding existential blocks over the domain.
inline Rat qsentence_signed_wfomc(const QSentence& qs, int domain_size) {
  const Sentence& reg = qs.base;
  GroundProblem gp = ground(reg, domain_size);
  const int n = gp.num_vars;
  Rat total = 0;
  for (unsigned long long world = 0; world < (1ULL << n); ++world) {
    auto atom_true = [&](const NLit& lit,
                         const std::vector<std::pair<std::string, int>>& env) {
      long tuple = 0;
      for (const auto& t : lit.args) {
        int val;
        if (t.is_var) {
          val = -1;
          for (const auto& [name, v] : env)
            if (name == t.var) val = v;
        } else {
          val = t.constant;
        }
        tuple = tuple * domain_size + (val - 1);
      }
      bool b = (world >> (gp.atom_var(lit.pred, tuple) - 1)) & 1;
      return lit.positive == b;
    };

    bool sat = true;
    for (const auto& pc : qs.clauses) {
      // universal variables of the pseudo-clause
      std::vector<std::string> uvars;
      auto add_uvar = [&](const FTerm& t) {
        if (t.is_var &&
            std::find(uvars.begin(), uvars.end(), t.var) == uvars.end())
          uvars.push_back(t.var);
      };
      for (const auto& l : pc.literals)
        for (const auto& t : l.args) add_uvar(t);
      for (const auto& b : pc.blocks)
        for (const auto& l : b.body)
          for (const auto& t : l.args)
            if (!t.is_var ||
                std::find(b.vars.begin(), b.vars.end(), t.var) == b.vars.end())
              add_uvar(t);

      std::vector<std::pair<std::string, int>> env;
      for (const auto& v : uvars) env.push_back({v, 1});
      bool clause_ok = true;
      while (clause_ok) {
        bool holds = false;
        for (const auto& l : pc.literals)
          if (atom_true(l, env)) holds = true;
        for (const auto& b : pc.blocks) {
          if (holds) break;
          // exists: iterate bound variables
          std::vector<std::pair<std::string, int>> benv = env;
          size_t base = benv.size();
          for (const auto& v : b.vars) benv.push_back({v, 1});
          while (true) {
            bool all = true;
            for (const auto& l : b.body)
              if (!atom_true(l, benv)) all = false;
            if (all) {
              holds = true;
              break;
            }
            size_t pos = benv.size();
            while (pos > base && benv[pos - 1].second == domain_size) {
              benv[pos - 1].second = 1;
              --pos;
            }
            if (pos == base) break;
            ++benv[pos - 1].second;
          }
        }
        if (!holds) {
          clause_ok = false;
          break;
        }
        size_t pos = env.size();
        while (pos > 0 && env[pos - 1].second == domain_size) {
          env[pos - 1].second = 1;
          --pos;
        }
        if (pos == 0) break;
        ++env[pos - 1].second;
      }
      if (!clause_ok) {
        sat = false;
        break;
      }
    }
    if (!sat) continue;

    Rat w = 1;
    for (size_t p = 0; p < reg.predicates.size(); ++p)
      for (int v = gp.pred_offset[p]; v < gp.pred_offset[p + 1]; ++v)
        w *= ((world >> v) & 1) ? reg.predicates[p].w : reg.predicates[p].wbar;
    total += w;
  }
  return total;
}

// ProbLog ground-truth: enumerate total choices of the fact atoms, compute
// the least model, sum the probabilities of the worlds satisfying `query`.
inline Rat problog_query_enumeration(const ProblogProgram& prog,
                                     const std::string& query,
                                     int domain_size) {
  const Sentence& reg = prog.skeleton;
  GroundProblem gp = ground(reg, domain_size);
  std::set<int> fact_pred_set;
  for (const auto& f : prog.facts) fact_pred_set.insert(f.pred);
  std::vector<int> fact_vars;
  for (size_t p = 0; p < reg.predicates.size(); ++p)
    if (fact_pred_set.count(static_cast<int>(p)))
      for (int v = gp.pred_offset[p]; v < gp.pred_offset[p + 1]; ++v)
        fact_vars.push_back(v + 1);

  QueryAtom q = parse_query(reg, query);
  long qtuple = 0;
  for (int c : q.constants) qtuple = qtuple * domain_size + (c - 1);
  int qvar = gp.atom_var(q.pred, qtuple);

  Rat total = 0;
  for (unsigned long long choice = 0; choice < (1ULL << fact_vars.size());
       ++choice) {
    std::vector<bool> truth(gp.num_vars + 1, false);
    for (size_t i = 0; i < fact_vars.size(); ++i)
      truth[fact_vars[i]] = (choice >> i) & 1;

    // least model: iterate rules to fixpoint over all groundings
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& rule : prog.rules) {
        std::vector<std::string> vars;
        auto add_var = [&](const FTerm& t) {
          if (t.is_var &&
              std::find(vars.begin(), vars.end(), t.var) == vars.end())
            vars.push_back(t.var);
        };
        for (const auto& b : rule.body)
          for (const auto& t : b.args) add_var(t);
        std::vector<std::pair<std::string, int>> env;
        for (const auto& v : vars) env.push_back({v, 1});
        while (true) {
          bool body_true = true;
          for (const auto& b : rule.body) {
            long tuple = 0;
            for (const auto& t : b.args) {
              int val = t.constant;
              if (t.is_var)
                for (const auto& [name, vv] : env)
                  if (name == t.var) val = vv;
              tuple = tuple * domain_size + (val - 1);
            }
            if (!truth[gp.atom_var(b.pred, tuple)]) body_true = false;
          }
          if (body_true) {
            long tuple = 0;
            for (const auto& hv : rule.head_vars) {
              int val = 1;
              for (const auto& [name, vv] : env)
                if (name == hv) val = vv;
              tuple = tuple * domain_size + (val - 1);
            }
            int hvar = gp.atom_var(rule.head_pred, tuple);
            if (!truth[hvar]) {
              truth[hvar] = true;
              changed = true;
            }
          }
          size_t pos = env.size();
          while (pos > 0 && env[pos - 1].second == domain_size) {
            env[pos - 1].second = 1;
            --pos;
          }
          if (pos == 0) break;
          ++env[pos - 1].second;
        }
      }
    }
    if (!truth[qvar]) continue;

    Rat w = 1;
    for (size_t p = 0; p < reg.predicates.size(); ++p) {
      if (!fact_pred_set.count(static_cast<int>(p))) continue;
      for (int v = gp.pred_offset[p]; v < gp.pred_offset[p + 1]; ++v)
        w *= truth[v + 1] ? reg.predicates[p].w : reg.predicates[p].wbar;
    }
    total += w;
  }
  return total;
}

}  // namespace wfomc::test
