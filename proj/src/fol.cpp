// Copyright (c) 2026 the approxwfomc authors
// Distributed under the MIT license (see LICENSE)

#include "wfomc/fol.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace wfomc {

int Sentence::add_predicate(Predicate p) {
  if (index_.count(p.name))
    throw ValidationError("duplicate predicate declaration '" + p.name + "'");
  if (p.arity < 0) throw ValidationError("negative arity for '" + p.name + "'");
  if (p.role == PredRole::skolem) {
    if (p.w != 1 || p.wbar != -1)
      throw ValidationError("skolem predicate '" + p.name +
                            "' must have weights (1, -1)");
  } else if (p.w < 0 || p.wbar < 0) {
    throw ValidationError("negative weight on non-skolem predicate '" +
                          p.name + "'");
  }
  int id = static_cast<int>(predicates.size());
  index_[p.name] = id;
  predicates.push_back(std::move(p));
  return id;
}

int Sentence::find_predicate(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? -1 : it->second;
}

std::vector<int> Sentence::weighted_predicates() const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(predicates.size()); ++i) {
    const auto& p = predicates[i];
    if (p.role == PredRole::skolem) continue;
    if (!p.neutral()) out.push_back(i);
  }
  return out;
}

void Sentence::add_ground_unit(const Literal& lit) {
  for (const auto& t : lit.args)
    if (t.is_var)
      throw ValidationError("ground unit clause must have constant arguments");
  Clause c;
  c.literals.push_back(lit);
  clauses.push_back(std::move(c));
}

void Sentence::validate() const {
  for (const auto& c : clauses) {
    for (const auto& l : c.literals) {
      if (l.pred < 0 || l.pred >= static_cast<int>(predicates.size()))
        throw ValidationError("clause references unknown predicate");
      const auto& p = predicates[l.pred];
      if (static_cast<int>(l.args.size()) != p.arity)
        throw ValidationError("arity mismatch for '" + p.name + "'");
      for (const auto& t : l.args) {
        if (t.is_var) {
          if (t.value < 0 || t.value >= c.num_vars())
            throw ValidationError("bad variable index in clause");
        } else if (t.value < 1) {
          throw ValidationError("domain constants start at 1");
        }
      }
    }
  }
}

namespace {

struct Cursor {
  const std::string& line;
  int line_no;
  size_t pos = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, line_no, static_cast<int>(pos) + 1);
  }
  void skip_ws() {
    while (pos < line.size() && std::isspace((unsigned char)line[pos])) ++pos;
  }
  bool done() {
    skip_ws();
    return pos >= line.size();
  }
  char peek() { return pos < line.size() ? line[pos] : '\0'; }
  bool eat(char c) {
    if (peek() == c) {
      ++pos;
      return true;
    }
    return false;
  }
  std::string ident() {
    skip_ws();
    size_t start = pos;
    while (pos < line.size() &&
           (std::isalnum((unsigned char)line[pos]) || line[pos] == '_'))
      ++pos;
    if (pos == start) fail("expected identifier");
    return line.substr(start, pos - start);
  }
  std::string number_token() {
    skip_ws();
    size_t start = pos;
    while (pos < line.size() && !std::isspace((unsigned char)line[pos]) &&
           line[pos] != ')' && line[pos] != ',')
      ++pos;
    if (pos == start) fail("expected number");
    return line.substr(start, pos - start);
  }
};

bool is_variable_name(const std::string& tok) {
  return !tok.empty() && std::isupper((unsigned char)tok[0]);
}

Literal parse_literal(Cursor& cur, const Sentence& s,
                      std::vector<std::string>& var_names) {
  cur.skip_ws();
  Literal lit;
  lit.positive = !cur.eat('!');
  std::string name = cur.ident();
  int pid = s.find_predicate(name);
  if (pid < 0) cur.fail("undeclared predicate '" + name + "'");
  lit.pred = pid;
  const Predicate& p = s.predicates[pid];
  if (cur.eat('(')) {
    if (!cur.eat(')')) {
      while (true) {
        cur.skip_ws();
        if (std::isdigit((unsigned char)cur.peek())) {
          std::string num = cur.number_token();
          long c = std::atol(num.c_str());
          if (c < 1) cur.fail("domain constants start at 1");
          lit.args.push_back(Term::constant(static_cast<int>(c)));
        } else {
          std::string tok = cur.ident();
          if (!is_variable_name(tok))
            cur.fail("variables must start with an uppercase letter: '" +
                     tok + "'");
          auto it = std::find(var_names.begin(), var_names.end(), tok);
          int idx;
          if (it == var_names.end()) {
            idx = static_cast<int>(var_names.size());
            var_names.push_back(tok);
          } else {
            idx = static_cast<int>(it - var_names.begin());
          }
          lit.args.push_back(Term::var(idx));
        }
        cur.skip_ws();
        if (cur.eat(',')) continue;
        if (cur.eat(')')) break;
        cur.fail("expected ',' or ')' in argument list");
      }
    }
  }
  if (static_cast<int>(lit.args.size()) != p.arity)
    cur.fail("predicate '" + name + "' has arity " + std::to_string(p.arity) +
             ", got " + std::to_string(lit.args.size()) + " arguments");
  return lit;
}

}  // namespace

ParsedModel parse_model(std::istream& in) {
  ParsedModel out;
  Sentence& s = out.sentence;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    Cursor cur{line, line_no};
    if (cur.done() || cur.peek() == '#') continue;
    std::string head = cur.ident();
    if (head == "domain") {
      std::string num = cur.number_token();
      long d = std::atol(num.c_str());
      if (d < 1) cur.fail("domain size must be >= 1");
      out.domain_size = static_cast<int>(d);
    } else if (head == "predicate") {
      Predicate p;
      p.name = cur.ident();
      if (!cur.eat('/')) cur.fail("expected '/' after predicate name");
      std::string ar = cur.number_token();
      p.arity = std::atoi(ar.c_str());
      while (!cur.done()) {
        std::string key = cur.ident();
        if (!cur.eat('=')) cur.fail("expected '=' after '" + key + "'");
        std::string val = cur.number_token();
        try {
          if (key == "w")
            p.w = parse_rational(val);
          else if (key == "wbar")
            p.wbar = parse_rational(val);
          else if (key == "role") {
            if (val == "skolem")
              p.role = PredRole::skolem;
            else if (val == "aux")
              p.role = PredRole::auxiliary;
            else if (val == "ordinary")
              p.role = PredRole::ordinary;
            else
              cur.fail("unknown role '" + val + "'");
          } else {
            cur.fail("unknown attribute '" + key + "'");
          }
        } catch (const BadNumber& e) {
          cur.fail(e.what());
        }
      }
      try {
        s.add_predicate(std::move(p));
      } catch (const ValidationError& e) {
        cur.fail(e.what());
      }
    } else if (head == "clause") {
      Clause c;
      while (!cur.done()) c.literals.push_back(parse_literal(cur, s, c.var_names));
      if (c.literals.empty()) cur.fail("empty clause");
      s.add_clause(std::move(c));
    } else {
      cur.fail("unknown directive '" + head + "'");
    }
  }
  s.validate();
  return out;
}

ParsedModel parse_model_string(const std::string& text) {
  std::istringstream in(text);
  return parse_model(in);
}

ParsedModel parse_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open input file '" + path + "'");
  return parse_model(in);
}

Int ground_count(const Predicate& p, int domain_size) {
  return ipow(domain_size, p.arity);
}

GroundProblem ground(const Sentence& s, int domain_size,
                     long max_ground_clauses) {
  if (domain_size < 1) throw ValidationError("domain size must be >= 1");
  s.validate();

  GroundProblem gp;
  gp.domain_size = domain_size;
  gp.pred_offset.resize(s.predicates.size() + 1, 0);
  long offset = 0;
  for (size_t i = 0; i < s.predicates.size(); ++i) {
    gp.pred_offset[i] = static_cast<int>(offset);
    Int cnt = ground_count(s.predicates[i], domain_size);
    if (!cnt.fits_slong_p() || offset + cnt.get_si() > 1000000000)
      throw ResourceLimit("ground atom table too large");
    offset += cnt.get_si();
  }
  gp.pred_offset[s.predicates.size()] = static_cast<int>(offset);
  gp.num_vars = static_cast<int>(offset);

  for (size_t i = 0; i < s.predicates.size(); ++i) {
    if (s.predicates[i].role != PredRole::ordinary) continue;
    for (int v = gp.pred_offset[i]; v < gp.pred_offset[i + 1]; ++v)
      gp.sampling_set.push_back(v + 1);
  }

  std::set<std::vector<int>> seen;
  long generated = 0;
  for (const auto& c : s.clauses) {
    for (const auto& l : c.literals)
      for (const auto& t : l.args)
        if (!t.is_var && t.value > domain_size)
          throw ValidationError("constant " + std::to_string(t.value) +
                                " outside domain 1.." +
                                std::to_string(domain_size));

    const int k = c.num_vars();
    std::vector<int> assign(k, 1);
    while (true) {
      if (++generated > max_ground_clauses)
        throw ResourceLimit("ground clause cap exceeded (" +
                            std::to_string(max_ground_clauses) + ")");
      std::vector<int> lits;
      bool tautology = false;
      for (const auto& l : c.literals) {
        long tuple = 0;
        for (const auto& t : l.args) {
          int val = t.is_var ? assign[t.value] : t.value;
          tuple = tuple * domain_size + (val - 1);
        }
        int var = gp.atom_var(l.pred, tuple);
        lits.push_back(l.positive ? var : -var);
      }
      std::sort(lits.begin(), lits.end(),
                [](int a, int b) { return std::abs(a) != std::abs(b)
                                       ? std::abs(a) < std::abs(b)
                                       : a < b; });
      lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
      for (size_t j = 0; j + 1 < lits.size(); ++j)
        if (lits[j] == -lits[j + 1]) {
          tautology = true;
          break;
        }
      if (!tautology && seen.insert(lits).second)
        gp.clauses.push_back(std::move(lits));

      // next assignment, row-major (last variable fastest)
      int pos = k - 1;
      while (pos >= 0 && assign[pos] == domain_size) {
        assign[pos] = 1;
        --pos;
      }
      if (pos < 0) break;
      ++assign[pos];
    }
  }
  return gp;
}

std::string to_native_format(const Sentence& s,
                             std::optional<int> domain_size) {
  std::ostringstream out;
  if (domain_size) out << "domain " << *domain_size << "\n";
  for (const auto& p : s.predicates) {
    out << "predicate " << p.name << "/" << p.arity;
    if (p.w != 1 || p.wbar != 1)
      out << " w=" << to_exact_string(p.w) << " wbar=" << to_exact_string(p.wbar);
    if (p.role == PredRole::auxiliary) out << " role=aux";
    if (p.role == PredRole::skolem) out << " role=skolem";
    out << "\n";
  }
  for (const auto& c : s.clauses) {
    out << "clause";
    for (const auto& l : c.literals) {
      out << " " << (l.positive ? "" : "!") << s.predicates[l.pred].name;
      out << "(";
      for (size_t i = 0; i < l.args.size(); ++i) {
        if (i) out << ",";
        if (l.args[i].is_var)
          out << c.var_names[l.args[i].value];
        else
          out << l.args[i].value;
      }
      out << ")";
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace wfomc
