// Copyright (c) 2026 the approxwfomc authors
// Distributed under the MIT license (see LICENSE)

#include "wfomc/encoders.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace wfomc {

// ---------------------------------------------------------------- MLN ----

namespace {

struct MlnToken {
  enum Kind { ident, number, lparen, rparen, comma, bang, and_op, or_op,
              implies_op, iff_op, end } kind;
  std::string text;
};

std::vector<MlnToken> mln_tokenize(const std::string& line, int line_no) {
  std::vector<MlnToken> out;
  size_t i = 0;
  auto fail = [&](const std::string& m) {
    throw ParseError(m, line_no, static_cast<int>(i) + 1);
  };
  while (i < line.size()) {
    char c = line[i];
    if (std::isspace((unsigned char)c)) {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < line.size() && line[i + 1] == '/') break;
    if (c == '(') { out.push_back({MlnToken::lparen, "("}); ++i; continue; }
    if (c == ')') { out.push_back({MlnToken::rparen, ")"}); ++i; continue; }
    if (c == ',') { out.push_back({MlnToken::comma, ","}); ++i; continue; }
    if (c == '!') { out.push_back({MlnToken::bang, "!"}); ++i; continue; }
    if (c == '^' || c == '&') { out.push_back({MlnToken::and_op, "^"}); ++i; continue; }
    if (c == '|') { out.push_back({MlnToken::or_op, "v"}); ++i; continue; }
    if (c == '<' && line.compare(i, 3, "<=>") == 0) {
      out.push_back({MlnToken::iff_op, "<=>"});
      i += 3;
      continue;
    }
    if (c == '=' && line.compare(i, 2, "=>") == 0) {
      out.push_back({MlnToken::implies_op, "=>"});
      i += 2;
      continue;
    }
    if (std::isalpha((unsigned char)c) || c == '_') {
      size_t start = i;
      while (i < line.size() &&
             (std::isalnum((unsigned char)line[i]) || line[i] == '_'))
        ++i;
      std::string word = line.substr(start, i - start);
      if (word == "v")
        out.push_back({MlnToken::or_op, "v"});
      else
        out.push_back({MlnToken::ident, word});
      continue;
    }
    if (std::isdigit((unsigned char)c) || c == '-' || c == '+' || c == '.') {
      size_t start = i;
      ++i;
      while (i < line.size() &&
             (std::isalnum((unsigned char)line[i]) || line[i] == '.' ||
              line[i] == '-' || line[i] == '+' || line[i] == '/'))
        ++i;
      out.push_back({MlnToken::number, line.substr(start, i - start)});
      continue;
    }
    fail(std::string("unexpected character '") + c + "'");
  }
  out.push_back({MlnToken::end, ""});
  return out;
}

struct MlnParser {
  const std::vector<MlnToken>& toks;
  size_t pos = 0;
  const Sentence& s;
  int line_no;

  [[noreturn]] void fail(const std::string& m) const {
    throw ParseError(m, line_no, 0);
  }
  const MlnToken& peek() const { return toks[pos]; }
  MlnToken take() { return toks[pos++]; }
  bool eat(MlnToken::Kind k) {
    if (peek().kind == k) {
      ++pos;
      return true;
    }
    return false;
  }

  FormulaPtr atom() {
    if (eat(MlnToken::bang)) return Formula::neg(atom());
    if (eat(MlnToken::lparen)) {
      FormulaPtr f = iff();
      if (!eat(MlnToken::rparen)) fail("expected ')'");
      return f;
    }
    if (peek().kind != MlnToken::ident) fail("expected atom");
    std::string name = take().text;
    int pid = s.find_predicate(name);
    if (pid < 0) fail("undeclared predicate '" + name + "'");
    std::vector<FTerm> args;
    if (eat(MlnToken::lparen)) {
      if (!eat(MlnToken::rparen)) {
        while (true) {
          if (peek().kind != MlnToken::ident)
            fail("MLN formulas take variables as arguments");
          args.push_back(FTerm::v(take().text));
          if (eat(MlnToken::comma)) continue;
          if (eat(MlnToken::rparen)) break;
          fail("expected ',' or ')'");
        }
      }
    }
    if (static_cast<int>(args.size()) != s.pred(pid).arity)
      fail("arity mismatch for '" + name + "'");
    return Formula::atom(pid, std::move(args));
  }
  FormulaPtr conj() {
    std::vector<FormulaPtr> kids{atom()};
    while (eat(MlnToken::and_op)) kids.push_back(atom());
    return kids.size() == 1 ? kids[0] : Formula::conj(std::move(kids));
  }
  FormulaPtr disj() {
    std::vector<FormulaPtr> kids{conj()};
    while (eat(MlnToken::or_op)) kids.push_back(conj());
    return kids.size() == 1 ? kids[0] : Formula::disj(std::move(kids));
  }
  FormulaPtr implies() {
    FormulaPtr lhs = disj();
    if (eat(MlnToken::implies_op)) return Formula::implies(lhs, implies());
    return lhs;
  }
  FormulaPtr iff() {
    FormulaPtr lhs = implies();
    while (eat(MlnToken::iff_op)) lhs = Formula::iff(lhs, implies());
    return lhs;
  }
};

}  // namespace

MlnProgram parse_mln(std::istream& in, bool direct_weights) {
  MlnProgram prog;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto toks = mln_tokenize(line, line_no);
    if (toks[0].kind == MlnToken::end) continue;
    if (toks[0].kind == MlnToken::ident) {
      // declaration: Name(type, ...)
      Predicate p;
      p.name = toks[0].text;
      size_t i = 1;
      int arity = 0;
      if (toks[i].kind == MlnToken::lparen) {
        ++i;
        if (toks[i].kind != MlnToken::rparen) {
          while (true) {
            if (toks[i].kind != MlnToken::ident)
              throw ParseError("expected type name in declaration", line_no, 0);
            ++arity;
            ++i;
            if (toks[i].kind == MlnToken::comma) {
              ++i;
              continue;
            }
            break;
          }
        }
        if (toks[i].kind != MlnToken::rparen)
          throw ParseError("expected ')' in declaration", line_no, 0);
        ++i;
      }
      if (toks[i].kind != MlnToken::end)
        throw ParseError("trailing tokens after declaration", line_no, 0);
      p.arity = arity;
      try {
        prog.skeleton.add_predicate(std::move(p));
      } catch (const ValidationError& e) {
        throw ParseError(e.what(), line_no, 0);
      }
      continue;
    }
    if (toks[0].kind == MlnToken::number) {
      MlnRule rule;
      if (direct_weights) {
        try {
          rule.direct_weight = parse_rational(toks[0].text);
        } catch (const BadNumber& e) {
          throw ParseError(e.what(), line_no, 0);
        }
        if (*rule.direct_weight < 0)
          throw ParseError("direct rule weights must be >= 0", line_no, 0);
      } else {
        rule.log_weight = toks[0].text;
      }
      MlnParser parser{toks, 1, prog.skeleton, line_no};
      rule.formula = parser.iff();
      if (parser.peek().kind != MlnToken::end)
        throw ParseError("trailing tokens after formula", line_no, 0);
      prog.rules.push_back(std::move(rule));
      continue;
    }
    throw ParseError("expected declaration or weighted formula", line_no, 0);
  }
  return prog;
}

MlnProgram parse_mln_file(const std::string& path, bool direct_weights) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open input file '" + path + "'");
  return parse_mln(in, direct_weights);
}

EncodeResult encode_mln(const MlnProgram& mln, const EncodeOptions& opts) {
  EncodeResult result;
  Sentence& s = result.sentence;
  for (const auto& p : mln.skeleton.predicates) s.add_predicate(p);

  for (size_t i = 0; i < mln.rules.size(); ++i) {
    const MlnRule& rule = mln.rules[i];
    Predicate aux;
    aux.name = "P" + std::to_string(i + 1);
    while (s.find_predicate(aux.name) >= 0) aux.name += "_";
    auto vars = free_vars(rule.formula);
    aux.arity = static_cast<int>(vars.size());
    aux.role = PredRole::auxiliary;
    if (rule.direct_weight) {
      aux.w = *rule.direct_weight;
    } else {
      aux.w = exp_rational(rule.log_weight, opts.exp_digits);
      result.notes.push_back("w(" + aux.name + ") = exp(" + rule.log_weight +
                             ") ~ " + to_decimal_string(aux.w) + " (" +
                             std::to_string(opts.exp_digits) +
                             " significant digits)");
    }
    aux.wbar = 1;
    int pid = s.add_predicate(std::move(aux));

    NLit head{pid, true, {}};
    for (const auto& v : vars) head.args.push_back(FTerm::v(v));
    for (const auto& nc : cnf_biconditional(s, head, rule.formula,
                                            opts.tseitin_budget, "T"))
      s.add_clause(to_clause(nc));
  }
  s.validate();
  return result;
}

// ------------------------------------------------------------ ProbLog ----

namespace {

struct PlAtom {
  std::string pred;
  std::vector<FTerm> args;
};

struct PlParser {
  const std::string& text;
  size_t pos = 0;
  int line_no;

  [[noreturn]] void fail(const std::string& m) const {
    throw ParseError(m, line_no, static_cast<int>(pos) + 1);
  }
  void skip_ws() {
    while (pos < text.size() && std::isspace((unsigned char)text[pos])) ++pos;
  }
  bool eat(const std::string& tok) {
    skip_ws();
    if (text.compare(pos, tok.size(), tok) == 0) {
      pos += tok.size();
      return true;
    }
    return false;
  }
  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }
  std::string ident() {
    skip_ws();
    size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum((unsigned char)text[pos]) || text[pos] == '_'))
      ++pos;
    if (pos == start) fail("expected identifier");
    return text.substr(start, pos - start);
  }
  PlAtom atom() {
    PlAtom a;
    a.pred = ident();
    if (eat("(")) {
      if (!eat(")")) {
        while (true) {
          skip_ws();
          if (std::isdigit((unsigned char)peek())) {
            size_t start = pos;
            while (pos < text.size() && std::isdigit((unsigned char)text[pos]))
              ++pos;
            a.args.push_back(
                FTerm::c(std::atoi(text.substr(start, pos - start).c_str())));
          } else {
            std::string t = ident();
            if (!std::isupper((unsigned char)t[0]))
              fail("variables must start uppercase; use integers for "
                   "constants: '" + t + "'");
            a.args.push_back(FTerm::v(t));
          }
          if (eat(",")) continue;
          if (eat(")")) break;
          fail("expected ',' or ')'");
        }
      }
    }
    return a;
  }
};

int ensure_pred(Sentence& s, const std::string& name, int arity, int line_no) {
  int pid = s.find_predicate(name);
  if (pid < 0) {
    Predicate p;
    p.name = name;
    p.arity = arity;
    return s.add_predicate(std::move(p));
  }
  if (s.pred(pid).arity != arity)
    throw ParseError("arity mismatch for '" + name + "'", line_no, 0);
  return pid;
}

}  // namespace

ProblogProgram parse_problog(std::istream& in) {
  ProblogProgram prog;
  std::string line;
  int line_no = 0;
  std::set<int> fact_preds;
  while (std::getline(in, line)) {
    ++line_no;
    auto cmt = line.find('%');
    if (cmt != std::string::npos) line = line.substr(0, cmt);
    bool blank = true;
    for (char c : line)
      if (!std::isspace((unsigned char)c)) blank = false;
    if (blank) continue;

    PlParser p{line, 0, line_no};
    p.skip_ws();
    if (std::isdigit((unsigned char)p.peek()) || p.peek() == '.') {
      // probabilistic fact: p :: atom.
      size_t start = p.pos;
      while (p.pos < line.size() && !std::isspace((unsigned char)line[p.pos]) &&
             line.compare(p.pos, 2, "::") != 0)
        ++p.pos;
      Rat prob;
      try {
        prob = parse_rational(line.substr(start, p.pos - start));
      } catch (const BadNumber& e) {
        p.fail(e.what());
      }
      if (prob < 0 || prob > 1) p.fail("fact probability must be in [0,1]");
      if (!p.eat("::")) p.fail("expected '::' after probability");
      PlAtom a = p.atom();
      if (!p.eat(".")) p.fail("expected '.' at end of fact");
      // schema: all-distinct variable arguments (symmetric weights)
      std::set<std::string> seen;
      for (const auto& t : a.args)
        if (!t.is_var || !seen.insert(t.var).second)
          p.fail("probabilistic facts must use distinct variable arguments");
      int pid = ensure_pred(prog.skeleton, a.pred,
                            static_cast<int>(a.args.size()), line_no);
      if (fact_preds.count(pid))
        p.fail("duplicate probabilistic fact for '" + a.pred + "'");
      fact_preds.insert(pid);
      prog.facts.push_back({prob, pid});
      continue;
    }

    // rule: head :- body.   (a bare "head." is not part of the fragment)
    PlAtom head = p.atom();
    if (!p.eat(":-")) p.fail("expected ':-' after rule head");
    ProblogRule rule;
    std::set<std::string> head_seen;
    for (const auto& t : head.args) {
      if (!t.is_var || !head_seen.insert(t.var).second)
        p.fail("rule heads must use pairwise-distinct variable arguments");
      rule.head_vars.push_back(t.var);
    }
    rule.head_pred = ensure_pred(prog.skeleton, head.pred,
                                 static_cast<int>(head.args.size()), line_no);
    while (true) {
      if (p.eat("\\+")) p.fail("negation in rule bodies is not supported");
      PlAtom b = p.atom();
      int pid = ensure_pred(prog.skeleton, b.pred,
                            static_cast<int>(b.args.size()), line_no);
      rule.body.push_back({pid, true, b.args});
      if (p.eat(",")) continue;
      if (p.eat(".")) break;
      p.fail("expected ',' or '.' in rule body");
    }
    prog.rules.push_back(std::move(rule));
  }

  // attach weights to fact predicates
  for (const auto& f : prog.facts) {
    prog.skeleton.predicates[f.pred].w = f.p;
    prog.skeleton.predicates[f.pred].wbar = Rat(1) - f.p;
  }
  return prog;
}

ProblogProgram parse_problog_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open input file '" + path + "'");
  return parse_problog(in);
}

// ------------------------------------------------- Skolemization ----

namespace {

std::vector<std::string> block_universals(const ExistsBlock& b) {
  std::vector<std::string> out;
  for (const auto& lit : b.body)
    for (const auto& t : lit.args) {
      if (!t.is_var) continue;
      if (std::find(b.vars.begin(), b.vars.end(), t.var) != b.vars.end())
        continue;
      if (std::find(out.begin(), out.end(), t.var) == out.end())
        out.push_back(t.var);
    }
  return out;
}

std::string fresh_name(const Sentence& s, const std::string& base) {
  std::string name = base;
  while (s.find_predicate(name) >= 0) name += "_";
  return name;
}

}  // namespace

Sentence skolemize(const QSentence& qs) {
  Sentence out;
  for (const auto& p : qs.base.predicates) out.add_predicate(p);

  int counter = 0;
  for (const auto& pc : qs.clauses) {
    NClause main = pc.literals;
    for (const auto& block : pc.blocks) {
      if (block.body.empty())
        throw ValidationError("empty existential block");
      if (block.vars.empty() && block.body.size() == 1) {
        main.push_back(block.body[0]);
        continue;
      }
      ++counter;
      auto uvars = block_universals(block);
      std::vector<FTerm> zargs;
      for (const auto& v : uvars) zargs.push_back(FTerm::v(v));

      Predicate zp;
      zp.name = fresh_name(out, "Ex" + std::to_string(counter));
      zp.arity = static_cast<int>(uvars.size());
      zp.role = PredRole::auxiliary;
      int zid = out.add_predicate(std::move(zp));
      NLit z{zid, true, zargs};
      NLit nz = z;
      nz.positive = false;
      main.push_back(z);

      // witnessed -> Z
      NClause to_z;
      for (auto b : block.body) {
        b.positive = !b.positive;
        to_z.push_back(b);
      }
      to_z.push_back(z);
      out.add_clause(to_clause(to_z));

      if (block.vars.empty()) {
        // no bound variables: make Z a plain biconditional definition
        for (const auto& b : block.body)
          out.add_clause(to_clause({nz, b}));
      } else {
        Predicate sp;
        sp.name = fresh_name(out, "Sk" + std::to_string(counter));
        sp.arity = static_cast<int>(uvars.size());
        sp.role = PredRole::skolem;
        sp.w = 1;
        sp.wbar = -1;
        int sid = out.add_predicate(std::move(sp));
        NLit sk{sid, true, zargs};
        out.add_clause(to_clause({z, sk}));
        NClause to_s;
        for (auto b : block.body) {
          b.positive = !b.positive;
          to_s.push_back(b);
        }
        to_s.push_back(sk);
        out.add_clause(to_clause(to_s));
      }
    }
    out.add_clause(to_clause(main));
  }
  out.validate();
  return out;
}

EncodeResult encode_problog(const ProblogProgram& prog) {
  const Sentence& reg = prog.skeleton;
  std::set<int> fact_preds, head_preds;
  for (const auto& f : prog.facts) fact_preds.insert(f.pred);
  for (const auto& r : prog.rules) head_preds.insert(r.head_pred);

  for (const auto& r : prog.rules) {
    if (fact_preds.count(r.head_pred))
      throw ValidationError("rule head '" + reg.pred(r.head_pred).name +
                            "' is a probabilistic fact");
    std::set<std::string> body_vars;
    for (const auto& b : r.body) {
      if (!fact_preds.count(b.pred) && !head_preds.count(b.pred))
        throw ValidationError("body atom '" + reg.pred(b.pred).name +
                              "' is neither a fact nor a rule head");
      for (const auto& t : b.args)
        if (t.is_var) body_vars.insert(t.var);
    }
    for (const auto& v : r.head_vars)
      if (!body_vars.count(v))
        throw ValidationError("head variable " + v +
                              " does not occur in the body (not "
                              "range-restricted)");
  }

  // tightness: no cycles among derived predicates
  {
    std::map<int, std::vector<int>> deps;
    for (const auto& r : prog.rules)
      for (const auto& b : r.body)
        if (head_preds.count(b.pred)) deps[r.head_pred].push_back(b.pred);
    std::map<int, int> mark;  // 0 unseen, 1 in progress, 2 done
    std::function<void(int)> dfs = [&](int p) {
      mark[p] = 1;
      for (int q : deps[p]) {
        if (mark[q] == 1)
          throw ValidationError("program is not tight: '" + reg.pred(p).name +
                                "' depends cyclically on '" +
                                reg.pred(q).name + "'");
        if (mark[q] == 0) dfs(q);
      }
      mark[p] = 2;
    };
    for (int p : head_preds)
      if (mark[p] == 0) dfs(p);
  }

  QSentence qs;
  for (const auto& p : reg.predicates) qs.base.add_predicate(p);
  // derived atoms are projected away; queries are unit-clamped instead
  for (int pid : head_preds)
    qs.base.predicates[pid].role = PredRole::auxiliary;

  // canonical head variables per derived predicate
  for (int hid : head_preds) {
    const Predicate& hp = qs.base.pred(hid);
    std::vector<std::string> canon;
    for (int i = 0; i < hp.arity; ++i)
      canon.push_back("V" + std::to_string(i + 1));
    NLit head{hid, true, {}};
    for (const auto& v : canon) head.args.push_back(FTerm::v(v));
    NLit nhead = head;
    nhead.positive = false;

    PseudoClause only_if;  // H -> disjunction of bodies
    only_if.literals.push_back(nhead);

    int rule_no = 0;
    for (const auto& r : prog.rules) {
      if (r.head_pred != hid) continue;
      ++rule_no;
      // rename: head vars to canonical, body-only vars to rule-local names
      std::map<std::string, std::string> ren;
      for (size_t i = 0; i < r.head_vars.size(); ++i)
        ren[r.head_vars[i]] = canon[i];
      std::vector<std::string> bound;
      std::vector<NLit> body;
      for (const auto& b : r.body) {
        NLit nb = b;
        for (auto& t : nb.args) {
          if (!t.is_var) continue;
          auto it = ren.find(t.var);
          if (it == ren.end()) {
            std::string fresh =
                "Y" + std::to_string(rule_no) + "_" + t.var;
            ren[t.var] = fresh;
            bound.push_back(fresh);
            t.var = fresh;
          } else {
            t.var = it->second;
          }
        }
        body.push_back(std::move(nb));
      }

      // if direction: body -> H
      NClause if_dir;
      for (auto b : body) {
        b.positive = !b.positive;
        if_dir.push_back(b);
      }
      if_dir.push_back(head);
      qs.clauses.push_back({if_dir, {}});

      // only-if direction: collect this body as a disjunct
      if (bound.empty() && body.size() == 1)
        only_if.literals.push_back(body[0]);
      else
        only_if.blocks.push_back({bound, body});
    }
    qs.clauses.push_back(std::move(only_if));
  }

  EncodeResult result;
  result.sentence = skolemize(qs);
  return result;
}

// ------------------------------------------------------ query wrapper ----

QueryAtom parse_query(const Sentence& s, const std::string& text) {
  std::string name = text;
  std::vector<int> consts;
  auto paren = text.find('(');
  if (paren != std::string::npos) {
    if (text.back() != ')')
      throw ValidationError("bad query syntax '" + text + "'");
    name = text.substr(0, paren);
    std::string inner = text.substr(paren + 1, text.size() - paren - 2);
    std::istringstream ss(inner);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      for (char c : tok)
        if (!std::isdigit((unsigned char)c) && !std::isspace((unsigned char)c))
          throw ValidationError("query arguments must be domain constants");
      consts.push_back(std::atoi(tok.c_str()));
    }
  }
  int pid = s.find_predicate(name);
  if (pid < 0) throw ValidationError("unknown query predicate '" + name + "'");
  if (s.pred(pid).arity != static_cast<int>(consts.size()))
    throw ValidationError("query arity mismatch for '" + name + "'");
  return {pid, consts};
}

ProbabilityInterval query_probability(const Sentence& encoded,
                                      const QueryAtom& q, int domain_size,
                                      const OracleConfig& oracle_config,
                                      const EngineConfig& engine_config) {
  for (int c : q.constants)
    if (c < 1 || c > domain_size)
      throw ValidationError("query constant outside domain");

  Sentence numerator_s = encoded;
  Literal notq;
  notq.pred = q.pred;
  notq.positive = false;
  for (int c : q.constants) notq.args.push_back(Term::constant(c));
  numerator_s.add_ground_unit(notq);

  // each run gets half the confidence budget in external mode
  OracleConfig oc = oracle_config;
  if (oc.mode == OracleMode::external) oc.delta /= 2;

  ProbabilityInterval out;
  {
    FomcOracle oracle(oc, engine_max_calls(encoded, domain_size));
    out.denominator = run(encoded, domain_size, oracle, engine_config);
  }
  {
    FomcOracle oracle(oc, engine_max_calls(numerator_s, domain_size));
    out.numerator = run(numerator_s, domain_size, oracle, engine_config);
  }

  Rat dlb = out.denominator.pac_lb.value_or(out.denominator.lb);
  Rat dub = out.denominator.pac_ub.value_or(out.denominator.ub);
  Rat nlb = out.numerator.pac_lb.value_or(out.numerator.lb);
  Rat nub = out.numerator.pac_ub.value_or(out.numerator.ub);
  if (dub <= 0)
    throw ValidationError("partition function is zero; query undefined");

  out.lo = dlb > 0 ? Rat(1) - nub / dlb : Rat(0);
  out.hi = Rat(1) - nlb / dub;
  if (out.lo < 0) out.lo = 0;
  if (out.hi > 1) out.hi = 1;
  if (out.lo > out.hi) std::swap(out.lo, out.hi);  // degenerate noise case
  return out;
}

}  // namespace wfomc
