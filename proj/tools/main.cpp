// Copyright (c) 2026 the approxwfomc authors
// Distributed under the MIT license (see LICENSE)

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include "wfomc/encoders.hpp"
#include "wfomc/engine.hpp"
#include "wfomc/exact_counter.hpp"
#include "wfomc/fol.hpp"
#include "wfomc/oracle.hpp"

using json = nlohmann::json;
using namespace wfomc;

namespace {

// exit-code taxonomy (see README): 0 ok, 2 queue_exhausted,
// 3 budget_exhausted, 4 resource_limit, 64 usage, 65 input
constexpr int kExitQueue = 2;
constexpr int kExitBudget = 3;
constexpr int kExitResource = 4;
constexpr int kExitUsage = 64;
constexpr int kExitInput = 65;

int stop_exit_code(StopReason r) {
  switch (r) {
    case StopReason::tolerance_met: return 0;
    case StopReason::queue_exhausted: return kExitQueue;
    case StopReason::budget_exhausted: return kExitBudget;
    case StopReason::resource_limit: return kExitResource;
  }
  return kExitResource;
}

long env_long(const char* name, long fallback) {
  const char* v = std::getenv(name);
  return v ? std::atol(v) : fallback;
}

struct Options {
  std::string input;
  std::string format = "native";
  int domain_size = 0;
  std::string tau = "0.000001";
  std::string oracle = "exact";
  std::string epsilon = "0.8";
  std::string delta = "0.2";
  std::string schedule = "uniform";
  std::string counter_path;
  long seed = 1;
  std::string output = "human";
  std::string progress_path;
  bool timings = false;
  std::string query;
  std::string mln_weights = "log";
  std::string box;
  std::string out_path;
  int threads = 1;
  long ground_cap = env_long("WFOMC_GROUND_CAP", 1000000);
  long term_cap = env_long("WFOMC_TERM_CAP", 100000);
  long time_limit_ms = env_long("WFOMC_TIME_LIMIT_MS", 0);
};

struct LoadedModel {
  Sentence sentence;
  std::optional<int> default_domain;
  std::vector<std::string> notes;
};

LoadedModel load_model(const Options& opt) {
  LoadedModel out;
  if (opt.format == "native") {
    auto parsed = parse_model_file(opt.input);
    out.sentence = std::move(parsed.sentence);
    out.default_domain = parsed.domain_size;
  } else if (opt.format == "mln") {
    auto mln = parse_mln_file(opt.input, opt.mln_weights == "direct");
    auto enc = encode_mln(mln);
    out.sentence = std::move(enc.sentence);
    out.notes = std::move(enc.notes);
  } else if (opt.format == "problog") {
    auto prog = parse_problog_file(opt.input);
    auto enc = encode_problog(prog);
    out.sentence = std::move(enc.sentence);
    out.notes = std::move(enc.notes);
  } else {
    throw ValidationError("unknown format '" + opt.format + "'");
  }
  return out;
}

int resolve_domain(const Options& opt, const LoadedModel& m) {
  if (opt.domain_size > 0) return opt.domain_size;
  if (m.default_domain) return *m.default_domain;
  throw ValidationError(
      "domain size not given (use --domain-size or a 'domain' line)");
}

OracleConfig oracle_config(const Options& opt) {
  OracleConfig oc;
  if (opt.oracle == "exact") {
    oc.mode = OracleMode::exact;
  } else if (opt.oracle == "external") {
    oc.mode = OracleMode::external;
    if (opt.counter_path.empty())
      throw ValidationError("external oracle needs --counter <path>");
    oc.external_counter_path = opt.counter_path;
    oc.epsilon = parse_rational(opt.epsilon);
    oc.delta = parse_rational(opt.delta);
    oc.schedule = opt.schedule == "harmonic" ? DeltaSchedule::harmonic
                                             : DeltaSchedule::uniform;
  } else {
    throw ValidationError("unknown oracle mode '" + opt.oracle + "'");
  }
  oc.seed = opt.seed;
  oc.time_limit_ms = opt.time_limit_ms;
  return oc;
}

CardinalityBox parse_box_flag(const Sentence& s, int d,
                              const std::string& text) {
  CardinalityBox box;
  std::istringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    auto dots = item.find("..");
    if (eq == std::string::npos)
      throw ValidationError("bad --box entry '" + item + "'");
    std::string name = item.substr(0, eq);
    int pid = s.find_predicate(name);
    if (pid < 0) throw ValidationError("unknown predicate '" + name + "'");
    Int lo, hi;
    if (dots == std::string::npos) {
      lo = hi = Int(item.substr(eq + 1));
    } else {
      lo = Int(item.substr(eq + 1, dots - eq - 1));
      hi = Int(item.substr(dots + 2));
    }
    Int xi = ground_count(s.pred(pid), d);
    if (lo < 0 || lo > hi || hi > xi)
      throw ValidationError("--box interval out of range for '" + name + "'");
    box.bounds[pid] = {lo, hi};
  }
  return box;
}

json record_json(const ProgressRecord& pr, bool timings) {
  json j;
  j["iter"] = pr.iter;
  j["lb"] = to_decimal_string(pr.lb);
  j["ub"] = to_decimal_string(pr.ub);
  if (pr.ratio)
    j["ratio"] = to_decimal_string(*pr.ratio);
  else
    j["ratio"] = nullptr;
  j["oracle_calls"] = pr.oracle_calls;
  j["delta_consumed"] = to_decimal_string(pr.delta_consumed);
  if (timings) j["elapsed_ms"] = pr.elapsed_ms;
  return j;
}

int cmd_solve(const Options& opt) {
  LoadedModel model = load_model(opt);
  int d = resolve_domain(opt, model);

  EngineConfig ec;
  ec.tau = parse_rational(opt.tau);
  ec.max_ground_clauses = opt.ground_cap;
  ec.time_limit_ms = opt.time_limit_ms;
  ec.oracle_threads = opt.threads;

  std::unique_ptr<std::ofstream> progress_file;
  std::ostream* progress = nullptr;
  if (!opt.progress_path.empty()) {
    if (opt.progress_path == "-") {
      progress = &std::cout;
    } else {
      progress_file = std::make_unique<std::ofstream>(opt.progress_path);
      if (!*progress_file)
        throw ValidationError("cannot open progress sink '" +
                              opt.progress_path + "'");
      progress = progress_file.get();
    }
  }
  bool timings = opt.timings;
  if (progress)
    ec.progress = [&, progress](const ProgressRecord& pr) {
      *progress << (record_json(pr, timings).dump() + "\n");
      progress->flush();
    };

  OracleConfig oc = oracle_config(opt);

  if (!opt.query.empty()) {
    QueryAtom q = parse_query(model.sentence, opt.query);
    auto res = query_probability(model.sentence, q, d, oc, ec);
    if (opt.output == "structured") {
      json j;
      j["query"] = opt.query;
      j["p_lo"] = to_decimal_string(res.lo);
      j["p_hi"] = to_decimal_string(res.hi);
      j["p_lo_exact"] = to_exact_string(res.lo);
      j["p_hi_exact"] = to_exact_string(res.hi);
      j["oracle_calls"] =
          res.denominator.oracle_calls + res.numerator.oracle_calls;
      j["terminated_by"] = std::string(to_string(res.denominator.terminated_by)) +
                           "/" + to_string(res.numerator.terminated_by);
      std::cout << j.dump() << "\n";
    } else {
      for (const auto& n : model.notes) std::cout << "note: " << n << "\n";
      std::cout << "P(" << opt.query << ") in [" << to_decimal_string(res.lo)
                << ", " << to_decimal_string(res.hi) << "]\n";
      std::cout << "exact: [" << to_exact_string(res.lo) << ", "
                << to_exact_string(res.hi) << "]\n";
      std::cout << "oracle calls: "
                << res.denominator.oracle_calls + res.numerator.oracle_calls
                << "\n";
    }
    return std::max(stop_exit_code(res.denominator.terminated_by),
                    stop_exit_code(res.numerator.terminated_by));
  }

  FomcOracle oracle(oc, engine_max_calls(model.sentence, d));
  BoundsReport rep = run(model.sentence, d, oracle, ec);

  if (opt.output == "structured") {
    json j;
    j["lb"] = to_decimal_string(rep.lb);
    j["ub"] = to_decimal_string(rep.ub);
    j["lb_exact"] = to_exact_string(rep.lb);
    j["ub_exact"] = to_exact_string(rep.ub);
    if (rep.ratio)
      j["ratio"] = to_decimal_string(*rep.ratio);
    else
      j["ratio"] = nullptr;
    if (rep.pac_lb) {
      j["pac_lb"] = to_decimal_string(*rep.pac_lb);
      j["pac_ub"] = to_decimal_string(*rep.pac_ub);
    }
    j["oracle_calls"] = rep.oracle_calls;
    j["delta_consumed"] = to_decimal_string(rep.delta_consumed);
    j["iterations"] = rep.iterations;
    j["terminated_by"] = to_string(rep.terminated_by);
    std::cout << j.dump() << "\n";
  } else {
    for (const auto& n : model.notes) std::cout << "note: " << n << "\n";
    std::cout << "lb      = " << to_decimal_string(rep.lb) << "  ("
              << to_exact_string(rep.lb) << ")\n";
    std::cout << "ub      = " << to_decimal_string(rep.ub) << "  ("
              << to_exact_string(rep.ub) << ")\n";
    if (rep.ratio)
      std::cout << "ratio   = " << to_decimal_string(*rep.ratio) << "\n";
    else
      std::cout << "ratio   = inf\n";
    if (rep.pac_lb) {
      std::cout << "pac_lb  = " << to_decimal_string(*rep.pac_lb) << "\n";
      std::cout << "pac_ub  = " << to_decimal_string(*rep.pac_ub) << "\n";
    }
    std::cout << "calls   = " << rep.oracle_calls << "\n";
    std::cout << "stopped = " << to_string(rep.terminated_by) << "\n";
  }
  return stop_exit_code(rep.terminated_by);
}

int cmd_decompose(const Options& opt) {
  LoadedModel model = load_model(opt);
  int d = resolve_domain(opt, model);
  OracleConfig oc = oracle_config(opt);
  Int terms = term_count(model.sentence, d);
  FomcOracle oracle(oc, terms);
  auto res = decompose_exact(model.sentence, d, oracle, Int(opt.term_cap));
  if (opt.output == "structured") {
    json j;
    j["value"] = to_decimal_string(res.value);
    j["value_exact"] = to_exact_string(res.value);
    j["oracle_calls"] = res.oracle_calls;
    j["terms"] = res.terms.get_str();
    std::cout << j.dump() << "\n";
  } else {
    std::cout << "value = " << to_decimal_string(res.value) << "  ("
              << to_exact_string(res.value) << ")\n";
    std::cout << "calls = " << res.oracle_calls << "\n";
  }
  return 0;
}

int cmd_ground(const Options& opt) {
  LoadedModel model = load_model(opt);
  int d = resolve_domain(opt, model);
  GroundProblem gp = ground(model.sentence, d, opt.ground_cap);

  int num_vars = gp.num_vars;
  std::vector<std::vector<int>> clauses = gp.clauses;
  if (!opt.box.empty()) {
    CardinalityBox box = parse_box_flag(model.sentence, d, opt.box);
    VarAllocator alloc(gp.num_vars);
    auto enc = encode_box(model.sentence, gp, box, alloc);
    for (auto& cl : enc.clauses) clauses.push_back(std::move(cl));
    num_vars = alloc.high_water();
  }

  if (opt.out_path.empty() || opt.out_path == "-") {
    write_dimacs(num_vars, clauses, gp.sampling_set, std::cout);
  } else {
    std::ofstream out(opt.out_path);
    if (!out)
      throw ValidationError("cannot open output file '" + opt.out_path + "'");
    write_dimacs(num_vars, clauses, gp.sampling_set, out);
  }
  return 0;
}

int cmd_count(const Options& opt) {
  Int count;
  if (opt.input.size() > 4 &&
      opt.input.compare(opt.input.size() - 4, 4, ".cnf") == 0) {
    std::ifstream in(opt.input);
    if (!in) throw ValidationError("cannot open input file '" + opt.input + "'");
    DimacsProblem p = read_dimacs(in);
    ExactCounter counter(p.num_vars, p.clauses);
    count = counter.count_projected(p.sampling_set, opt.time_limit_ms);
  } else {
    LoadedModel model = load_model(opt);
    int d = resolve_domain(opt, model);
    GroundProblem gp = ground(model.sentence, d, opt.ground_cap);
    int num_vars = gp.num_vars;
    std::vector<std::vector<int>> clauses = gp.clauses;
    if (!opt.box.empty()) {
      CardinalityBox box = parse_box_flag(model.sentence, d, opt.box);
      VarAllocator alloc(gp.num_vars);
      auto enc = encode_box(model.sentence, gp, box, alloc);
      for (auto& cl : enc.clauses) clauses.push_back(std::move(cl));
      num_vars = alloc.high_water();
    }
    ExactCounter counter(num_vars, clauses);
    count = counter.count_projected(gp.sampling_set, opt.time_limit_ms);
  }
  std::cout << "s mc " << count.get_str() << "\n";
  return 0;
}

int cmd_encode(const Options& opt) {
  if (opt.format == "native")
    throw ValidationError("encode expects --format mln or --format problog");
  LoadedModel model = load_model(opt);
  std::optional<int> d;
  if (opt.domain_size > 0) d = opt.domain_size;
  std::string text = to_native_format(model.sentence, d);
  std::ostringstream head;
  for (const auto& n : model.notes) head << "# " << n << "\n";
  text = head.str() + text;
  if (opt.out_path.empty() || opt.out_path == "-") {
    std::cout << text;
  } else {
    std::ofstream out(opt.out_path);
    if (!out)
      throw ValidationError("cannot open output file '" + opt.out_path + "'");
    out << text;
  }
  return 0;
}

void add_common(CLI::App* cmd, Options& opt, bool needs_input = true) {
  if (needs_input)
    cmd->add_option("input", opt.input, "input model file")->required();
  cmd->add_option("--format,-f", opt.format, "input format: native|mln|problog");
  cmd->add_option("--domain-size,-d", opt.domain_size, "domain size");
  cmd->add_option("--mln-weights", opt.mln_weights,
                  "MLN weight interpretation: log|direct");
  cmd->add_option("--ground-cap", opt.ground_cap, "max ground clauses");
  cmd->add_option("--time-limit-ms", opt.time_limit_ms, "wall-clock cap");
  cmd->add_option("--output,-o", opt.output, "output style: human|structured");
}

void add_oracle(CLI::App* cmd, Options& opt) {
  cmd->add_option("--oracle", opt.oracle, "oracle mode: exact|external");
  cmd->add_option("--epsilon", opt.epsilon, "external counter tolerance");
  cmd->add_option("--delta", opt.delta, "total confidence budget");
  cmd->add_option("--schedule", opt.schedule,
                  "delta schedule: uniform|harmonic");
  cmd->add_option("--counter", opt.counter_path, "external counter executable");
  cmd->add_option("--seed", opt.seed, "seed forwarded to the external counter");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"anytime lower/upper bounds on weighted first-order model "
               "counts over finite domains"};
  app.require_subcommand(1);
  Options opt;

  auto* solve = app.add_subcommand(
      "solve", "bracket the WFOMC between anytime bounds");
  add_common(solve, opt);
  add_oracle(solve, opt);
  solve->add_option("--tau", opt.tau, "termination tolerance (> 0)");
  solve->add_option("--progress", opt.progress_path,
                    "progress record sink ('-' for stdout)");
  solve->add_flag("--timings", opt.timings,
                  "include elapsed_ms in progress records");
  solve->add_option("--query", opt.query,
                    "ground query atom (problog), e.g. 'series'");
  solve->add_option("--threads", opt.threads,
                    "concurrent sibling oracle calls (default 1)");

  auto* decompose = app.add_subcommand(
      "decompose", "exact WFOMC by full cardinality decomposition");
  add_common(decompose, opt);
  add_oracle(decompose, opt);
  decompose->add_option("--term-cap", opt.term_cap,
                        "refuse decompositions with more terms");

  auto* ground_cmd =
      app.add_subcommand("ground", "write the grounding as DIMACS CNF");
  add_common(ground_cmd, opt);
  ground_cmd->add_option("--box", opt.box,
                         "cardinality intervals, e.g. Heads=0..3,Tails=2..2");
  ground_cmd->add_option("--out", opt.out_path, "output file ('-' = stdout)");

  auto* count_cmd = app.add_subcommand(
      "count", "exact projected model count of a model or .cnf file");
  add_common(count_cmd, opt);
  count_cmd->add_option("--box", opt.box, "cardinality intervals");

  auto* encode_cmd = app.add_subcommand(
      "encode", "translate an MLN or ProbLog input to the native format");
  add_common(encode_cmd, opt);
  encode_cmd->add_option("--out", opt.out_path, "output file ('-' = stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (solve->parsed()) return cmd_solve(opt);
    if (decompose->parsed()) return cmd_decompose(opt);
    if (ground_cmd->parsed()) return cmd_ground(opt);
    if (count_cmd->parsed()) return cmd_count(opt);
    if (encode_cmd->parsed()) return cmd_encode(opt);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const BadNumber& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const BudgetExhausted& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBudget;
  } catch (const OracleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitResource;
  } catch (const ResourceLimit& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitResource;
  }
  return kExitUsage;
}
