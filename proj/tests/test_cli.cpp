// Copyright (c) 2026 the approxwfomc authors
// Distributed under the MIT license (see LICENSE)

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "wfomc/fol.hpp"
#include "wfomc/rational.hpp"

using json = nlohmann::json;
using namespace wfomc;

namespace {

struct RunResult {
  int exit_code;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  std::string cmd = std::string(WFOMC_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, n);
  int status = pclose(pipe);
  return {WEXITSTATUS(status), out};
}

std::string coin_path() {
  return std::string(WFOMC_MODELS_DIR) + "/coin.model";
}

}  // namespace

TEST_CASE("solve: huge tau returns initialization bounds, exit 0") {
  auto r = run_cli("solve " + coin_path() + " --tau 1e9 -o structured");
  CHECK(r.exit_code == 0);
  json j = json::parse(r.out);
  CHECK(j["lb"] == "0.000001");
  CHECK(j["ub"] == "64");
  CHECK(j["lb_exact"] == "1/1000000");
  CHECK(j["oracle_calls"] == 1);
  CHECK(j["terminated_by"] == "tolerance_met");
}

TEST_CASE("solve: converged run and exact rationals") {
  auto r = run_cli("solve " + coin_path() + " --tau 1e-9 -o structured");
  CHECK(r.exit_code == 0);
  json j = json::parse(r.out);
  CHECK(j["lb"] == "0.046656");
  CHECK(j["ub"] == "0.046656");
  CHECK(j["lb_exact"] == "729/15625");
  CHECK(j["ub_exact"] == "729/15625");
}

TEST_CASE("structured output is byte-identical across runs") {
  std::string args = "solve " + coin_path() +
                     " --tau 1e-9 -o structured --progress -";
  auto a = run_cli(args);
  auto b = run_cli(args);
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("elapsed_ms") == std::string::npos);
}

TEST_CASE("final report matches the last progress record") {
  std::string progress = "/tmp/wfomc_cli_progress.jsonl";
  std::remove(progress.c_str());
  auto r = run_cli("solve " + coin_path() + " --tau 1e-9 -o structured" +
                   " --progress " + progress);
  REQUIRE(r.exit_code == 0);
  json final = json::parse(r.out);

  std::ifstream in(progress);
  REQUIRE(in.good());
  std::string line, last;
  long records = 0;
  while (std::getline(in, line))
    if (!line.empty()) {
      last = line;
      ++records;
    }
  CHECK(records >= 2);
  json last_rec = json::parse(last);
  CHECK(last_rec["lb"] == final["lb"]);
  CHECK(last_rec["ub"] == final["ub"]);
  std::remove(progress.c_str());
}

TEST_CASE("exit codes: usage, input, queue exhaustion, cap refusal") {
  CHECK(run_cli("solve --no-such-flag").exit_code == 64);
  CHECK(run_cli("solve /nonexistent.model").exit_code == 65);
  CHECK(run_cli("bogus-subcommand").exit_code == 64);

  // UNSAT: queue exhausted at zero bounds (still a valid result)
  std::string unsat = "/tmp/wfomc_cli_unsat.model";
  {
    std::ofstream f(unsat);
    f << "domain 2\npredicate P/0 w=0.5 wbar=0.5\nclause P()\nclause !P()\n";
  }
  CHECK(run_cli("solve " + unsat).exit_code == 2);

  // decompose refusal prints M(phi,d) and exits 4
  auto r = run_cli("decompose " + coin_path() + " --term-cap 10");
  CHECK(r.exit_code == 4);
  std::remove(unsat.c_str());
}

TEST_CASE("decompose: value and call count") {
  auto r = run_cli("decompose " + coin_path() + " -o structured");
  CHECK(r.exit_code == 0);
  json j = json::parse(r.out);
  CHECK(j["value"] == "0.046656");
  CHECK(j["oracle_calls"] == 49);
  CHECK(j["terms"] == "49");
}

TEST_CASE("ground: golden DIMACS for a d=1 unary model") {
  std::string model = "/tmp/wfomc_cli_unary.model";
  {
    std::ofstream f(model);
    f << "domain 1\npredicate P/1\npredicate Q/1\nclause P(X) Q(X)\n";
  }
  auto r = run_cli("ground " + model);
  CHECK(r.exit_code == 0);
  CHECK(r.out == "c ind 1 2 0\np cnf 2 1\n1 2 0\n");
  std::remove(model.c_str());
}

TEST_CASE("ground --box appends totalizer clauses, sampling set unchanged") {
  auto plain = run_cli("ground " + coin_path());
  auto boxed = run_cli("ground " + coin_path() + " --box Heads=0..3");
  CHECK(plain.exit_code == 0);
  CHECK(boxed.exit_code == 0);
  // same annotation lines
  CHECK(boxed.out.find("c ind 1 2 3 4 5 6 7 8 9 10 0\n") !=
        std::string::npos);
  CHECK(boxed.out.find("c ind 11 12 0\n") != std::string::npos);
  // more clauses and variables
  CHECK(boxed.out.find("p cnf 12 12\n") == std::string::npos);
  CHECK(boxed.out.length() > plain.out.length());
}

TEST_CASE("count: model, boxed model, and DIMACS inputs") {
  CHECK(run_cli("count " + coin_path()).out == "s mc 64\n");
  CHECK(run_cli("count " + coin_path() + " --box Heads=0..3,Tails=0..3").out ==
        "s mc 20\n");

  std::string cnf = "/tmp/wfomc_cli_test.cnf";
  auto g = run_cli("ground " + coin_path() + " --out " + cnf);
  CHECK(g.exit_code == 0);
  CHECK(run_cli("count " + cnf).out == "s mc 64\n");
  std::remove(cnf.c_str());
}

TEST_CASE("encode: problog output round-trips through the native parser") {
  std::string prog = "/tmp/wfomc_cli_conf.pl";
  {
    std::ofstream f(prog);
    f << "0.1 :: attends(X).\n0.3 :: toSeries(X).\n"
      << "series :- attends(X), toSeries(X).\n";
  }
  auto r = run_cli("encode " + prog + " -f problog");
  CHECK(r.exit_code == 0);
  auto parsed = parse_model_string(r.out);
  CHECK(parsed.sentence.find_predicate("series") >= 0);
  CHECK(parsed.sentence.pred(parsed.sentence.find_predicate("attends")).w ==
        Rat(1, 10));
  std::remove(prog.c_str());
}

TEST_CASE("solve --query on problog input") {
  std::string prog = "/tmp/wfomc_cli_conf2.pl";
  {
    std::ofstream f(prog);
    f << "0.1 :: attends(X).\n0.3 :: toSeries(X).\n"
      << "series :- attends(X), toSeries(X).\n";
  }
  auto r = run_cli("solve " + prog + " -f problog -d 1 --query series" +
                   " --tau 1e-9 -o structured");
  CHECK(r.exit_code == 0);
  json j = json::parse(r.out);
  CHECK(j["p_lo"] == "0.03");
  CHECK(j["p_hi"] == "0.03");
  CHECK(j["p_lo_exact"] == "3/100");
  std::remove(prog.c_str());
}

TEST_CASE("solve with an external counter reports PAC bounds") {
  setenv("MOCK_MODE", "", 1);
  auto r = run_cli("solve " + coin_path() + " -d 3 --tau 0.01" +
                   " --oracle external --counter " WFOMC_MOCK_COUNTER_PATH +
                   std::string(" --epsilon 0.8 --delta 0.2 --seed 5") +
                   " --schedule harmonic -o structured");
  CHECK(r.exit_code == 0);
  json j = json::parse(r.out);
  CHECK(j.contains("pac_lb"));
  CHECK(j.contains("pac_ub"));
  // exact-mode mock: the bounds coincide with the exact run
  auto exact = run_cli("solve " + coin_path() + " -d 3 --tau 0.01" +
                       " -o structured");
  json je = json::parse(exact.out);
  CHECK(j["lb"] == je["lb"]);
  CHECK(j["ub"] == je["ub"]);
  CHECK(parse_rational(j["delta_consumed"].get<std::string>()) <= Rat(1, 5));
}
