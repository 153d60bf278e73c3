// Copyright (c) 2026 the approxwfomc authors
// Distributed under the MIT license (see LICENSE)
//
// Stand-in external model counter used by the test suites. Independent of
// the library on purpose: own DIMACS reader, own counting routine. Counts
// exactly by default; MOCK_MODE=adversarial perturbs the count to a random
// endpoint of the PAC band [c/(1+eps), c*(1+eps)], and MOCK_MODE=fail /
// garbage / hang exercise the error paths.

#include <unistd.h>

#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct Cnf {
  int num_vars = 0;
  std::vector<std::vector<int>> clauses;
  std::vector<int> sampling;
};

Cnf read_cnf(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "cannot open " << path << "\n";
    std::exit(2);
  }
  Cnf cnf;
  std::string line;
  std::vector<int> cur;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok == "c") {
      std::string kind;
      ls >> kind;
      if (kind == "ind") {
        int v;
        while (ls >> v && v != 0) cnf.sampling.push_back(v);
      }
      continue;
    }
    if (tok == "p") {
      std::string fmt;
      int ignored;
      ls >> fmt >> cnf.num_vars >> ignored;
      continue;
    }
    int lit = std::atoi(tok.c_str());
    while (true) {
      if (lit == 0) {
        cnf.clauses.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(lit);
      }
      if (!(ls >> lit)) break;
    }
  }
  if (cnf.sampling.empty())
    for (int v = 1; v <= cnf.num_vars; ++v) cnf.sampling.push_back(v);
  return cnf;
}

std::vector<int8_t> assigned;

bool value_of(int lit) {
  int8_t a = assigned[std::abs(lit)];
  return lit > 0 ? a == 1 : a == -1;
}
bool falsified(int lit) {
  int8_t a = assigned[std::abs(lit)];
  return lit > 0 ? a == -1 : a == 1;
}

// plain DPLL with full-scan unit propagation
bool sat(const Cnf& cnf) {
  while (true) {
    bool changed = false;
    for (const auto& cl : cnf.clauses) {
      int unassigned = 0, last = 0;
      bool satd = false;
      for (int lit : cl) {
        if (value_of(lit)) {
          satd = true;
          break;
        }
        if (!falsified(lit)) {
          ++unassigned;
          last = lit;
        }
      }
      if (satd) continue;
      if (unassigned == 0) return false;
      if (unassigned == 1) {
        assigned[std::abs(last)] = last > 0 ? 1 : -1;
        changed = true;
      }
    }
    if (!changed) break;
  }
  int branch = 0;
  for (const auto& cl : cnf.clauses) {
    bool satd = false;
    for (int lit : cl)
      if (value_of(lit)) {
        satd = true;
        break;
      }
    if (satd) continue;
    for (int lit : cl)
      if (!falsified(lit)) {
        branch = std::abs(lit);
        break;
      }
    break;
  }
  if (branch == 0) return true;  // every clause satisfied
  std::vector<int8_t> save = assigned;
  assigned[branch] = 1;
  if (sat(cnf)) return true;
  assigned = save;
  assigned[branch] = -1;
  bool r = sat(cnf);
  if (!r) assigned = save;
  return r;
}

unsigned long long count_projected(const Cnf& cnf, size_t idx) {
  if (idx == cnf.sampling.size()) {
    std::vector<int8_t> save = assigned;
    bool r = sat(cnf);
    assigned = save;
    return r ? 1 : 0;
  }
  int v = cnf.sampling[idx];
  unsigned long long total = 0;
  for (int8_t val : {int8_t(1), int8_t(-1)}) {
    assigned[v] = val;
    total += count_projected(cnf, idx + 1);
  }
  assigned[v] = 0;
  return total;
}

// epsilon as an exact fraction p/q from a decimal string
void parse_eps(const std::string& s, long long& p, long long& q) {
  p = 0;
  q = 1;
  bool frac = false;
  for (char c : s) {
    if (c == '.') {
      frac = true;
      continue;
    }
    if (c < '0' || c > '9') break;
    p = p * 10 + (c - '0');
    if (frac) q *= 10;
  }
}

}  // namespace

int main(int argc, char** argv) {
  long seed = 1;
  std::string eps_str = "0.8";
  std::string file;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--seed" && i + 1 < argc)
      seed = std::atol(argv[++i]);
    else if (a == "--epsilon" && i + 1 < argc)
      eps_str = argv[++i];
    else if (a == "--delta" && i + 1 < argc)
      ++i;
    else
      file = a;
  }
  if (file.empty()) {
    std::cerr << "usage: mock_counter [--seed N] [--epsilon E] [--delta D] "
                 "file.cnf\n";
    return 2;
  }

  const char* mode_env = std::getenv("MOCK_MODE");
  std::string mode = mode_env ? mode_env : "";
  // MOCK_FAIL_AFTER=N with MOCK_STATE_FILE: succeed for the first N
  // invocations, fail afterwards (per-call state kept in the file)
  if (const char* after = std::getenv("MOCK_FAIL_AFTER")) {
    const char* state = std::getenv("MOCK_STATE_FILE");
    long calls = 0;
    if (state) {
      std::ifstream in(state);
      in >> calls;
    }
    ++calls;
    if (state) {
      std::ofstream out(state);
      out << calls << "\n";
    }
    if (calls > std::atol(after)) return 1;
  }
  if (mode == "fail") return 1;
  if (mode == "garbage") {
    std::cout << "no count here\n";
    return 0;
  }
  if (mode == "hang") {
    sleep(30);
    return 0;
  }

  Cnf cnf = read_cnf(file);
  assigned.assign(cnf.num_vars + 1, 0);
  unsigned long long c = count_projected(cnf, 0);

  if (mode == "adversarial" && c > 0) {
    long long p, q;
    parse_eps(eps_str, p, q);  // eps = p/q
    // band: [c*q/(p+q) (rounded up), c*(p+q)/q (rounded down)]
    unsigned long long lo =
        (c * (unsigned long long)q + (unsigned long long)(p + q) - 1) /
        (unsigned long long)(p + q);
    unsigned long long hi =
        c * (unsigned long long)(p + q) / (unsigned long long)q;
    std::mt19937_64 rng(static_cast<unsigned long long>(seed) * 0x9e3779b9ULL +
                        c);
    c = (rng() & 1) ? hi : lo;
  }

  std::cout << "s mc " << c << "\n";
  return 0;
}
