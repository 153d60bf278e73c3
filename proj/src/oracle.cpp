// Copyright (c) 2026 the approxwfomc authors
// Distributed under the MIT license (see LICENSE)

#include "wfomc/oracle.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <functional>
#include <sstream>

#include "wfomc/exact_counter.hpp"

namespace wfomc {

DeltaLedger::DeltaLedger(DeltaSchedule schedule, Rat total_delta, Int m_max)
    : schedule_(schedule), total_(std::move(total_delta)),
      m_max_(std::move(m_max)) {
  if (total_ <= 0 || total_ > 1)
    throw ValidationError("delta must lie in (0, 1]");
  if (m_max_ < 1) throw ValidationError("M_max must be >= 1");
  if (schedule_ == DeltaSchedule::harmonic)
    harmonic_l_ = Rat(1) + ln_upper(m_max_ + 1);
}

Rat DeltaLedger::next_delta() {
  Rat delta_i;
  if (schedule_ == DeltaSchedule::uniform) {
    delta_i = total_ / Rat(m_max_);
  } else {
    Rat i(calls_made_ + 1);
    delta_i = total_ / (i * harmonic_l_);
  }
  if (consumed_ + delta_i > total_)
    throw BudgetExhausted("confidence budget exhausted after " +
                          std::to_string(calls_made_) + " calls");
  ++calls_made_;
  consumed_ += delta_i;
  return delta_i;
}

void DeltaLedger::refund(const Rat& delta_i) {
  consumed_ -= delta_i;
  --calls_made_;
}

void write_dimacs(int num_vars, const std::vector<std::vector<int>>& clauses,
                  const std::vector<int>& sampling_set, std::ostream& out) {
  std::vector<int> ss(sampling_set);
  std::sort(ss.begin(), ss.end());
  ss.erase(std::unique(ss.begin(), ss.end()), ss.end());
  for (size_t i = 0; i < ss.size(); i += 10) {
    out << "c ind";
    for (size_t j = i; j < ss.size() && j < i + 10; ++j) out << " " << ss[j];
    out << " 0\n";
  }
  out << "p cnf " << num_vars << " " << clauses.size() << "\n";
  for (const auto& cl : clauses) {
    for (int lit : cl) out << lit << " ";
    out << "0\n";
  }
  if (!out) throw ResourceLimit("I/O failure writing DIMACS");
}

DimacsProblem read_dimacs(std::istream& in) {
  DimacsProblem p;
  std::string line;
  long declared_clauses = -1;
  std::vector<int> current;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok == "c") {
      std::string kind;
      ls >> kind;
      bool ind = kind == "ind";
      if (kind == "p") {
        std::string show;
        ls >> show;
        ind = show == "show";
      }
      if (ind) {
        int v;
        while (ls >> v && v != 0) p.sampling_set.push_back(v);
      }
      continue;
    }
    if (tok == "p") {
      std::string fmt;
      ls >> fmt >> p.num_vars >> declared_clauses;
      continue;
    }
    // clause literals, 0-terminated, possibly spanning lines
    int lit = std::atoi(tok.c_str());
    while (true) {
      if (lit == 0) {
        p.clauses.push_back(current);
        current.clear();
      } else {
        current.push_back(lit);
      }
      if (!(ls >> lit)) break;
    }
  }
  if (!current.empty()) throw OracleParseError("unterminated DIMACS clause");
  if (declared_clauses >= 0 &&
      declared_clauses != static_cast<long>(p.clauses.size()))
    throw OracleParseError("DIMACS clause count mismatch");
  if (p.sampling_set.empty())
    for (int v = 1; v <= p.num_vars; ++v) p.sampling_set.push_back(v);
  return p;
}

namespace {

long now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& contents) {
    char name[] = "/tmp/wfomc_cnf_XXXXXX";
    int fd = mkstemp(name);
    if (fd < 0) throw OracleSpawnError("mkstemp failed");
    path = name;
    size_t off = 0;
    while (off < contents.size()) {
      ssize_t n = ::write(fd, contents.data() + off, contents.size() - off);
      if (n < 0) {
        ::close(fd);
        throw OracleSpawnError("write to temp file failed");
      }
      off += static_cast<size_t>(n);
    }
    ::close(fd);
  }
  ~TempFile() { ::unlink(path.c_str()); }
};

}  // namespace

Int run_external_counter(const std::string& path, const std::string& cnf_path,
                         long seed, const std::optional<Rat>& epsilon,
                         const std::optional<Rat>& delta, long time_limit_ms) {
  std::vector<std::string> args{path, "--seed", std::to_string(seed)};
  if (epsilon) {
    args.push_back("--epsilon");
    args.push_back(to_decimal_string(*epsilon));
  }
  if (delta) {
    args.push_back("--delta");
    args.push_back(to_decimal_string(*delta));
  }
  args.push_back(cnf_path);

  int fds[2];
  if (pipe(fds) != 0) throw OracleSpawnError("pipe failed");
  pid_t pid = fork();
  if (pid < 0) {
    ::close(fds[0]);
    ::close(fds[1]);
    throw OracleSpawnError("fork failed");
  }
  if (pid == 0) {
    ::dup2(fds[1], STDOUT_FILENO);
    ::close(fds[0]);
    ::close(fds[1]);
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);
    execv(argv[0], argv.data());
    _exit(127);
  }
  ::close(fds[1]);

  std::string output;
  char buf[4096];
  long deadline = time_limit_ms > 0 ? now_ms() + time_limit_ms : 0;
  bool timed_out = false;
  while (true) {
    int wait = -1;
    if (deadline) {
      long left = deadline - now_ms();
      if (left <= 0) {
        timed_out = true;
        break;
      }
      wait = static_cast<int>(std::min(left, 1000L));
    }
    struct pollfd pfd{fds[0], POLLIN, 0};
    int pr = poll(&pfd, 1, wait);
    if (pr < 0) break;
    if (pr == 0) continue;  // re-check deadline
    ssize_t n = ::read(fds[0], buf, sizeof(buf));
    if (n <= 0) break;
    output.append(buf, static_cast<size_t>(n));
  }
  ::close(fds[0]);
  if (timed_out) {
    kill(pid, SIGKILL);
    waitpid(pid, nullptr, 0);
    throw OracleTimeout("external counter exceeded " +
                        std::to_string(time_limit_ms) + " ms");
  }
  int status = 0;
  waitpid(pid, &status, 0);
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    if (code == 127)
      throw OracleSpawnError("cannot execute '" + path + "'");
    throw OracleExitError("external counter exited with status " +
                          std::to_string(code));
  }

  std::istringstream os(output);
  std::string line;
  while (std::getline(os, line)) {
    std::istringstream ls(line);
    std::string s, mc, num;
    if (ls >> s >> mc >> num && s == "s" && mc == "mc") {
      try {
        Int c(num);
        if (c < 0) throw std::invalid_argument("negative");
        return c;
      } catch (const std::invalid_argument&) {
        throw OracleParseError("bad count in line '" + line + "'");
      }
    }
  }
  throw OracleParseError("no 's mc <count>' line in external counter output");
}

FomcOracle::FomcOracle(OracleConfig config, Int m_max)
    : config_(std::move(config)) {
  if (config_.mode == OracleMode::external) {
    if (config_.epsilon <= 0)
      throw ValidationError("external mode needs epsilon > 0");
    ledger_.emplace(config_.schedule, config_.delta, m_max);
  }
}

OracleResult FomcOracle::count(int num_vars,
                               const std::vector<std::vector<int>>& clauses,
                               const std::vector<int>& sampling_set) {
  long t0 = now_ms();
  OracleResult res;
  if (config_.mode == OracleMode::exact) {
    ExactCounter counter(num_vars, clauses);
    res.count = counter.count_projected(sampling_set, config_.time_limit_ms);
    res.exact = true;
  } else {
    res = count_external(num_vars, clauses, sampling_set);
  }
  res.call_index = ++calls_;
  res.wall_time_ms = now_ms() - t0;
  return res;
}

OracleResult FomcOracle::count_external(
    int num_vars, const std::vector<std::vector<int>>& clauses,
    const std::vector<int>& sampling_set) {
  std::ostringstream cnf;
  write_dimacs(num_vars, clauses, sampling_set, cnf);

  OracleResult res;
  res.exact = false;
  res.epsilon_used = config_.epsilon;
  // A failed call is refunded; the single retry re-acquires its delta_i.
  for (int attempt = 0; attempt < 2; ++attempt) {
    Rat delta_i;
    {
      std::lock_guard<std::mutex> lock(ledger_mutex_);
      delta_i = ledger_->next_delta();
    }
    try {
      TempFile tmp(cnf.str());
      res.count = run_external_counter(config_.external_counter_path, tmp.path,
                                       config_.seed, config_.epsilon, delta_i,
                                       config_.time_limit_ms);
      res.delta_consumed = delta_i;
      return res;
    } catch (const BudgetExhausted&) {
      throw;
    } catch (const OracleError&) {
      std::lock_guard<std::mutex> lock(ledger_mutex_);
      ledger_->refund(delta_i);
      if (attempt == 1) throw;
    }
  }
  throw OracleError("unreachable");
}

Rat wmc_bruteforce(const Sentence& s, int domain_size, int max_atoms) {
  GroundProblem gp = ground(s, domain_size);
  const int n = gp.num_vars;
  if (n > max_atoms)
    throw ResourceLimit("brute-force cap exceeded: " + std::to_string(n) +
                        " ground atoms > " + std::to_string(max_atoms));

  // per-variable weights
  std::vector<Rat> wpos(n + 1), wneg(n + 1);
  for (size_t p = 0; p < s.predicates.size(); ++p)
    for (int v = gp.pred_offset[p]; v < gp.pred_offset[p + 1]; ++v) {
      wpos[v + 1] = s.predicates[p].w;
      wneg[v + 1] = s.predicates[p].wbar;
    }
  // suffix[v] = prod_{u >= v} (w_u + wbar_u), for the all-clauses-satisfied
  // shortcut
  std::vector<Rat> suffix(n + 2);
  suffix[n + 1] = 1;
  for (int v = n; v >= 1; --v) suffix[v] = suffix[v + 1] * (wpos[v] + wneg[v]);

  std::vector<std::vector<int>> occ(n + 1);
  struct CState {
    int sat = 0;
    int nonfalse = 0;
  };
  std::vector<CState> cs(gp.clauses.size());
  for (size_t c = 0; c < gp.clauses.size(); ++c) {
    cs[c].nonfalse = static_cast<int>(gp.clauses[c].size());
    for (int lit : gp.clauses[c]) occ[std::abs(lit)].push_back((int)c);
  }
  int active = static_cast<int>(gp.clauses.size());

  // returns false on an all-false clause
  auto apply = [&](int v, bool val) {
    bool ok = true;
    for (int c : occ[v]) {
      for (int lit : gp.clauses[c]) {
        if (std::abs(lit) != v) continue;
        if ((lit > 0) == val) {
          if (cs[c].sat++ == 0) --active;
        } else {
          if (--cs[c].nonfalse == 0 && cs[c].sat == 0) ok = false;
        }
      }
    }
    return ok;
  };
  auto unapply = [&](int v, bool val) {
    for (int c : occ[v]) {
      for (int lit : gp.clauses[c]) {
        if (std::abs(lit) != v) continue;
        if ((lit > 0) == val) {
          if (--cs[c].sat == 0) ++active;
        } else {
          ++cs[c].nonfalse;
        }
      }
    }
  };

  std::function<Rat(int)> rec = [&](int v) -> Rat {
    if (active == 0) return suffix[v];
    if (v > n) return Rat(0);
    Rat total = 0;
    for (int val = 1; val >= 0; --val) {
      if (apply(v, val)) {
        Rat sub = rec(v + 1);
        if (sub != 0) total += (val ? wpos[v] : wneg[v]) * sub;
      }
      unapply(v, val);
    }
    return total;
  };
  return rec(1);
}

}  // namespace wfomc
