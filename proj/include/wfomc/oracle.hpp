// Copyright (c) 2026 the approxwfomc authors
// Distributed under the MIT license (see LICENSE)

#pragma once

#include <atomic>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "wfomc/cardenc.hpp"
#include "wfomc/fol.hpp"
#include "wfomc/rational.hpp"

namespace wfomc {

enum class OracleMode { exact, external };
enum class DeltaSchedule { uniform, harmonic };

struct OracleConfig {
  OracleMode mode = OracleMode::exact;
  Rat epsilon = 0;           // external mode
  Rat delta = 0;             // total confidence budget, external mode
  DeltaSchedule schedule = DeltaSchedule::uniform;
  std::string external_counter_path;
  long seed = 1;
  long time_limit_ms = 0;    // per-call cap; 0 = none
};

struct OracleResult {
  Int count = 0;
  bool exact = true;
  std::optional<Rat> epsilon_used;
  std::optional<Rat> delta_consumed;
  int call_index = 0;
  long wall_time_ms = 0;
};

struct OracleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct OracleSpawnError : OracleError {
  using OracleError::OracleError;
};
struct OracleExitError : OracleError {
  using OracleError::OracleError;
};
struct OracleParseError : OracleError {
  using OracleError::OracleError;
};
struct OracleTimeout : OracleError {
  using OracleError::OracleError;
};
struct BudgetExhausted : OracleError {
  using OracleError::OracleError;
};

// Confidence-budget scheduler. uniform: delta_i = delta/M_max. harmonic:
// delta_i = delta/(i * L) with L a rational upper bound on 1 + ln(M_max+1);
// since H_M <= 1 + ln(M_max) <= L, partial sums stay below delta for every
// M <= M_max (the plain 1/(i*ln(M_max+1)) schedule would overshoot).
class DeltaLedger {
 public:
  DeltaLedger(DeltaSchedule schedule, Rat total_delta, Int m_max);

  // Reserves and returns the next delta_i; throws BudgetExhausted when the
  // reservation would exceed the total budget.
  Rat next_delta();
  // Returns the most recent reservation (used when a failed call is retried).
  void refund(const Rat& delta_i);

  DeltaSchedule schedule() const { return schedule_; }
  const Rat& total_delta() const { return total_; }
  const Int& m_max() const { return m_max_; }
  int calls_made() const { return calls_made_; }
  const Rat& consumed() const { return consumed_; }
  const Rat& harmonic_constant() const { return harmonic_l_; }

 private:
  DeltaSchedule schedule_;
  Rat total_;
  Int m_max_;
  int calls_made_ = 0;
  Rat consumed_ = 0;
  Rat harmonic_l_;  // rational upper bound on 1 + ln(m_max + 1)
};

// DIMACS CNF with sampling-set annotation lines `c ind v1 .. 0` (at most 10
// ids per line) before the header.
void write_dimacs(int num_vars, const std::vector<std::vector<int>>& clauses,
                  const std::vector<int>& sampling_set, std::ostream& out);

struct DimacsProblem {
  int num_vars = 0;
  std::vector<std::vector<int>> clauses;
  std::vector<int> sampling_set;  // empty = all variables
};

// Reads the format written by write_dimacs (also accepts `c p show` lines).
DimacsProblem read_dimacs(std::istream& in);

// The FOMC oracle: built-in exact projected counting or an external
// PAC counter spoken to over a file/subprocess protocol. Safe to call
// concurrently on distinct inputs; delta_i acquisition is serialized and
// call_index reflects acquisition order.
class FomcOracle {
 public:
  explicit FomcOracle(OracleConfig config, Int m_max = 1);

  // Counts models of gp.clauses + extra_clauses projected onto sampling_set.
  // num_vars covers auxiliary variables above gp.num_vars.
  OracleResult count(int num_vars,
                     const std::vector<std::vector<int>>& clauses,
                     const std::vector<int>& sampling_set);

  const OracleConfig& config() const { return config_; }
  DeltaLedger* ledger() { return ledger_ ? &*ledger_ : nullptr; }
  int calls() const { return calls_.load(); }

 private:
  OracleResult count_external(int num_vars,
                              const std::vector<std::vector<int>>& clauses,
                              const std::vector<int>& sampling_set);

  OracleConfig config_;
  std::optional<DeltaLedger> ledger_;
  std::mutex ledger_mutex_;
  std::atomic<int> calls_{0};
};

// Exact WFOMC by enumeration over all ground-atom assignments, in exact
// rational arithmetic; correct for negative (skolem) weights. Refuses when
// the atom table exceeds max_atoms.
Rat wmc_bruteforce(const Sentence& s, int domain_size, int max_atoms = 24);

// Runs `path [--seed N] [--epsilon E] [--delta D] file.cnf`, expects a
// to-stdout line `s mc <count>`; nonzero exit is a failure.
Int run_external_counter(const std::string& path, const std::string& cnf_path,
                         long seed, const std::optional<Rat>& epsilon,
                         const std::optional<Rat>& delta, long time_limit_ms);

}  // namespace wfomc
