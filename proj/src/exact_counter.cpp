// Copyright (c) 2026 the approxwfomc authors
// Distributed under the MIT license (see LICENSE)

#include "wfomc/exact_counter.hpp"

#include <chrono>
#include <cstdlib>

#include "wfomc/fol.hpp"

namespace wfomc {

namespace {
long now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}
}  // namespace

ExactCounter::ExactCounter(int num_vars, std::vector<std::vector<int>> clauses)
    : num_vars_(num_vars), clauses_(std::move(clauses)) {
  occ_.resize(num_vars_ + 1);
  assign_.assign(num_vars_ + 1, 0);
  state_.resize(clauses_.size());
  for (size_t c = 0; c < clauses_.size(); ++c) {
    state_[c].nonfalse = static_cast<int>(clauses_[c].size());
    for (int lit : clauses_[c]) {
      int v = std::abs(lit);
      if (v < 1 || v > num_vars_)
        throw ValidationError("literal out of range in clause set");
      occ_[v].push_back(static_cast<int>(c));
    }
  }
  active_clauses_ = static_cast<int>(clauses_.size());
}

bool ExactCounter::assign(int lit) {
  int v = std::abs(lit);
  int8_t val = lit > 0 ? 1 : -1;
  if (assign_[v] != 0) return assign_[v] == val;
  assign_[v] = val;
  trail_.push_back(lit);
  if (is_sampling_[v]) --unassigned_sampling_;
  bool ok = true;
  for (int c : occ_[v]) {
    auto& st = state_[c];
    bool found_pos = false, found_neg = false;
    for (int l : clauses_[c]) {
      if (l == v) found_pos = true;
      if (l == -v) found_neg = true;
    }
    if ((val > 0 && found_pos) || (val < 0 && found_neg)) {
      if (st.sat_count++ == 0) --active_clauses_;
    }
    if ((val > 0 && found_neg) || (val < 0 && found_pos)) {
      --st.nonfalse;
      if (st.sat_count == 0) {
        if (st.nonfalse == 0) ok = false;
        if (st.nonfalse == 1) prop_queue_.push_back(c);
      }
    }
  }
  return ok;
}

void ExactCounter::undo_to(size_t mark) {
  while (trail_.size() > mark) {
    int lit = trail_.back();
    trail_.pop_back();
    int v = std::abs(lit);
    int8_t val = lit > 0 ? 1 : -1;
    for (int c : occ_[v]) {
      auto& st = state_[c];
      bool found_pos = false, found_neg = false;
      for (int l : clauses_[c]) {
        if (l == v) found_pos = true;
        if (l == -v) found_neg = true;
      }
      if ((val > 0 && found_pos) || (val < 0 && found_neg)) {
        if (--st.sat_count == 0) ++active_clauses_;
      }
      if ((val > 0 && found_neg) || (val < 0 && found_pos)) ++st.nonfalse;
    }
    assign_[v] = 0;
    if (is_sampling_[v]) ++unassigned_sampling_;
  }
  prop_queue_.clear();
}

bool ExactCounter::propagate() {
  while (!prop_queue_.empty()) {
    int c = prop_queue_.back();
    prop_queue_.pop_back();
    auto& st = state_[c];
    if (st.sat_count > 0 || st.nonfalse != 1) continue;
    int unit = 0;
    for (int l : clauses_[c]) {
      if (assign_[std::abs(l)] == 0) {
        unit = l;
        break;
      }
    }
    if (unit == 0) continue;  // became false/sat meanwhile
    if (!assign(unit)) return false;
  }
  return true;
}

Int ExactCounter::count_projected(const std::vector<int>& sampling_set,
                                  long deadline_ms) {
  is_sampling_.assign(num_vars_ + 1, 0);
  unassigned_sampling_ = 0;
  for (int v : sampling_set) {
    if (v < 1 || v > num_vars_)
      throw ValidationError("sampling variable out of range");
    if (!is_sampling_[v]) {
      is_sampling_[v] = 1;
      ++unassigned_sampling_;
    }
  }
  deadline_ms_ = deadline_ms;
  start_ms_ = now_ms();
  nodes_ = 0;

  // top-level units
  for (size_t c = 0; c < clauses_.size(); ++c) {
    if (clauses_[c].empty()) return 0;
    if (clauses_[c].size() == 1) prop_queue_.push_back(static_cast<int>(c));
  }
  Int result = 0;
  if (propagate()) result = count_rec();
  undo_to(0);
  return result;
}

Int ExactCounter::count_rec() {
  if (deadline_ms_ > 0 && (++nodes_ & 1023) == 0 &&
      now_ms() - start_ms_ > deadline_ms_)
    throw ResourceLimit("exact counter time cap exceeded");

  // smallest unassigned sampling variable in an unsatisfied clause
  int branch = 0;
  if (active_clauses_ > 0) {
    for (size_t c = 0; c < clauses_.size(); ++c) {
      if (state_[c].sat_count > 0) continue;
      for (int l : clauses_[c]) {
        int v = std::abs(l);
        if (assign_[v] == 0 && is_sampling_[v] && (branch == 0 || v < branch))
          branch = v;
      }
    }
  }

  if (branch == 0) {
    // remaining sampling variables are unconstrained
    if (active_clauses_ > 0 && !extension_exists()) return 0;
    Int r = 1;
    mpz_mul_2exp(r.get_mpz_t(), r.get_mpz_t(), unassigned_sampling_);
    return r;
  }

  Int total = 0;
  for (int sign = 1; sign >= -1; sign -= 2) {
    size_t mark = trail_.size();
    if (assign(sign * branch) && propagate()) total += count_rec();
    undo_to(mark);
  }
  return total;
}

bool ExactCounter::extension_exists() {
  if (active_clauses_ == 0) return true;
  if (deadline_ms_ > 0 && (++nodes_ & 1023) == 0 &&
      now_ms() - start_ms_ > deadline_ms_)
    throw ResourceLimit("exact counter time cap exceeded");
  int branch = 0;
  for (size_t c = 0; c < clauses_.size() && branch == 0; ++c) {
    if (state_[c].sat_count > 0) continue;
    for (int l : clauses_[c]) {
      if (assign_[std::abs(l)] == 0) {
        branch = std::abs(l);
        break;
      }
    }
  }
  if (branch == 0) return false;  // an active clause with no free literal
  for (int sign = 1; sign >= -1; sign -= 2) {
    size_t mark = trail_.size();
    bool ok = assign(sign * branch) && propagate() && extension_exists();
    undo_to(mark);
    if (ok) return true;
  }
  return false;
}

}  // namespace wfomc
