// Copyright (c) 2026 the approxwfomc authors
// Distributed under the MIT license (see LICENSE)

#include "wfomc/cardenc.hpp"

#include <algorithm>

namespace wfomc {

namespace {

// Merges two sorted unary counters a, b into a fresh one of size |a|+|b|.
std::vector<int> merge_counters(const std::vector<int>& a,
                                const std::vector<int>& b,
                                VarAllocator& alloc, TotalizerEncoding& enc) {
  const int na = static_cast<int>(a.size());
  const int nb = static_cast<int>(b.size());
  const int n = na + nb;
  int base = alloc.reserve(n);
  std::vector<int> r(n);
  for (int i = 0; i < n; ++i) {
    r[i] = base + i;
    enc.aux_vars.push_back(r[i]);
  }

  // r_sigma <-> (#true in a) + (#true in b) >= sigma, with a_0/b_0 = true
  // and a_{na+1}/b_{nb+1} = false left implicit.
  for (int alpha = 0; alpha <= na; ++alpha) {
    for (int beta = 0; beta <= nb; ++beta) {
      int sigma = alpha + beta;
      if (sigma >= 1) {
        std::vector<int> cl;
        if (alpha > 0) cl.push_back(-a[alpha - 1]);
        if (beta > 0) cl.push_back(-b[beta - 1]);
        cl.push_back(r[sigma - 1]);
        enc.clauses.push_back(std::move(cl));
      }
      if (sigma + 1 <= n) {
        std::vector<int> cl;
        if (alpha + 1 <= na) cl.push_back(a[alpha]);
        if (beta + 1 <= nb) cl.push_back(b[beta]);
        cl.push_back(-r[sigma]);
        enc.clauses.push_back(std::move(cl));
      }
    }
  }
  return r;
}

std::vector<int> build_tree(const std::vector<int>& inputs, int lo, int hi,
                            VarAllocator& alloc, TotalizerEncoding& enc) {
  if (hi - lo == 1) return {inputs[lo]};
  int mid = lo + (hi - lo) / 2;
  auto left = build_tree(inputs, lo, mid, alloc, enc);
  auto right = build_tree(inputs, mid, hi, alloc, enc);
  return merge_counters(left, right, alloc, enc);
}

}  // namespace

TotalizerEncoding encode_totalizer(std::vector<int> input_vars,
                                   VarAllocator& alloc) {
  if (input_vars.empty())
    throw ValidationError("totalizer needs at least one input variable");
  std::sort(input_vars.begin(), input_vars.end());
  TotalizerEncoding enc;
  enc.counter_outputs =
      build_tree(input_vars, 0, static_cast<int>(input_vars.size()), alloc, enc);
  return enc;
}

std::vector<std::vector<int>> encode_comparator(
    const std::vector<int>& counter_outputs, const Int& lo, const Int& hi) {
  const Int n = static_cast<long>(counter_outputs.size());
  if (lo < 0 || lo > hi || hi > n)
    throw ValidationError("bad cardinality interval");
  std::vector<std::vector<int>> clauses;
  if (lo >= 1)
    clauses.push_back({counter_outputs[lo.get_ui() - 1]});
  if (hi < n)
    clauses.push_back({-counter_outputs[hi.get_ui()]});
  return clauses;
}

BoxEncoding encode_box(const Sentence& s, const GroundProblem& gp,
                       const CardinalityBox& box, VarAllocator& alloc) {
  BoxEncoding out;
  for (const auto& [pid, lu] : box.bounds) {
    const auto& [lo, hi] = lu;
    Int xi = ground_count(s.pred(pid), gp.domain_size);
    if (lo < 0 || lo > hi || hi > xi)
      throw ValidationError("cardinality interval out of range for '" +
                            s.pred(pid).name + "'");
    if (lo == 0 && hi == xi) continue;  // vacuous

    std::vector<int> inputs;
    for (int v = gp.pred_offset[pid]; v < gp.pred_offset[pid + 1]; ++v)
      inputs.push_back(v + 1);
    auto tot = encode_totalizer(inputs, alloc);
    for (auto& cl : tot.clauses) out.clauses.push_back(std::move(cl));
    for (int v : tot.aux_vars) out.aux_vars.push_back(v);
    for (auto& cl : encode_comparator(tot.counter_outputs, lo, hi))
      out.clauses.push_back(std::move(cl));
  }
  return out;
}

}  // namespace wfomc
