// Copyright (c) 2026 the approxwfomc authors
// Distributed under the MIT license (see LICENSE)

#include "wfomc/engine.hpp"

#include <chrono>
#include <mutex>
#include <queue>
#include <thread>

namespace wfomc {

namespace {
long now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}
}  // namespace

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::tolerance_met: return "tolerance_met";
    case StopReason::queue_exhausted: return "queue_exhausted";
    case StopReason::budget_exhausted: return "budget_exhausted";
    case StopReason::resource_limit: return "resource_limit";
  }
  return "?";
}

Int term_count(const Sentence& s, int domain_size) {
  Int m = 1;
  for (int pid : s.weighted_predicates())
    m *= ground_count(s.pred(pid), domain_size) + 1;
  return m;
}

Int engine_max_calls(const Sentence& s, int domain_size) {
  return 2 * term_count(s, domain_size);
}

std::vector<CardinalityBox> split_box(const CardinalityBox& box) {
  if (box.all_singleton()) return {};
  std::vector<int> keys;
  std::vector<std::vector<std::pair<Int, Int>>> choices;
  for (const auto& [pid, lu] : box.bounds) {
    keys.push_back(pid);
    const auto& [l, u] = lu;
    if (l == u) {
      choices.push_back({{l, u}});
    } else {
      Int m = (l + u) / 2;  // floor, since l, u >= 0
      choices.push_back({{l, m}, {m + 1, u}});
    }
  }
  std::vector<CardinalityBox> out;
  std::vector<size_t> pick(keys.size(), 0);
  while (true) {
    CardinalityBox child;
    for (size_t i = 0; i < keys.size(); ++i)
      child.bounds[keys[i]] = choices[i][pick[i]];
    out.push_back(std::move(child));
    // advance, last key fastest
    int pos = static_cast<int>(keys.size()) - 1;
    while (pos >= 0 && pick[pos] + 1 >= choices[pos].size()) {
      pick[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++pick[pos];
  }
  return out;
}

std::pair<Rat, Rat> region_weight_bounds(const Sentence& s,
                                         const CardinalityBox& box,
                                         int domain_size) {
  Rat tmin = 1, tmax = 1;
  for (const auto& [pid, lu] : box.bounds) {
    const Predicate& p = s.pred(pid);
    if (p.w < 0 || p.wbar < 0)
      throw ValidationError("negative weight in region bound computation");
    Int xi = ground_count(p, domain_size);
    // explicit Rat return: gmpxx expression templates must not outlive the
    // temporaries they reference
    auto f = [&](const Int& n) -> Rat {
      return qpow(p.w, n) * qpow(p.wbar, xi - n);
    };
    Rat fl = f(lu.first), fu = f(lu.second);
    tmin *= std::min(fl, fu);
    tmax *= std::max(fl, fu);
  }
  return {tmin, tmax};
}

namespace {

struct RegionOrder {
  // max-heap on |ub - lb|; FIFO on ties
  bool operator()(const Region& a, const Region& b) const {
    Rat ga = a.ub - a.lb, gb = b.ub - b.lb;
    if (ga != gb) return ga < gb;
    return a.insertion_index > b.insertion_index;
  }
};

struct EngineState {
  const Sentence& s;
  int domain_size;
  FomcOracle& oracle;
  GroundProblem gp;
  Rat lb = 0, ub = 0;
  std::priority_queue<Region, std::vector<Region>, RegionOrder> queue;
  long next_index = 0;
  long iterations = 0;
  long t0 = now_ms();

  Int fomc(const CardinalityBox& box) {
    VarAllocator alloc(gp.num_vars);
    auto enc = encode_box(s, gp, box, alloc);
    std::vector<std::vector<int>> clauses = gp.clauses;
    for (auto& cl : enc.clauses) clauses.push_back(std::move(cl));
    return oracle.count(alloc.high_water(), clauses, gp.sampling_set).count;
  }

  Rat delta_consumed() const {
    auto* lg = const_cast<FomcOracle&>(oracle).ledger();
    return lg ? lg->consumed() : Rat(0);
  }

  ProgressRecord record() const {
    ProgressRecord pr;
    pr.iter = iterations;
    pr.lb = lb;
    pr.ub = ub;
    if (lb > 0) pr.ratio = ub / lb;
    pr.oracle_calls = oracle.calls();
    pr.delta_consumed = delta_consumed();
    pr.elapsed_ms = now_ms() - t0;
    return pr;
  }
};

}  // namespace

BoundsReport run(const Sentence& s, int domain_size, FomcOracle& oracle,
                 const EngineConfig& config) {
  if (config.tau <= 0) throw ValidationError("tau must be > 0");
  for (const auto& p : s.predicates)
    if (p.role != PredRole::skolem && (p.w < 0 || p.wbar < 0))
      throw ValidationError("negative weight on non-skolem predicate");

  EngineState st{s, domain_size, oracle,
                 ground(s, domain_size, config.max_ground_clauses)};
  BoundsReport rep;
  auto emit = [&]() {
    ProgressRecord pr = st.record();
    rep.trace.push_back(pr);
    if (config.progress) config.progress(pr);
  };
  auto finish = [&](StopReason why) {
    rep.lb = st.lb;
    rep.ub = st.ub;
    if (st.lb > 0) rep.ratio = st.ub / st.lb;
    rep.oracle_calls = oracle.calls();
    rep.delta_consumed = st.delta_consumed();
    rep.iterations = st.iterations;
    rep.terminated_by = why;
    if (oracle.config().mode == OracleMode::external) {
      auto [plb, pub] = pac_adjust(rep.lb, rep.ub, oracle.config().epsilon);
      rep.pac_lb = plb;
      rep.pac_ub = pub;
    }
    return rep;
  };

  // Initialization: FOMC of the unconstrained problem scaled by the
  // all-true/all-false weight extremes.
  CardinalityBox full;
  for (int pid : s.weighted_predicates())
    full.bounds[pid] = {Int(0), ground_count(s.pred(pid), domain_size)};

  Int mc0 = st.fomc(full);  // initialization failure propagates
  st.lb = mc0;
  st.ub = mc0;
  for (int pid : s.weighted_predicates()) {
    const Predicate& p = s.pred(pid);
    Int xi = ground_count(p, domain_size);
    Rat wp = qpow(p.w, xi), wn = qpow(p.wbar, xi);
    st.lb *= std::min(wp, wn);
    st.ub *= std::max(wp, wn);
  }
  if (mc0 > 0)
    st.queue.push(Region{full, st.lb, st.ub, st.next_index++});
  emit();

  // ratio test in exact rationals; lb == 0 counts as unbounded ratio
  auto tolerance_met = [&]() {
    return st.lb > 0 && st.ub < st.lb * (1 + config.tau);
  };

  while (true) {
    if (tolerance_met()) return finish(StopReason::tolerance_met);
    if (st.queue.empty()) return finish(StopReason::queue_exhausted);
    if (config.time_limit_ms > 0 && now_ms() - st.t0 > config.time_limit_ms)
      return finish(StopReason::resource_limit);

    Region region = st.queue.top();
    st.queue.pop();
    auto children = split_box(region.box);
    if (children.empty()) continue;  // cannot be decomposed further

    // Collect all child counts before touching the bounds, so a failed call
    // leaves the parent's contribution (and thus sound bounds) in place.
    std::vector<std::pair<Region, Int>> results(children.size());
    try {
      auto work = [&](size_t i) {
        auto [tmin, tmax] = region_weight_bounds(s, children[i], domain_size);
        Int mc = st.fomc(children[i]);
        results[i] = {Region{children[i], tmin * Rat(mc), tmax * Rat(mc), 0},
                      std::move(mc)};
      };
      if (config.oracle_threads > 1 && children.size() > 1) {
        std::exception_ptr error;
        std::mutex error_mutex;
        size_t batch = static_cast<size_t>(config.oracle_threads);
        for (size_t start = 0; start < children.size(); start += batch) {
          std::vector<std::thread> pool;
          for (size_t i = start;
               i < children.size() && i < start + batch; ++i) {
            pool.emplace_back([&, i]() {
              try {
                work(i);
              } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
              }
            });
          }
          for (auto& t : pool) t.join();
          if (error) std::rethrow_exception(error);
        }
      } else {
        for (size_t i = 0; i < children.size(); ++i) work(i);
      }
    } catch (const BudgetExhausted&) {
      return finish(StopReason::budget_exhausted);
    } catch (const OracleError&) {
      return finish(StopReason::resource_limit);
    } catch (const ResourceLimit&) {
      return finish(StopReason::resource_limit);
    }

    st.lb -= region.lb;
    st.ub -= region.ub;
    for (auto& [child, mc] : results) {
      st.lb += child.lb;
      st.ub += child.ub;
      if (mc > 0) {
        child.insertion_index = st.next_index++;
        st.queue.push(std::move(child));
      }
    }
    ++st.iterations;
    emit();
  }
}

DecomposeResult decompose_exact(const Sentence& s, int domain_size,
                                FomcOracle& oracle, const Int& max_terms) {
  GroundProblem gp = ground(s, domain_size);
  auto weighted = s.weighted_predicates();
  Int m = term_count(s, domain_size);
  if (m > max_terms)
    throw ResourceLimit("decomposition has M(phi,d) = " + m.get_str() +
                        " terms, above the cap of " + max_terms.get_str());

  std::vector<Int> xi;
  for (int pid : weighted) xi.push_back(ground_count(s.pred(pid), domain_size));

  DecomposeResult res{Rat(0), 0, m};
  std::vector<Int> counts(weighted.size(), 0);
  while (true) {
    CardinalityBox box;
    Rat weight = 1;
    for (size_t i = 0; i < weighted.size(); ++i) {
      box.bounds[weighted[i]] = {counts[i], counts[i]};
      const Predicate& p = s.pred(weighted[i]);
      weight *= qpow(p.w, counts[i]) * qpow(p.wbar, xi[i] - counts[i]);
    }
    VarAllocator alloc(gp.num_vars);
    auto enc = encode_box(s, gp, box, alloc);
    std::vector<std::vector<int>> clauses = gp.clauses;
    for (auto& cl : enc.clauses) clauses.push_back(std::move(cl));
    auto r = oracle.count(alloc.high_water(), clauses, gp.sampling_set);
    ++res.oracle_calls;
    res.value += weight * Rat(r.count);

    // next tuple, last dimension fastest
    int pos = static_cast<int>(counts.size()) - 1;
    while (pos >= 0 && counts[pos] == xi[pos]) {
      counts[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++counts[pos];
  }
  return res;
}

std::pair<Rat, Rat> pac_adjust(const Rat& lb, const Rat& ub,
                               const Rat& epsilon) {
  return {lb / (1 + epsilon), ub * (1 + epsilon)};
}

}  // namespace wfomc
