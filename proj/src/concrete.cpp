#include "exactcache/concrete.hpp"

#include <deque>
#include <string>

namespace exactcache {

ConcreteCacheState empty_cache(std::size_t universe_size, unsigned k) {
  return ConcreteCacheState{std::vector<std::uint8_t>(universe_size, static_cast<std::uint8_t>(k))};
}

bool is_valid(const ConcreteCacheState& q, unsigned k) {
  std::vector<int> seen(k, 0);
  std::size_t cached = 0;
  for (auto age : q.ages) {
    if (age > k) return false;
    if (age < k) {
      if (seen[age]++) return false;
      ++cached;
    }
  }
  for (std::size_t a = 0; a < cached; ++a)
    if (!seen[a]) return false;
  return true;
}

ConcreteCacheState update(const ConcreteCacheState& q, std::size_t slot, unsigned k) {
  ConcreteCacheState r = q;
  const unsigned accessed = q.ages[slot];
  for (std::size_t i = 0; i < q.ages.size(); ++i) {
    const unsigned age = q.ages[i];
    if (i == slot)
      r.ages[i] = 0;
    else if (age >= accessed)
      r.ages[i] = static_cast<std::uint8_t>(age);
    else if (age < k)
      r.ages[i] = static_cast<std::uint8_t>(age + 1);
    else
      r.ages[i] = static_cast<std::uint8_t>(k);  // unreachable for valid q
  }
  return r;
}

namespace {

// Number of valid states: sum over c of n!/(n-c)!, saturating at limit + 1.
std::size_t count_valid_states(std::size_t n, unsigned k, std::size_t limit) {
  std::size_t total = 0;
  std::size_t arrangements = 1;
  for (std::size_t c = 0; c <= std::min<std::size_t>(n, k); ++c) {
    if (c > 0) {
      const std::size_t factor = n - c + 1;
      if (arrangements > (limit + 1) / factor) return limit + 1;
      arrangements *= factor;
    }
    total += arrangements;
    if (total > limit) return limit + 1;
  }
  return total;
}

void enumerate_states(ConcreteCacheState& q, std::size_t next_age, unsigned k, StateSet& out) {
  out.insert(q);
  if (next_age >= k) return;
  for (std::size_t i = 0; i < q.ages.size(); ++i) {
    if (q.ages[i] != k) continue;
    q.ages[i] = static_cast<std::uint8_t>(next_age);
    enumerate_states(q, next_age + 1, k, out);
    q.ages[i] = static_cast<std::uint8_t>(k);
  }
}

}  // namespace

StateSet all_valid_states(std::size_t universe_size, unsigned k, std::size_t budget) {
  if (count_valid_states(universe_size, k, budget) > budget)
    throw BudgetError(BudgetError::Which::Oracle, budget,
                      "oracle capacity exceeded: more than " + std::to_string(budget) +
                          " initial cache states (raise --budget-oracle)");
  StateSet out;
  ConcreteCacheState q = empty_cache(universe_size, k);
  enumerate_states(q, 0, k, out);
  return out;
}

StateSet initial_states(InitMode mode, std::size_t universe_size, unsigned k, std::size_t budget) {
  if (mode == InitMode::Empty) return StateSet{empty_cache(universe_size, k)};
  return all_valid_states(universe_size, k, budget);
}

CollectingSemantics collecting_semantics(const ProjectedCfg& g, const BlockUniverse& universe,
                                         const StateSet& init, unsigned k, std::size_t budget) {
  CollectingSemantics sem;
  sem.universe = universe;
  sem.associativity = k;
  sem.at.assign(g.num_vertices(), {});

  const auto slots = universe.edge_slots(g);
  std::vector<std::vector<std::size_t>> out_edges(g.num_vertices());
  for (std::size_t i = 0; i < g.edges.size(); ++i) out_edges[g.edges[i].from].push_back(i);

  auto exceed = [&] {
    throw BudgetError(BudgetError::Which::Oracle, budget,
                      "oracle capacity exceeded: more than " + std::to_string(budget) +
                          " (vertex, state) pairs (raise --budget-oracle)");
  };

  std::deque<std::pair<VertexId, ConcreteCacheState>> work;
  for (const auto& q : init) {
    if (q.ages.size() != universe.size())
      throw std::invalid_argument("initial state does not match the block universe");
    if (sem.at[g.entry].insert(q).second) {
      if (++sem.pairs > budget) exceed();
      work.emplace_back(g.entry, q);
    }
  }
  while (!work.empty()) {
    auto [v, q] = std::move(work.front());
    work.pop_front();
    for (std::size_t ei : out_edges[v]) {
      const auto& e = g.edges[ei];
      ConcreteCacheState next = slots[ei] ? update(q, *slots[ei], k) : q;
      if (sem.at[e.to].insert(next).second) {
        if (++sem.pairs > budget) exceed();
        work.emplace_back(e.to, std::move(next));
      }
    }
  }
  return sem;
}

Verdict exact_classify(const CollectingSemantics& sem, const AccessId& access) {
  const auto slot = sem.universe.slot_of(access.block);
  if (!slot) throw std::invalid_argument("access block outside the oracle universe");
  bool some_hit = false;
  bool some_miss = false;
  for (const auto& q : sem.at.at(access.source)) {
    if (q.ages[*slot] < sem.associativity)
      some_hit = true;
    else
      some_miss = true;
  }
  if (some_hit && some_miss) return Verdict::DefinitelyUnknown;
  if (some_miss) return Verdict::AlwaysMiss;
  return Verdict::AlwaysHit;
}

}  // namespace exactcache
