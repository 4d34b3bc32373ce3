#include "exactcache/focused.hpp"

#include <deque>
#include <set>
#include <sstream>

namespace exactcache {

namespace {

std::uint64_t bit(std::size_t slot) { return std::uint64_t{1} << slot; }

std::uint64_t universe_mask(std::size_t n) { return n >= 64 ? ~std::uint64_t{0} : bit(n) - 1; }

void require_small_universe(std::size_t n) {
  if (n > kMaxFocusedUniverse)
    throw std::length_error("focused model supports at most " + std::to_string(kMaxFocusedUniverse) +
                            " blocks per cache set, got " + std::to_string(n));
}

[[noreturn]] void exceed(std::size_t budget) {
  throw BudgetError(BudgetError::Which::ModelCheck, budget,
                    "model-checking budget exceeded: more than " + std::to_string(budget) +
                        " (vertex, focused state) pairs (raise --budget-mc)");
}

}  // namespace

bool is_valid(const FocusedState& s, std::size_t focus, unsigned k) {
  if (!s.cached) return s.younger == 0;
  return (s.younger & bit(focus)) == 0 && s.younger_count() < k;
}

FocusedState alpha_focus(const ConcreteCacheState& q, std::size_t focus, unsigned k) {
  require_small_universe(q.ages.size());
  const unsigned focus_age = q.ages[focus];
  if (focus_age >= k) return FocusedState::evicted();
  std::uint64_t mask = 0;
  for (std::size_t i = 0; i < q.ages.size(); ++i)
    if (q.ages[i] < focus_age) mask |= bit(i);
  return FocusedState::with_younger(mask);
}

FocusedState update_focus(const FocusedState& s, std::size_t slot, std::size_t focus, unsigned k) {
  if (slot == focus) return FocusedState::most_recent();
  if (s.is_epsilon()) return FocusedState::evicted();
  const FocusedState grown = FocusedState::with_younger(s.younger | bit(slot));
  if (grown.younger_count() < k) return grown;
  return FocusedState::evicted();
}

FocusedModel unsimplified_model(const ProjectedCfg& g, const BlockUniverse& universe,
                                std::size_t focus) {
  require_small_universe(universe.size());
  const std::uint64_t others = universe_mask(universe.size()) & ~bit(focus);
  return FocusedModel{g, focus, std::vector<std::uint64_t>(g.num_vertices(), others),
                      universe.edge_slots(g), 0};
}

FocusedModel simplify_for(const ProjectedCfg& g, const BlockUniverse& universe, std::size_t focus,
                          const FixpointResult<MayState>& may, unsigned k) {
  require_small_universe(universe.size());
  FocusedModel model{g, focus, std::vector<std::uint64_t>(g.num_vertices(), 0),
                     universe.edge_slots(g), 0};
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    const auto& state = may.at.at(v);
    if (!state) continue;
    for (std::size_t i = 0; i < universe.size(); ++i)
      if (i != focus && state->bounds[i] < k) model.live[v] |= bit(i);
  }
  for (std::size_t i = 0; i < model.graph.edges.size(); ++i) {
    auto& e = model.graph.edges[i];
    if (!model.slots[i] || *model.slots[i] == focus) continue;
    const auto& at_source = may.at.at(e.from);
    // Where the focus is never cached every other access leaves it evicted.
    if (!at_source || at_source->bounds[focus] == k) {
      e.block.reset();
      e.access.reset();
      model.slots[i].reset();
      ++model.dropped_edges;
    }
  }
  return model;
}

std::vector<FocusedState> focused_initial(InitMode mode, std::size_t universe_size,
                                          std::size_t focus, unsigned k,
                                          std::uint64_t live_at_entry, std::size_t budget) {
  require_small_universe(universe_size);
  std::vector<FocusedState> out{FocusedState::evicted()};
  if (mode == InitMode::Empty) return out;

  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < universe_size; ++i)
    if (i != focus && (live_at_entry & bit(i))) candidates.push_back(i);

  // Every younger set of fewer than k candidates.
  std::function<void(std::size_t, std::uint64_t, unsigned)> grow = [&](std::size_t from,
                                                                       std::uint64_t mask,
                                                                       unsigned size) {
    out.push_back(FocusedState::with_younger(mask));
    if (out.size() > budget) exceed(budget);
    if (size + 1 >= k) return;
    for (std::size_t j = from; j < candidates.size(); ++j) grow(j + 1, mask | bit(candidates[j]), size + 1);
  };
  grow(0, 0, 0);
  std::sort(out.begin(), out.end());
  return out;
}

FocusedReach focused_reach(const FocusedModel& model, const std::vector<FocusedState>& init,
                           unsigned k, std::size_t budget, const EarlyExit& early_exit) {
  const ProjectedCfg& g = model.graph;
  FocusedReach reach;
  reach.model = model;

  std::vector<std::set<FocusedState>> seen(g.num_vertices());
  std::vector<std::vector<std::size_t>> out_edges(g.num_vertices());
  for (std::size_t i = 0; i < g.edges.size(); ++i) out_edges[g.edges[i].from].push_back(i);

  std::deque<std::pair<VertexId, FocusedState>> work;
  auto discover = [&](VertexId v, FocusedState s) {
    if (!seen[v].insert(s).second) return false;
    if (++reach.states_explored > budget) exceed(budget);
    work.emplace_back(v, s);
    return early_exit && early_exit(v, s);
  };

  bool stop = false;
  for (const auto& s : init) {
    if (!is_valid(s, model.focus, k)) throw std::invalid_argument("invalid initial focused state");
    FocusedState filtered = s;
    filtered.younger &= model.live[g.entry];
    if (discover(g.entry, filtered)) {
      stop = true;
      break;
    }
  }
  while (!stop && !work.empty()) {
    auto [v, s] = work.front();
    work.pop_front();
    for (std::size_t ei : out_edges[v]) {
      const auto& e = g.edges[ei];
      FocusedState next = s;
      if (model.slots[ei]) next = update_focus(s, *model.slots[ei], model.focus, k);
      next.younger &= model.live[e.to];
      if (discover(e.to, next)) {
        stop = true;
        break;
      }
    }
  }
  reach.partial = stop;
  reach.at.resize(g.num_vertices());
  for (VertexId v = 0; v < g.num_vertices(); ++v) reach.at[v].assign(seen[v].begin(), seen[v].end());
  return reach;
}

McVerdict check_access(const FocusedReach& reach, const AccessId& access, bool exists_hit,
                       bool exists_miss) {
  McVerdict verdict;
  verdict.access = access;
  verdict.states_explored = reach.states_explored;
  verdict.early_exit = reach.partial;

  bool some_evicted = false;
  bool some_cached = false;
  for (const auto& s : reach.at.at(access.source)) (s.is_epsilon() ? some_evicted : some_cached) = true;
  const bool always_hit = !some_evicted;
  const bool always_miss = !some_cached;

  if (exists_hit) {
    verdict.checked_always_hit = true;
    if (always_hit) verdict.result = Verdict::AlwaysHit;
  } else if (exists_miss) {
    verdict.checked_always_miss = true;
    if (always_miss) verdict.result = Verdict::AlwaysMiss;
  } else {
    verdict.checked_always_hit = true;
    if (always_hit) {
      verdict.result = Verdict::AlwaysHit;
    } else {
      verdict.checked_always_miss = true;
      if (always_miss) verdict.result = Verdict::AlwaysMiss;
    }
  }
  return verdict;
}

}  // namespace exactcache
