#pragma once

// Independent reference models used by the test suites. Nothing here calls
// the library's analyses; the cache is simulated as recency-ordered block
// lists per cache set.

#include <algorithm>
#include <deque>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "exactcache/cfg.hpp"
#include "exactcache/common.hpp"

namespace exactcache::testing {

/// Most recently used block first; at most k entries.
using LruList = std::vector<std::uint64_t>;

inline LruList lru_access(LruList list, std::uint64_t block, unsigned k) {
  auto it = std::find(list.begin(), list.end(), block);
  if (it != list.end()) list.erase(it);
  list.insert(list.begin(), block);
  if (list.size() > k) list.pop_back();
  return list;
}

inline bool lru_contains(const LruList& list, std::uint64_t block) {
  return std::find(list.begin(), list.end(), block) != list.end();
}

/// Every ordered selection of at most k distinct elements of `blocks`.
inline std::vector<LruList> all_lru_lists(const std::vector<std::uint64_t>& blocks, unsigned k) {
  std::vector<LruList> out{{}};
  for (std::size_t len = 1; len <= std::min<std::size_t>(k, blocks.size()); ++len) {
    std::vector<std::uint64_t> pick = blocks;
    std::sort(pick.begin(), pick.end());
    std::set<LruList> seen;
    do {
      LruList l(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(len));
      if (seen.insert(l).second) out.push_back(l);
    } while (std::next_permutation(pick.begin(), pick.end()));
  }
  return out;
}

/// One LRU list per cache set, indexed by set.
using MultiCache = std::vector<LruList>;

/// Exact hit/miss verdict of every access of `g`, from reachability over
/// (vertex, whole cache) pairs. In unknown mode each set starts with any
/// arrangement of the program's own blocks of that set. Unreachable accesses
/// are reported as AlwaysHit.
inline std::map<AccessId, Verdict> brute_force_verdicts(const Cfg& g, const CacheConfig& config,
                                                        InitMode init) {
  const unsigned k = config.associativity;
  std::map<std::uint64_t, std::vector<std::uint64_t>> blocks_by_set;
  for (const auto& e : g.edges())
    if (e.block) {
      auto& v = blocks_by_set[set_of(*e.block, config)];
      if (std::find(v.begin(), v.end(), e.block->index) == v.end()) v.push_back(e.block->index);
    }
  std::vector<std::uint64_t> set_ids;
  for (auto& [s, _] : blocks_by_set) set_ids.push_back(s);
  auto slot_of_set = [&](std::uint64_t s) {
    return static_cast<std::size_t>(std::find(set_ids.begin(), set_ids.end(), s) - set_ids.begin());
  };

  std::vector<MultiCache> init_states{MultiCache(set_ids.size())};
  if (init == InitMode::Unknown) {
    for (std::size_t i = 0; i < set_ids.size(); ++i) {
      std::vector<MultiCache> next;
      for (const auto& partial : init_states)
        for (const auto& l : all_lru_lists(blocks_by_set[set_ids[i]], k)) {
          MultiCache c = partial;
          c[i] = l;
          next.push_back(c);
        }
      init_states = std::move(next);
    }
  }

  std::vector<std::set<MultiCache>> at(g.num_vertices());
  std::deque<std::pair<VertexId, MultiCache>> work;
  for (const auto& c : init_states)
    if (at[g.entry()].insert(c).second) work.emplace_back(g.entry(), c);
  while (!work.empty()) {
    auto [v, c] = work.front();
    work.pop_front();
    for (const auto& e : g.edges()) {
      if (e.from != v) continue;
      MultiCache next = c;
      if (e.block) {
        const std::size_t s = slot_of_set(set_of(*e.block, config));
        next[s] = lru_access(next[s], e.block->index, k);
      }
      if (at[e.to].insert(next).second) work.emplace_back(e.to, std::move(next));
    }
  }

  std::map<AccessId, Verdict> out;
  for (std::size_t i = 0; i < g.edges().size(); ++i) {
    const auto& id = g.access_ids()[i];
    if (!id) continue;
    const std::size_t s = slot_of_set(set_of(id->block, config));
    bool hit = false, miss = false;
    for (const auto& c : at[id->source]) (lru_contains(c[s], id->block.index) ? hit : miss) = true;
    out[*id] = hit && miss ? Verdict::DefinitelyUnknown : miss ? Verdict::AlwaysMiss : Verdict::AlwaysHit;
  }
  return out;
}

/// Unstructured random graph: arbitrary edges, parallel edges, self-loops,
/// irreducible cycles and unreachable vertices all occur.
inline Cfg random_cfg(std::mt19937_64& rng, std::size_t vertices, std::size_t blocks,
                      std::size_t edges, double access_probability, std::uint64_t block_size = 8) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < vertices; ++i) names.push_back("v" + std::to_string(i));
  std::uniform_int_distribution<std::size_t> pick_v(0, vertices - 1);
  std::uniform_int_distribution<std::uint64_t> pick_b(0, blocks - 1);
  std::bernoulli_distribution accesses(access_probability);
  std::vector<Edge> es;
  // A spine keeps most vertices reachable.
  for (std::size_t i = 0; i + 1 < vertices && es.size() < edges; ++i) {
    Edge e;
    e.from = i;
    e.to = i + 1;
    if (accesses(rng)) {
      e.address = pick_b(rng) * block_size;
      e.block = MemoryBlock{*e.address / block_size};
    }
    es.push_back(e);
  }
  while (es.size() < edges) {
    Edge e;
    e.from = pick_v(rng);
    e.to = pick_v(rng);
    if (accesses(rng)) {
      e.address = pick_b(rng) * block_size;
      e.block = MemoryBlock{*e.address / block_size};
    }
    es.push_back(e);
  }
  return Cfg(names, 0, es, "random");
}

}  // namespace exactcache::testing
