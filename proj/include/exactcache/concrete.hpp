#pragma once

// Ground-truth LRU semantics and the collecting-semantics oracle.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <set>
#include <vector>

#include "exactcache/common.hpp"

namespace exactcache {

/// Ages of every universe block, truncated at the associativity k
/// (age k means "not cached").
struct ConcreteCacheState {
  std::vector<std::uint8_t> ages;

  auto operator<=>(const ConcreteCacheState&) const = default;
};

using StateSet = std::set<ConcreteCacheState>;

inline constexpr std::size_t kDefaultOracleBudget = 1'000'000;

ConcreteCacheState empty_cache(std::size_t universe_size, unsigned k);

/// At most k cached blocks, whose ages are exactly 0..c-1.
bool is_valid(const ConcreteCacheState& q, unsigned k);

/// LRU update for an access to the block in `slot`.
ConcreteCacheState update(const ConcreteCacheState& q, std::size_t slot, unsigned k);

/// Every valid state over `universe_size` blocks. Throws BudgetError when
/// there would be more than `budget` of them.
StateSet all_valid_states(std::size_t universe_size, unsigned k,
                          std::size_t budget = kDefaultOracleBudget);

StateSet initial_states(InitMode mode, std::size_t universe_size, unsigned k,
                        std::size_t budget = kDefaultOracleBudget);

struct CollectingSemantics {
  BlockUniverse universe;
  unsigned associativity = 0;
  std::vector<StateSet> at;  // indexed by vertex; empty = unreachable
  std::size_t pairs = 0;     // total (vertex, state) pairs
};

/// Least fixpoint of the set-of-states equations, seeded with `init` at the
/// entry. Throws BudgetError(Oracle) once more than `budget` pairs exist.
CollectingSemantics collecting_semantics(const ProjectedCfg& g, const BlockUniverse& universe,
                                         const StateSet& init, unsigned k,
                                         std::size_t budget = kDefaultOracleBudget);

/// Exact verdict of one access. An unreachable access is vacuously an
/// always-hit.
Verdict exact_classify(const CollectingSemantics& sem, const AccessId& access);

}  // namespace exactcache
