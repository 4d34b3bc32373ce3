#pragma once

// The focused cache model: for one block `a`, either "a is not cached" or
// the set of blocks younger than a. Explicit-state reachability over
// (vertex, focused state) pairs decides every access to a exactly.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "exactcache/ai.hpp"
#include "exactcache/common.hpp"
#include "exactcache/concrete.hpp"

namespace exactcache {

/// Bit i of `younger` is universe slot i. Universes are limited to 64 blocks.
struct FocusedState {
  bool cached = false;
  std::uint64_t younger = 0;

  static constexpr FocusedState evicted() { return {false, 0}; }
  static constexpr FocusedState most_recent() { return {true, 0}; }
  static constexpr FocusedState with_younger(std::uint64_t mask) { return {true, mask}; }

  bool is_epsilon() const { return !cached; }
  unsigned younger_count() const { return static_cast<unsigned>(__builtin_popcountll(younger)); }

  auto operator<=>(const FocusedState&) const = default;
};

inline constexpr std::size_t kMaxFocusedUniverse = 64;
inline constexpr std::size_t kDefaultModelCheckBudget = std::size_t{1} << 20;

bool is_valid(const FocusedState& s, std::size_t focus, unsigned k);

FocusedState alpha_focus(const ConcreteCacheState& q, std::size_t focus, unsigned k);

FocusedState update_focus(const FocusedState& s, std::size_t slot, std::size_t focus, unsigned k);

/// Program model for one focused block.
struct FocusedModel {
  ProjectedCfg graph;
  std::size_t focus = 0;
  /// Per vertex, the slots that may be cached there (the candidate younger
  /// blocks); the focus itself is never included.
  std::vector<std::uint64_t> live;
  /// Universe slot of each edge's block, parallel to graph.edges.
  std::vector<std::optional<std::size_t>> slots;
  std::size_t dropped_edges = 0;
};

/// The graph as is, with every other block live everywhere.
FocusedModel unsimplified_model(const ProjectedCfg& g, const BlockUniverse& universe,
                                std::size_t focus);

/// Relabels as no-access every access to another block made where the may
/// analysis proves the focus uncached, and restricts each vertex's younger
/// candidates to blocks the may analysis does not prove uncached.
FocusedModel simplify_for(const ProjectedCfg& g, const BlockUniverse& universe, std::size_t focus,
                          const FixpointResult<MayState>& may, unsigned k);

/// Abstraction of the concrete initial set; restricted to `live_at_entry`.
std::vector<FocusedState> focused_initial(InitMode mode, std::size_t universe_size,
                                          std::size_t focus, unsigned k,
                                          std::uint64_t live_at_entry,
                                          std::size_t budget = kDefaultModelCheckBudget);

struct FocusedReach {
  FocusedModel model;
  std::vector<std::vector<FocusedState>> at;  // sorted, per vertex
  bool partial = false;                       // stopped by the early-exit predicate
  std::size_t states_explored = 0;
};

/// Called on every newly reached pair; returning true stops exploration.
using EarlyExit = std::function<bool(VertexId, const FocusedState&)>;

/// Breadth-first least fixpoint. Throws BudgetError(ModelCheck) once more
/// than `budget` pairs are reached.
FocusedReach focused_reach(const FocusedModel& model, const std::vector<FocusedState>& init,
                           unsigned k, std::size_t budget = kDefaultModelCheckBudget,
                           const EarlyExit& early_exit = {});

struct McVerdict {
  AccessId access;
  Verdict result = Verdict::DefinitelyUnknown;
  bool checked_always_hit = false;
  bool checked_always_miss = false;
  std::size_t states_explored = 0;
  bool early_exit = false;
};

/// Model-checking dispatch: a known hit path leaves only the always-hit
/// question open and a known miss path only the always-miss one.
McVerdict check_access(const FocusedReach& reach, const AccessId& access, bool exists_hit,
                       bool exists_miss);

struct SmvContext {
  std::string program_name;
  unsigned associativity = 0;
  std::uint64_t num_sets = 1;
  std::uint64_t block_size = 1;
  InitMode init = InitMode::Empty;
};

/// NuSMV module for the focused model: a location variable, one boolean per
/// candidate younger block, an eviction flag, and an always-hit and an
/// always-miss INVARSPEC per access source vertex.
std::string export_smv(const FocusedModel& model, const BlockUniverse& universe, unsigned k,
                       const SmvContext& context, const std::vector<AccessId>& accesses);

std::string smv_file_name(const std::string& program_name, std::uint64_t set_index,
                          MemoryBlock block);

}  // namespace exactcache
