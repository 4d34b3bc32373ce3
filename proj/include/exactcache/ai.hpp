#pragma once

// Must, May, Exists-Hit and Exists-Miss cache analyses over one worklist
// fixpoint engine.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "exactcache/common.hpp"
#include "exactcache/concrete.hpp"

namespace exactcache {

/// Block slot -> age bound in [0, k].
using AgeBoundMap = std::vector<std::uint8_t>;

/// Upper bounds on the age of each block in every reachable state.
struct MustState {
  AgeBoundMap bounds;
  bool operator==(const MustState&) const = default;
};

/// Lower bounds on the age of each block in every reachable state.
struct MayState {
  AgeBoundMap bounds;
  bool operator==(const MayState&) const = default;
};

/// Upper bounds on the minimal age of each block over the reachable set,
/// paired with a must analysis.
struct EhState {
  AgeBoundMap min_age_ub;
  MustState must;
  bool operator==(const EhState&) const = default;
};

/// Lower bounds on the maximal age of each block over the reachable set,
/// paired with a may analysis.
struct EmState {
  AgeBoundMap max_age_lb;
  MayState may;
  bool operator==(const EmState&) const = default;
};

MustState update_must(const MustState& s, std::size_t slot, unsigned k);
MayState update_may(const MayState& s, std::size_t slot, unsigned k);
EhState update_eh(const EhState& s, std::size_t slot, unsigned k);
EmState update_em(const EmState& s, std::size_t slot, unsigned k);

MustState join_must(const MustState& a, const MustState& b);
MayState join_may(const MayState& a, const MayState& b);
EhState join_eh(const EhState& a, const EhState& b);
EmState join_em(const EmState& a, const EmState& b);

// Concretizations. The hyperproperty domains concretize to sets of sets;
// membership of a non-empty set Q is what can be tested.
bool in_gamma_must(const ConcreteCacheState& q, const MustState& s);
bool in_gamma_may(const ConcreteCacheState& q, const MayState& s);
bool in_gamma_eh(const StateSet& q, const EhState& s);
bool in_gamma_em(const StateSet& q, const EmState& s);

MustState initial_must(InitMode mode, std::size_t n, unsigned k);
MayState initial_may(InitMode mode, std::size_t n, unsigned k);
EhState initial_eh(InitMode mode, std::size_t n, unsigned k);
EmState initial_em(InitMode mode, std::size_t n, unsigned k);

struct MustDomain {
  using State = MustState;
  static State update(const State& s, std::size_t slot, unsigned k) { return update_must(s, slot, k); }
  static State join(const State& a, const State& b) { return join_must(a, b); }
};
struct MayDomain {
  using State = MayState;
  static State update(const State& s, std::size_t slot, unsigned k) { return update_may(s, slot, k); }
  static State join(const State& a, const State& b) { return join_may(a, b); }
};
struct EhDomain {
  using State = EhState;
  static State update(const State& s, std::size_t slot, unsigned k) { return update_eh(s, slot, k); }
  static State join(const State& a, const State& b) { return join_eh(a, b); }
};
struct EmDomain {
  using State = EmState;
  static State update(const State& s, std::size_t slot, unsigned k) { return update_em(s, slot, k); }
  static State join(const State& a, const State& b) { return join_em(a, b); }
};

/// nullopt is the unreachable (bottom) element.
template <typename State>
struct FixpointResult {
  std::vector<std::optional<State>> at;
  std::size_t visits = 0;  // vertex transfer evaluations
};

template <typename State, typename Join>
std::optional<State> join_optional(const std::optional<State>& a, const std::optional<State>& b,
                                   Join join) {
  if (!a) return b;
  if (!b) return a;
  return join(*a, *b);
}

/// Least solution seeded with `init` at the entry and bottom elsewhere.
/// Worklist ordered by reverse post-order position, so an acyclic graph is
/// solved in a single pass.
template <typename Domain>
FixpointResult<typename Domain::State> fixpoint(const ProjectedCfg& g, const BlockUniverse& universe,
                                                const typename Domain::State& init, unsigned k) {
  using State = typename Domain::State;
  FixpointResult<State> result;
  result.at.assign(g.num_vertices(), std::nullopt);

  const auto slots = universe.edge_slots(g);
  std::vector<std::vector<std::size_t>> out_edges(g.num_vertices());
  for (std::size_t i = 0; i < g.edges.size(); ++i) out_edges[g.edges[i].from].push_back(i);

  const auto rpo = reverse_post_order(g);
  std::vector<std::size_t> rank(g.num_vertices(), 0);
  for (std::size_t i = 0; i < rpo.size(); ++i) rank[rpo[i]] = i;

  std::set<std::size_t> worklist;  // ranks
  result.at[g.entry] = init;
  worklist.insert(rank[g.entry]);
  while (!worklist.empty()) {
    const VertexId v = rpo[*worklist.begin()];
    worklist.erase(worklist.begin());
    ++result.visits;
    const State& here = *result.at[v];
    for (std::size_t ei : out_edges[v]) {
      const VertexId to = g.edges[ei].to;
      State incoming = slots[ei] ? Domain::update(here, *slots[ei], k) : here;
      auto merged = join_optional<State>(result.at[to], incoming, &Domain::join);
      if (merged != result.at[to]) {
        result.at[to] = std::move(merged);
        worklist.insert(rank[to]);
      }
    }
  }
  return result;
}

struct AiFixpoints {
  FixpointResult<MustState> must;
  FixpointResult<MayState> may;
  std::optional<FixpointResult<EhState>> eh;  // absent when the DU analysis is off
  std::optional<FixpointResult<EmState>> em;
};

AiFixpoints run_ai(const ProjectedCfg& g, const BlockUniverse& universe, InitMode mode, unsigned k,
                   bool with_definitely_unknown = true);

struct AiClassification {
  Verdict verdict = Verdict::Unknown;
  bool exists_hit = false;
  bool exists_miss = false;
};

/// Must, then May, then EH and EM together. Residual accesses come back as
/// Unknown with the EH/EM flags that did hold.
AiClassification ai_classify(const AiFixpoints& fp, const BlockUniverse& universe,
                             const AccessId& access, unsigned k);

}  // namespace exactcache
