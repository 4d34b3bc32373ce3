#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "exactcache/cfg.hpp"

namespace exactcache {

enum class Verdict { AlwaysHit, AlwaysMiss, DefinitelyUnknown, Unknown };

/// Initial cache contents at the entry vertex.
enum class InitMode { Empty, Unknown };

std::string_view to_string(Verdict v);
std::string_view to_string(InitMode m);
InitMode parse_init_mode(std::string_view s);

/// Raised when an explicit-state exploration would exceed its configured cap.
class BudgetError : public std::runtime_error {
 public:
  enum class Which { Oracle, ModelCheck };

  BudgetError(Which which, std::size_t limit, const std::string& what)
      : std::runtime_error(what), which_(which), limit_(limit) {}

  Which which() const { return which_; }
  std::size_t limit() const { return limit_; }

 private:
  Which which_;
  std::size_t limit_;
};

/// The blocks one analysis talks about, sorted by block index. Analyses
/// address blocks by their position ("slot") in this list.
class BlockUniverse {
 public:
  BlockUniverse() = default;
  explicit BlockUniverse(std::vector<MemoryBlock> blocks);

  static BlockUniverse of(const ProjectedCfg& g) { return BlockUniverse(g.blocks()); }

  std::size_t size() const { return blocks_.size(); }
  const std::vector<MemoryBlock>& blocks() const { return blocks_; }
  MemoryBlock block(std::size_t slot) const { return blocks_.at(slot); }
  std::optional<std::size_t> slot_of(MemoryBlock b) const;

  /// Slot of each edge's block, parallel to g.edges().
  std::vector<std::optional<std::size_t>> edge_slots(const ProjectedCfg& g) const;

 private:
  std::vector<MemoryBlock> blocks_;
};

/// Vertices reachable from the entry, in reverse post-order.
std::vector<VertexId> reverse_post_order(const ProjectedCfg& g);

}  // namespace exactcache
