#pragma once

// Access-annotated control-flow graphs, the address-to-block mapping and
// per-cache-set projection.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace exactcache {

/// Geometry of a set-associative LRU cache.
struct CacheConfig {
  unsigned associativity = 4;
  std::uint64_t num_sets = 1;
  std::uint64_t block_size = 8;

  /// Throws std::invalid_argument unless every field is positive and
  /// num_sets / block_size are powers of two.
  void validate() const;
};

struct MemoryBlock {
  std::uint64_t index = 0;

  auto operator<=>(const MemoryBlock&) const = default;
};

inline MemoryBlock block_of_address(std::uint64_t address, const CacheConfig& config) {
  return MemoryBlock{address / config.block_size};
}

inline std::uint64_t set_of(MemoryBlock block, const CacheConfig& config) {
  return block.index % config.num_sets;
}

using VertexId = std::size_t;

/// Identity of one labeled edge. `ordinal` separates parallel edges that
/// share source, block and target.
struct AccessId {
  VertexId source = 0;
  MemoryBlock block;
  VertexId target = 0;
  unsigned ordinal = 0;

  auto operator<=>(const AccessId&) const = default;
};

struct Edge {
  VertexId from = 0;
  VertexId to = 0;
  std::optional<MemoryBlock> block;  // nullopt is the no-access label
  std::optional<std::uint64_t> address;
};

class Cfg {
 public:
  Cfg() = default;
  Cfg(std::vector<std::string> vertex_names, VertexId entry, std::vector<Edge> edges,
      std::string name = {});

  const std::string& name() const { return name_; }
  const std::vector<std::string>& vertex_names() const { return vertex_names_; }
  std::size_t num_vertices() const { return vertex_names_.size(); }
  VertexId entry() const { return entry_; }
  const std::vector<Edge>& edges() const { return edges_; }

  /// Access id of each edge, nullopt for no-access edges. Parallel to edges().
  const std::vector<std::optional<AccessId>>& access_ids() const { return access_ids_; }

  std::optional<VertexId> find_vertex(std::string_view name) const;

 private:
  std::string name_;
  std::vector<std::string> vertex_names_;
  VertexId entry_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::optional<AccessId>> access_ids_;
};

struct ProjectedEdge {
  VertexId from = 0;
  VertexId to = 0;
  std::optional<MemoryBlock> block;
  std::optional<AccessId> access;  // set iff block is set
};

/// A Cfg restricted to the accesses of one cache set. Vertices are those of
/// the source graph; edges are in source order.
struct ProjectedCfg {
  std::uint64_t set_index = 0;
  std::vector<std::string> vertex_names;
  VertexId entry = 0;
  std::vector<ProjectedEdge> edges;

  std::size_t num_vertices() const { return vertex_names.size(); }
  /// Distinct blocks on labeled edges, ascending by block index.
  std::vector<MemoryBlock> blocks() const;
};

class CfgParseError : public std::runtime_error {
 public:
  enum class Kind { Syntax, Schema, DanglingVertex, MissingEntry };

  CfgParseError(Kind kind, const std::string& what, std::size_t byte_offset = 0)
      : std::runtime_error(what), kind_(kind), byte_offset_(byte_offset) {}

  Kind kind() const { return kind_; }
  std::size_t byte_offset() const { return byte_offset_; }

 private:
  Kind kind_;
  std::size_t byte_offset_;
};

/// Parses the JSON CFG format: {"name"?, "entry", "vertices", "edges"} with
/// edges {"from", "to", "access": address-or-null}. Unknown fields are errors.
Cfg parse_cfg(std::string_view text, const CacheConfig& config);

/// Inverse of parse_cfg for graphs that carry addresses.
std::string serialize_cfg(const Cfg& g);

/// Keeps accesses to blocks of `set_index`, relabels the rest as no-access
/// and drops no-access self-loops.
ProjectedCfg project(const Cfg& g, std::uint64_t set_index, const CacheConfig& config);

std::vector<AccessId> accesses_of(const ProjectedCfg& g);

std::string to_string(const AccessId& id, const std::vector<std::string>& vertex_names);

}  // namespace exactcache
