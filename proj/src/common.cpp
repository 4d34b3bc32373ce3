#include "exactcache/common.hpp"

namespace exactcache {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::AlwaysHit: return "always-hit";
    case Verdict::AlwaysMiss: return "always-miss";
    case Verdict::DefinitelyUnknown: return "definitely-unknown";
    case Verdict::Unknown: return "unknown";
  }
  return "?";
}

std::string_view to_string(InitMode m) { return m == InitMode::Empty ? "empty" : "unknown"; }

InitMode parse_init_mode(std::string_view s) {
  if (s == "empty") return InitMode::Empty;
  if (s == "unknown") return InitMode::Unknown;
  throw std::invalid_argument("init mode must be 'empty' or 'unknown', got '" + std::string(s) + "'");
}

BlockUniverse::BlockUniverse(std::vector<MemoryBlock> blocks) : blocks_(std::move(blocks)) {
  std::sort(blocks_.begin(), blocks_.end());
  blocks_.erase(std::unique(blocks_.begin(), blocks_.end()), blocks_.end());
}

std::optional<std::size_t> BlockUniverse::slot_of(MemoryBlock b) const {
  auto it = std::lower_bound(blocks_.begin(), blocks_.end(), b);
  if (it == blocks_.end() || *it != b) return std::nullopt;
  return static_cast<std::size_t>(it - blocks_.begin());
}

std::vector<std::optional<std::size_t>> BlockUniverse::edge_slots(const ProjectedCfg& g) const {
  std::vector<std::optional<std::size_t>> out;
  out.reserve(g.edges.size());
  for (const auto& e : g.edges) {
    if (!e.block) {
      out.emplace_back();
      continue;
    }
    auto slot = slot_of(*e.block);
    if (!slot) throw std::invalid_argument("edge block outside the analysis universe");
    out.push_back(slot);
  }
  return out;
}

std::vector<VertexId> reverse_post_order(const ProjectedCfg& g) {
  const std::size_t n = g.num_vertices();
  std::vector<std::vector<VertexId>> succ(n);
  for (const auto& e : g.edges) succ[e.from].push_back(e.to);

  std::vector<VertexId> post;
  std::vector<char> seen(n, 0);
  // Iterative DFS; frame = (vertex, next successor position).
  std::vector<std::pair<VertexId, std::size_t>> stack;
  stack.emplace_back(g.entry, 0);
  seen[g.entry] = 1;
  while (!stack.empty()) {
    auto& [v, pos] = stack.back();
    if (pos < succ[v].size()) {
      VertexId w = succ[v][pos++];
      if (!seen[w]) {
        seen[w] = 1;
        stack.emplace_back(w, 0);
      }
    } else {
      post.push_back(v);
      stack.pop_back();
    }
  }
  return {post.rbegin(), post.rend()};
}

}  // namespace exactcache
