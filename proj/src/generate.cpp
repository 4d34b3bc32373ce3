#include <random>

#include "exactcache/bench.hpp"

namespace exactcache {

namespace {

// Every loop costs exactly three vertices: header, body start and exit.
constexpr std::size_t kLoopCost = 3;

class Builder {
 public:
  explicit Builder(const GenSpec& spec) : spec_(spec), rng_(spec.seed), pending_loops_(spec.loops) {}

  Cfg build() {
    const VertexId entry = new_vertex();
    region(entry, spec_.loops, 0);
    std::vector<std::string> names;
    for (std::size_t i = 0; i < vertex_count_; ++i) names.push_back("v" + std::to_string(i));
    return Cfg(std::move(names), entry, std::move(edges_),
               spec_.name.empty() ? "gen-" + std::to_string(spec_.seed) : spec_.name);
  }

 private:
  VertexId new_vertex() { return vertex_count_++; }

  std::size_t spare() const {
    return spec_.vertices - vertex_count_ - kLoopCost * pending_loops_;
  }

  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

  void access_edge(VertexId from, VertexId to) {
    const std::uint64_t block = pick(spec_.blocks);
    const std::uint64_t per_block = std::max<std::uint64_t>(1, spec_.block_size / spec_.instruction_size);
    const std::uint64_t address = block * spec_.block_size + pick(per_block) * spec_.instruction_size;
    edges_.push_back(Edge{from, to, MemoryBlock{block}, address});
  }

  void plain_edge(VertexId from, VertexId to) { edges_.push_back(Edge{from, to, std::nullopt, std::nullopt}); }

  void some_edge(VertexId from, VertexId to) {
    if (chance(spec_.access_probability))
      access_edge(from, to);
    else
      plain_edge(from, to);
  }

  // Emits a single-entry single-exit region starting at u that places
  // exactly `loops` loops; returns the exit vertex.
  VertexId region(VertexId u, unsigned loops, unsigned depth) {
    while (true) {
      if (loops > 0 && (spare() == 0 || chance(0.5))) {
        unsigned nested = 0;
        if (depth + 1 < spec_.max_depth && loops > 1)
          nested = static_cast<unsigned>(pick(loops));
        loops -= 1 + nested;
        u = loop(u, nested, depth);
        continue;
      }
      if (loops == 0 && (spare() == 0 || !chance(0.7))) return u;
      if (spare() == 0) continue;  // only loops remain
      u = straight(u);
    }
  }

  VertexId loop(VertexId u, unsigned nested, unsigned depth) {
    --pending_loops_;
    const VertexId header = new_vertex();
    const VertexId body = new_vertex();
    const VertexId exit = new_vertex();
    plain_edge(u, header);
    access_edge(header, body);
    const VertexId latch = region(body, nested, depth + 1);
    plain_edge(latch, header);
    if (chance(0.5))
      plain_edge(latch, exit);  // bottom-tested
    else
      plain_edge(header, exit); // top-tested
    return exit;
  }

  VertexId straight(VertexId u) {
    if (spare() >= 2 && chance(spec_.branch_probability)) {
      const VertexId mid = new_vertex();
      const VertexId join = new_vertex();
      some_edge(u, mid);
      some_edge(mid, join);
      some_edge(u, join);
      return join;
    }
    const VertexId next = new_vertex();
    some_edge(u, next);
    if (chance(spec_.branch_probability)) some_edge(u, next);  // alternative targets
    return next;
  }

  const GenSpec& spec_;
  std::mt19937_64 rng_;
  std::size_t pending_loops_;
  std::size_t vertex_count_ = 0;
  std::vector<Edge> edges_;
};

}  // namespace

Cfg generate(const GenSpec& spec) {
  if (spec.vertices < 1 || spec.blocks < 1 || spec.block_size < 1 || spec.instruction_size < 1)
    throw std::invalid_argument("generator budgets must be positive");
  if (spec.loops > 0 && spec.max_depth < 1)
    throw std::invalid_argument("loops require a nesting depth of at least 1");
  if (1 + kLoopCost * spec.loops > spec.vertices)
    throw std::invalid_argument(std::to_string(spec.loops) + " loops need at least " +
                                std::to_string(1 + kLoopCost * spec.loops) + " vertices, budget is " +
                                std::to_string(spec.vertices));
  return Builder(spec).build();
}

Cfg rebind(const Cfg& g, const CacheConfig& config) {
  config.validate();
  std::vector<Edge> edges = g.edges();
  for (auto& e : edges) {
    if (e.address)
      e.block = block_of_address(*e.address, config);
    else if (e.block)
      throw std::invalid_argument("cannot rebind an access edge without an address");
  }
  return Cfg(g.vertex_names(), g.entry(), std::move(edges), g.name());
}

}  // namespace exactcache
