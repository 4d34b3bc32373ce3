#include <set>
#include <sstream>

#include "exactcache/focused.hpp"

namespace exactcache {

namespace {

std::string loc_name(VertexId v) { return "l" + std::to_string(v); }

std::string bit_name(const BlockUniverse& universe, std::size_t slot) {
  return "y_b" + std::to_string(universe.block(slot).index);
}

bool has(std::uint64_t mask, std::size_t slot) { return (mask >> slot) & 1u; }

std::string count_of(const std::vector<std::size_t>& bits, const BlockUniverse& universe,
                     std::optional<std::size_t> except) {
  std::string out;
  for (std::size_t slot : bits) {
    if (slot == except) continue;
    if (!out.empty()) out += " + ";
    out += "toint(" + bit_name(universe, slot) + ")";
  }
  return out.empty() ? "0" : out;
}

}  // namespace

std::string smv_file_name(const std::string& program_name, std::uint64_t set_index,
                          MemoryBlock block) {
  return (program_name.empty() ? std::string("program") : program_name) + ".set" +
         std::to_string(set_index) + ".block" + std::to_string(block.index) + ".smv";
}

std::string export_smv(const FocusedModel& model, const BlockUniverse& universe, unsigned k,
                       const SmvContext& context, const std::vector<AccessId>& accesses) {
  const ProjectedCfg& g = model.graph;
  std::uint64_t any_live = 0;
  for (auto mask : model.live) any_live |= mask;
  std::vector<std::size_t> bits;  // ascending slot = ascending block index
  for (std::size_t slot = 0; slot < universe.size(); ++slot)
    if (has(any_live, slot)) bits.push_back(slot);

  std::ostringstream out;
  out << "-- focused LRU cache model\n"
      << "-- program: " << (context.program_name.empty() ? "program" : context.program_name) << "\n"
      << "-- cache: associativity " << k << ", sets " << context.num_sets << ", block size "
      << context.block_size << "\n"
      << "-- set " << g.set_index << ", focused block " << universe.block(model.focus).index << "\n"
      << "-- init: " << to_string(context.init) << "\n";
  for (VertexId v = 0; v < g.num_vertices(); ++v)
    out << "-- " << loc_name(v) << " = " << g.vertex_names[v] << "\n";

  out << "MODULE main\nVAR\n  loc : {";
  for (VertexId v = 0; v < g.num_vertices(); ++v) out << (v ? ", " : "") << loc_name(v);
  out << "};\n  evicted : boolean;\n";
  for (std::size_t slot : bits) out << "  " << bit_name(universe, slot) << " : boolean;\n";

  auto all_false_except = [&](std::uint64_t allowed, bool primed) {
    std::string s;
    for (std::size_t slot : bits) {
      if (has(allowed, slot)) continue;
      const std::string name = bit_name(universe, slot);
      s += " & !" + (primed ? "next(" + name + ")" : name);
    }
    return s;
  };

  const std::uint64_t entry_live = model.live[g.entry];
  out << "INIT\n  loc = " << loc_name(g.entry) << " & ((evicted" << all_false_except(0, false)
      << ")";
  if (context.init == InitMode::Unknown) {
    std::vector<std::size_t> entry_bits;
    for (std::size_t slot : bits)
      if (has(entry_live, slot)) entry_bits.push_back(slot);
    out << " | (!evicted" << all_false_except(entry_live, false) << " & "
        << count_of(entry_bits, universe, std::nullopt) << " < " << k << ")";
  }
  out << ");\n";

  out << "TRANS\n";
  // Stuttering keeps the relation total without changing the reachable set.
  out << "    (next(loc) = loc & next(evicted) = evicted";
  for (std::size_t slot : bits) {
    const std::string name = bit_name(universe, slot);
    out << " & next(" << name << ") = " << name;
  }
  out << ")\n";

  for (std::size_t ei = 0; ei < g.edges.size(); ++ei) {
    const auto& e = g.edges[ei];
    const std::string guard = "loc = " + loc_name(e.from) + " & next(loc) = " + loc_name(e.to);
    const std::uint64_t live = model.live[e.to];
    const auto slot = model.slots[ei];
    if (!slot) {
      out << "  | (" << guard << " & next(evicted) = evicted";
      for (std::size_t b : bits) {
        const std::string name = bit_name(universe, b);
        if (has(live, b))
          out << " & next(" << name << ") = " << name;
        else
          out << " & !next(" << name << ")";
      }
      out << ")\n";
      continue;
    }
    out << "  -- edge " << g.vertex_names[e.from] << " -> " << g.vertex_names[e.to]
        << " accesses block " << universe.block(*slot).index << "\n";
    if (*slot == model.focus) {
      out << "  | (" << guard << " & !next(evicted)" << all_false_except(0, true) << ")\n";
      continue;
    }
    const std::string fills = "(evicted | " + count_of(bits, universe, slot) + " + 1 >= " +
                              std::to_string(k) + ")";
    out << "  | (" << guard << " & " << fills << " & next(evicted)" << all_false_except(0, true)
        << ")\n";
    out << "  | (" << guard << " & !" << fills << " & !next(evicted)";
    for (std::size_t b : bits) {
      const std::string name = bit_name(universe, b);
      if (!has(live, b))
        out << " & !next(" << name << ")";
      else if (b == *slot)
        out << " & next(" << name << ")";
      else
        out << " & next(" << name << ") = " << name;
    }
    out << ")\n";
  }
  out << ";\n";

  std::set<VertexId> sources;
  for (const auto& a : accesses) sources.insert(a.source);
  for (VertexId v : sources) {
    out << "-- accesses at " << g.vertex_names[v] << ":";
    for (const auto& a : accesses)
      if (a.source == v) out << " " << to_string(a, g.vertex_names);
    out << "\n";
    out << "INVARSPEC loc = " << loc_name(v) << " -> !evicted; -- always hit\n";
    out << "INVARSPEC loc = " << loc_name(v) << " -> evicted; -- always miss\n";
  }
  return out.str();
}

}  // namespace exactcache
