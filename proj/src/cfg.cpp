#include "exactcache/cfg.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>
#include <unordered_map>

#include <json.hpp>

namespace exactcache {

namespace {

bool is_power_of_two(std::uint64_t x) { return x != 0 && (x & (x - 1)) == 0; }

using Json = nlohmann::json;

[[noreturn]] void schema_error(const std::string& what) {
  throw CfgParseError(CfgParseError::Kind::Schema, "cfg schema error: " + what);
}

void reject_unknown_fields(const Json& object, std::initializer_list<std::string_view> allowed,
                           const std::string& where) {
  for (const auto& [key, value] : object.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      schema_error("unknown field '" + key + "' in " + where);
  }
}

const std::string& expect_string(const Json& value, const std::string& where) {
  if (!value.is_string()) schema_error(where + " must be a string");
  return value.get_ref<const std::string&>();
}

}  // namespace

void CacheConfig::validate() const {
  if (associativity < 1) throw std::invalid_argument("associativity must be at least 1");
  if (!is_power_of_two(num_sets))
    throw std::invalid_argument("number of sets must be a positive power of two");
  if (!is_power_of_two(block_size))
    throw std::invalid_argument("block size must be a positive power of two");
}

Cfg::Cfg(std::vector<std::string> vertex_names, VertexId entry, std::vector<Edge> edges,
         std::string name)
    : name_(std::move(name)),
      vertex_names_(std::move(vertex_names)),
      entry_(entry),
      edges_(std::move(edges)) {
  if (entry_ >= vertex_names_.size()) throw std::invalid_argument("entry vertex out of range");
  std::map<std::tuple<VertexId, MemoryBlock, VertexId>, unsigned> ordinals;
  access_ids_.reserve(edges_.size());
  for (const Edge& e : edges_) {
    if (e.from >= vertex_names_.size() || e.to >= vertex_names_.size())
      throw std::invalid_argument("edge endpoint out of range");
    if (!e.block) {
      access_ids_.emplace_back();
      continue;
    }
    unsigned& next = ordinals[{e.from, *e.block, e.to}];
    access_ids_.push_back(AccessId{e.from, *e.block, e.to, next++});
  }
}

std::optional<VertexId> Cfg::find_vertex(std::string_view name) const {
  auto it = std::find(vertex_names_.begin(), vertex_names_.end(), name);
  if (it == vertex_names_.end()) return std::nullopt;
  return static_cast<VertexId>(it - vertex_names_.begin());
}

std::vector<MemoryBlock> ProjectedCfg::blocks() const {
  std::set<MemoryBlock> seen;
  for (const auto& e : edges)
    if (e.block) seen.insert(*e.block);
  return {seen.begin(), seen.end()};
}

Cfg parse_cfg(std::string_view text, const CacheConfig& config) {
  config.validate();
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw CfgParseError(CfgParseError::Kind::Syntax, std::string("cfg syntax error: ") + e.what(),
                        e.byte);
  }
  if (!doc.is_object()) schema_error("top level must be an object");
  reject_unknown_fields(doc, {"name", "entry", "vertices", "edges"}, "cfg");

  std::string name;
  if (doc.contains("name")) name = expect_string(doc["name"], "name");

  if (!doc.contains("vertices") || !doc["vertices"].is_array())
    schema_error("'vertices' must be an array of strings");
  std::vector<std::string> vertices;
  std::unordered_map<std::string, VertexId> index;
  for (const auto& v : doc["vertices"]) {
    const auto& vname = expect_string(v, "vertex name");
    if (!index.emplace(vname, vertices.size()).second)
      schema_error("duplicate vertex '" + vname + "'");
    vertices.push_back(vname);
  }

  if (!doc.contains("entry"))
    throw CfgParseError(CfgParseError::Kind::MissingEntry, "cfg has no 'entry' declaration");
  const auto& entry_name = expect_string(doc["entry"], "entry");
  auto entry_it = index.find(entry_name);
  if (entry_it == index.end())
    throw CfgParseError(CfgParseError::Kind::MissingEntry,
                        "entry vertex '" + entry_name + "' is not declared");

  if (!doc.contains("edges") || !doc["edges"].is_array()) schema_error("'edges' must be an array");
  std::vector<Edge> edges;
  std::size_t position = 0;
  for (const auto& e : doc["edges"]) {
    const std::string where = "edge #" + std::to_string(position++);
    if (!e.is_object()) schema_error(where + " must be an object");
    reject_unknown_fields(e, {"from", "to", "access"}, where);
    if (!e.contains("from") || !e.contains("to") || !e.contains("access"))
      schema_error(where + " needs 'from', 'to' and 'access'");
    Edge edge;
    for (auto [field, slot] : {std::pair{"from", &edge.from}, std::pair{"to", &edge.to}}) {
      const auto& vname = expect_string(e[field], where + "." + field);
      auto it = index.find(vname);
      if (it == index.end())
        throw CfgParseError(CfgParseError::Kind::DanglingVertex,
                            where + " references undeclared vertex '" + vname + "'");
      *slot = it->second;
    }
    const auto& access = e["access"];
    if (access.is_number_unsigned()) {
      edge.address = access.get<std::uint64_t>();
      edge.block = block_of_address(*edge.address, config);
    } else if (access.is_number_integer()) {
      schema_error(where + " has a negative address");
    } else if (!access.is_null()) {
      schema_error(where + ".access must be a non-negative integer or null");
    }
    edges.push_back(edge);
  }
  return Cfg(std::move(vertices), entry_it->second, std::move(edges), std::move(name));
}

std::string serialize_cfg(const Cfg& g) {
  nlohmann::ordered_json doc;
  if (!g.name().empty()) doc["name"] = g.name();
  doc["entry"] = g.vertex_names()[g.entry()];
  doc["vertices"] = g.vertex_names();
  auto edges = nlohmann::ordered_json::array();
  for (const Edge& e : g.edges()) {
    nlohmann::ordered_json je;
    je["from"] = g.vertex_names()[e.from];
    je["to"] = g.vertex_names()[e.to];
    if (e.address)
      je["access"] = *e.address;
    else if (e.block)
      throw std::invalid_argument("cannot serialize an access edge without an address");
    else
      je["access"] = nullptr;
    edges.push_back(std::move(je));
  }
  doc["edges"] = std::move(edges);
  return doc.dump(2) + "\n";
}

ProjectedCfg project(const Cfg& g, std::uint64_t set_index, const CacheConfig& config) {
  if (set_index >= config.num_sets)
    throw std::invalid_argument("set index " + std::to_string(set_index) + " out of range [0, " +
                                std::to_string(config.num_sets) + ")");
  ProjectedCfg out;
  out.set_index = set_index;
  out.vertex_names = g.vertex_names();
  out.entry = g.entry();
  for (std::size_t i = 0; i < g.edges().size(); ++i) {
    const Edge& e = g.edges()[i];
    ProjectedEdge pe{e.from, e.to, std::nullopt, std::nullopt};
    if (e.block && set_of(*e.block, config) == set_index) {
      pe.block = e.block;
      pe.access = g.access_ids()[i];
    }
    if (!pe.block && pe.from == pe.to) continue;
    out.edges.push_back(pe);
  }
  return out;
}

std::vector<AccessId> accesses_of(const ProjectedCfg& g) {
  std::vector<AccessId> out;
  for (const auto& e : g.edges)
    if (e.access) out.push_back(*e.access);
  return out;
}

std::string to_string(const AccessId& id, const std::vector<std::string>& vertex_names) {
  std::string s = vertex_names.at(id.source) + "->" + vertex_names.at(id.target) + ":b" +
                  std::to_string(id.block.index);
  if (id.ordinal != 0) s += "#" + std::to_string(id.ordinal);
  return s;
}

}  // namespace exactcache
