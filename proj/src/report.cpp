#include "exactcache/report.hpp"

namespace exactcache {

namespace {

using Json = nlohmann::ordered_json;

Json access_json(const Cfg& g, std::uint64_t set_index, const AccessId& a) {
  Json j;
  j["id"] = to_string(a, g.vertex_names());
  j["set"] = set_index;
  j["source"] = g.vertex_names()[a.source];
  j["target"] = g.vertex_names()[a.target];
  j["block"] = a.block.index;
  j["ordinal"] = a.ordinal;
  return j;
}

}  // namespace

Json build_report(const ReportInput& in, const ClassifyResult& result, const DifferentialReport* oracle) {
  const Cfg& g = *in.cfg;
  Json doc;
  doc["schema"] = kReportSchema;
  doc["tool"] = {{"name", "exactcache"}, {"version", kToolVersion}};
  doc["command"] = in.command;
  doc["input"] = in.input_name;
  doc["program"] = g.name();
  doc["config"] = {{"associativity", in.config.associativity},
                   {"num_sets", in.config.num_sets},
                   {"block_size", in.config.block_size},
                   {"init", std::string(to_string(in.options.init))},
                   {"mode", std::string(to_string(in.options.mode))}};

  Json accesses = Json::array();
  for (const auto& fv : result.verdicts) {
    Json j = access_json(g, fv.set_index, fv.access);
    j["verdict"] = std::string(to_string(fv.verdict));
    j["provenance"] = std::string(to_string(fv.provenance));
    j["exists_hit"] = fv.exists_hit;
    j["exists_miss"] = fv.exists_miss;
    j["checked_always_hit"] = fv.checked_always_hit;
    j["checked_always_miss"] = fv.checked_always_miss;
    accesses.push_back(std::move(j));
  }
  doc["accesses"] = std::move(accesses);

  const PhaseStats& s = result.stats;
  Json prov;
  for (Provenance p : {Provenance::Must, Provenance::May, Provenance::EhEm, Provenance::McCheckAh,
                       Provenance::McCheckAm, Provenance::McRefutedBoth, Provenance::Unresolved})
    prov[std::string(to_string(p))] = s.count(p);
  Json stats;
  stats["accesses"] = s.accesses;
  stats["provenance"] = std::move(prov);
  stats["focused_runs"] = s.focused_runs;
  stats["access_checks"] = s.access_checks;
  stats["property_checks"] = s.property_checks;
  stats["states_explored"] = s.states_explored;
  stats["dropped_edges"] = s.dropped_edges;
  stats["early_exits"] = s.early_exits;
  if (in.timings) stats["timings_ms"] = {{"ai", s.ai_ms}, {"mc", s.mc_ms}};
  doc["stats"] = std::move(stats);
  doc["errors"] = result.errors;

  if (oracle) {
    Json entries = Json::array();
    for (const auto& e : oracle->entries) {
      Json j = access_json(g, e.set_index, e.access);
      j["pipeline"] = std::string(to_string(e.pipeline));
      j["oracle"] = std::string(to_string(e.oracle));
      j["agrees"] = e.agrees;
      entries.push_back(std::move(j));
    }
    doc["oracle"] = {{"disagreements", oracle->disagreements},
                     {"mc_resolved", oracle->mc_resolved},
                     {"state_pairs", oracle->oracle_pairs},
                     {"entries", std::move(entries)}};
  }
  return doc;
}

}  // namespace exactcache
