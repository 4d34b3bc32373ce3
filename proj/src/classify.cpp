#include "exactcache/classify.hpp"

#include <chrono>
#include <map>
#include <set>

#include "parallel.hpp"

namespace exactcache {

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::AiOnly: return "ai-only";
    case Mode::AiMc: return "ai+mc";
    case Mode::McOnly: return "mc-only";
    case Mode::AiMcNoDu: return "ai+mc-no-du";
  }
  return "?";
}

Mode parse_mode(std::string_view s) {
  for (Mode m : {Mode::AiOnly, Mode::AiMc, Mode::McOnly, Mode::AiMcNoDu})
    if (to_string(m) == s) return m;
  throw std::invalid_argument("mode must be one of ai-only, ai+mc, mc-only, ai+mc-no-du; got '" +
                              std::string(s) + "'");
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::Must: return "must";
    case Provenance::May: return "may";
    case Provenance::EhEm: return "eh+em";
    case Provenance::McCheckAh: return "mc-check-ah";
    case Provenance::McCheckAm: return "mc-check-am";
    case Provenance::McRefutedBoth: return "mc-refuted";
    case Provenance::Unresolved: return "unresolved";
  }
  return "?";
}

std::size_t PhaseStats::count(Verdict v, const std::vector<FinalVerdict>& verdicts) const {
  std::size_t n = 0;
  for (const auto& fv : verdicts) n += fv.verdict == v;
  return n;
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

std::vector<std::uint64_t> accessed_sets(const Cfg& g, const CacheConfig& config) {
  std::set<std::uint64_t> sets;
  for (const auto& e : g.edges())
    if (e.block) sets.insert(set_of(*e.block, config));
  return {sets.begin(), sets.end()};
}

struct SetOutcome {
  std::vector<FinalVerdict> verdicts;
  PhaseStats stats;
  std::vector<std::string> errors;
};

Provenance provenance_of_mc(Verdict v) {
  switch (v) {
    case Verdict::AlwaysHit: return Provenance::McCheckAh;
    case Verdict::AlwaysMiss: return Provenance::McCheckAm;
    default: return Provenance::McRefutedBoth;
  }
}

// Stops a focused run once every target access has had each check it would
// evaluate refuted, i.e. all of them are definitely unknown.
class RefutationTracker {
 public:
  RefutationTracker(const std::vector<const FinalVerdict*>& targets, std::size_t num_vertices)
      : seen_evicted_(num_vertices, 0), seen_cached_(num_vertices, 0) {
    for (const auto* t : targets) {
      // exists_hit: only CheckAH runs, refuted by an evicted state;
      // exists_miss: only CheckAM runs, refuted by a cached state.
      Need need{true, true};
      if (t->exists_hit)
        need = {true, false};
      else if (t->exists_miss)
        need = {false, true};
      auto& n = needs_[t->access.source];
      n.evicted |= need.evicted;
      n.cached |= need.cached;
    }
    open_ = needs_.size();
  }

  bool observe(VertexId v, const FocusedState& s) {
    auto it = needs_.find(v);
    if (it == needs_.end()) return false;
    const bool before = satisfied(v, it->second);
    (s.is_epsilon() ? seen_evicted_[v] : seen_cached_[v]) = 1;
    if (!before && satisfied(v, it->second)) --open_;
    return open_ == 0;
  }

 private:
  struct Need {
    bool evicted = false;
    bool cached = false;
  };

  bool satisfied(VertexId v, const Need& n) const {
    return (!n.evicted || seen_evicted_[v]) && (!n.cached || seen_cached_[v]);
  }

  std::map<VertexId, Need> needs_;
  std::vector<char> seen_evicted_;
  std::vector<char> seen_cached_;
  std::size_t open_ = 0;
};

SetOutcome classify_set(const Cfg& g, const CacheConfig& config, std::uint64_t set_index,
                        const ClassifyOptions& options) {
  SetOutcome out;
  const unsigned k = config.associativity;
  const ProjectedCfg pg = project(g, set_index, config);
  const BlockUniverse universe = BlockUniverse::of(pg);
  const auto accesses = accesses_of(pg);
  out.stats.accesses = accesses.size();

  const bool use_ai = options.mode != Mode::McOnly;
  const bool use_du = options.mode == Mode::AiMc || options.mode == Mode::AiOnly;

  auto ai_start = Clock::now();
  std::optional<AiFixpoints> fp;
  if (use_ai) fp = run_ai(pg, universe, options.init, k, use_du);
  for (const auto& a : accesses) {
    FinalVerdict fv;
    fv.set_index = set_index;
    fv.access = a;
    if (fp) {
      const auto c = ai_classify(*fp, universe, a, k);
      fv.verdict = c.verdict;
      fv.exists_hit = c.exists_hit;
      fv.exists_miss = c.exists_miss;
      switch (c.verdict) {
        case Verdict::AlwaysHit: fv.provenance = Provenance::Must; break;
        case Verdict::AlwaysMiss: fv.provenance = Provenance::May; break;
        case Verdict::DefinitelyUnknown: fv.provenance = Provenance::EhEm; break;
        case Verdict::Unknown: fv.provenance = Provenance::Unresolved; break;
      }
      // The ai-only baseline reports the EH/EM flags but classifies with Must and May alone.
      if (options.mode == Mode::AiOnly && fv.provenance == Provenance::EhEm) {
        fv.verdict = Verdict::Unknown;
        fv.provenance = Provenance::Unresolved;
      }
    }
    out.verdicts.push_back(fv);
  }
  out.stats.ai_ms = use_ai ? elapsed_ms(ai_start) : 0.0;

  if (options.mode != Mode::AiOnly) {
    auto mc_start = Clock::now();
    std::map<MemoryBlock, std::vector<FinalVerdict*>> residual;  // ascending block index
    for (auto& fv : out.verdicts)
      if (fv.provenance == Provenance::Unresolved) residual[fv.access.block].push_back(&fv);

    for (auto& [block, targets] : residual) {
      const std::size_t focus = *universe.slot_of(block);
      try {
        FocusedModel model = use_ai && options.simplify
                                 ? simplify_for(pg, universe, focus, fp->may, k)
                                 : unsimplified_model(pg, universe, focus);
        const auto init = focused_initial(options.init, universe.size(), focus, k,
                                          model.live[pg.entry], options.mc_budget);
        std::vector<const FinalVerdict*> view(targets.begin(), targets.end());
        RefutationTracker tracker(view, pg.num_vertices());
        EarlyExit stop;
        if (options.early_exit)
          stop = [&tracker](VertexId v, const FocusedState& s) { return tracker.observe(v, s); };
        const FocusedReach reach = focused_reach(model, init, k, options.mc_budget, stop);

        ++out.stats.focused_runs;
        out.stats.states_explored += reach.states_explored;
        out.stats.dropped_edges += model.dropped_edges;
        out.stats.early_exits += reach.partial;
        for (FinalVerdict* fv : targets) {
          const McVerdict mc = check_access(reach, fv->access, fv->exists_hit, fv->exists_miss);
          ++out.stats.access_checks;
          out.stats.property_checks += mc.checked_always_hit + mc.checked_always_miss;
          fv->verdict = mc.result;
          fv->provenance = provenance_of_mc(mc.result);
          fv->checked_always_hit = mc.checked_always_hit;
          fv->checked_always_miss = mc.checked_always_miss;
        }
      } catch (const BudgetError& e) {
        out.errors.push_back("set " + std::to_string(set_index) + ", block " +
                             std::to_string(block.index) + ": " + e.what());
      }
    }
    out.stats.mc_ms = elapsed_ms(mc_start);
  }

  for (const auto& fv : out.verdicts) ++out.stats.by_provenance[static_cast<std::size_t>(fv.provenance)];
  return out;
}

void accumulate(PhaseStats& into, const PhaseStats& s) {
  into.accesses += s.accesses;
  for (std::size_t i = 0; i < kProvenanceCount; ++i) into.by_provenance[i] += s.by_provenance[i];
  into.focused_runs += s.focused_runs;
  into.access_checks += s.access_checks;
  into.property_checks += s.property_checks;
  into.states_explored += s.states_explored;
  into.dropped_edges += s.dropped_edges;
  into.early_exits += s.early_exits;
  into.ai_ms += s.ai_ms;
  into.mc_ms += s.mc_ms;
}

}  // namespace

ClassifyResult classify_all(const Cfg& g, const CacheConfig& config, const ClassifyOptions& options) {
  config.validate();
  const auto sets = accessed_sets(g, config);
  std::vector<SetOutcome> per_set(sets.size());
  detail::parallel_for(sets.size(), options.jobs,
                       [&](std::size_t i) { per_set[i] = classify_set(g, config, sets[i], options); });

  ClassifyResult result;
  for (auto& s : per_set) {
    result.verdicts.insert(result.verdicts.end(), s.verdicts.begin(), s.verdicts.end());
    accumulate(result.stats, s.stats);
    result.errors.insert(result.errors.end(), s.errors.begin(), s.errors.end());
  }
  return result;
}

DifferentialReport verify_against_oracle(const Cfg& g, const CacheConfig& config,
                                         const ClassifyOptions& options, std::size_t oracle_budget) {
  const ClassifyResult pipeline = classify_all(g, config, options);
  DifferentialReport report;
  std::map<std::uint64_t, CollectingSemantics> oracle;
  for (const auto& fv : pipeline.verdicts) {
    auto it = oracle.find(fv.set_index);
    if (it == oracle.end()) {
      const ProjectedCfg pg = project(g, fv.set_index, config);
      const BlockUniverse universe = BlockUniverse::of(pg);
      const StateSet init =
          initial_states(options.init, universe.size(), config.associativity, oracle_budget);
      it = oracle
               .emplace(fv.set_index, collecting_semantics(pg, universe, init, config.associativity,
                                                           oracle_budget))
               .first;
      report.oracle_pairs += it->second.pairs;
    }
    OracleEntry entry{fv.set_index, fv.access, fv.verdict, fv.provenance,
                      exact_classify(it->second, fv.access), false};
    entry.agrees = entry.pipeline == entry.oracle;
    report.disagreements += !entry.agrees;
    switch (fv.provenance) {
      case Provenance::McCheckAh:
      case Provenance::McCheckAm:
      case Provenance::McRefutedBoth: ++report.mc_resolved; break;
      default: break;
    }
    report.entries.push_back(entry);
  }
  return report;
}

std::vector<std::pair<std::uint64_t, MemoryBlock>> residual_blocks(const ClassifyResult& r) {
  std::set<std::pair<std::uint64_t, MemoryBlock>> out;
  for (const auto& fv : r.verdicts)
    if (fv.provenance != Provenance::Must && fv.provenance != Provenance::May &&
        fv.provenance != Provenance::EhEm)
      out.emplace(fv.set_index, fv.access.block);
  return {out.begin(), out.end()};
}

}  // namespace exactcache
