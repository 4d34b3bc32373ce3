#pragma once

// Two-phase classification driver: abstract interpretation per cache set,
// then the focused reachability engine for whatever the first phase leaves
// open.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "exactcache/cfg.hpp"
#include "exactcache/common.hpp"
#include "exactcache/concrete.hpp"
#include "exactcache/focused.hpp"

namespace exactcache {

enum class Mode {
  AiOnly,    // Must and May verdicts; the rest stay Unknown with their EH/EM flags
  AiMc,      // Must, May, EH and EM, then model checking with the EH/EM flags
  McOnly,    // every access is model checked on the unsimplified model
  AiMcNoDu,  // Must and May only, then model checking without flags
};

enum class Provenance { Must, May, EhEm, McCheckAh, McCheckAm, McRefutedBoth, Unresolved };

inline constexpr std::size_t kProvenanceCount = 7;

std::string_view to_string(Mode m);
Mode parse_mode(std::string_view s);
std::string_view to_string(Provenance p);

struct FinalVerdict {
  std::uint64_t set_index = 0;
  AccessId access;
  Verdict verdict = Verdict::Unknown;
  Provenance provenance = Provenance::Unresolved;
  bool exists_hit = false;
  bool exists_miss = false;
  bool checked_always_hit = false;
  bool checked_always_miss = false;
};

struct PhaseStats {
  std::size_t accesses = 0;
  std::array<std::size_t, kProvenanceCount> by_provenance{};
  std::size_t focused_runs = 0;    // one per (set, block) explored
  std::size_t access_checks = 0;   // accesses handed to the model checker
  std::size_t property_checks = 0; // CheckAH / CheckAM evaluations
  std::size_t states_explored = 0;
  std::size_t dropped_edges = 0;
  std::size_t early_exits = 0;
  double ai_ms = 0;
  double mc_ms = 0;

  std::size_t count(Provenance p) const { return by_provenance[static_cast<std::size_t>(p)]; }
  std::size_t count(Verdict v, const std::vector<FinalVerdict>& verdicts) const;
};

struct ClassifyOptions {
  Mode mode = Mode::AiMc;
  InitMode init = InitMode::Empty;
  std::size_t mc_budget = kDefaultModelCheckBudget;
  bool simplify = true;     // use the may analysis to prune focused models
  bool early_exit = true;  // stop a focused run once every target is refuted
  unsigned jobs = 1;
};

struct ClassifyResult {
  std::vector<FinalVerdict> verdicts;  // by set index, then edge order
  PhaseStats stats;
  std::vector<std::string> errors;  // budget failures; affected accesses stay Unresolved
};

ClassifyResult classify_all(const Cfg& g, const CacheConfig& config, const ClassifyOptions& options);

struct OracleEntry {
  std::uint64_t set_index = 0;
  AccessId access;
  Verdict pipeline = Verdict::Unknown;
  Provenance provenance = Provenance::Unresolved;
  Verdict oracle = Verdict::Unknown;
  bool agrees = false;
};

struct DifferentialReport {
  std::vector<OracleEntry> entries;
  std::size_t disagreements = 0;
  std::size_t mc_resolved = 0;  // residuals of the AI phase settled by model checking
  std::size_t oracle_pairs = 0;
};

/// Runs classify_all and the concrete collecting semantics on every set and
/// compares per-access verdicts. Throws BudgetError(Oracle).
DifferentialReport verify_against_oracle(const Cfg& g, const CacheConfig& config,
                                         const ClassifyOptions& options,
                                         std::size_t oracle_budget = kDefaultOracleBudget);

/// Distinct (set, block) pairs the requested mode hands to the model checker.
std::vector<std::pair<std::uint64_t, MemoryBlock>> residual_blocks(const ClassifyResult& r);

}  // namespace exactcache
