#pragma once

// Seeded structured CFG generator and the experiment harness.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "exactcache/cfg.hpp"
#include "exactcache/classify.hpp"

namespace exactcache {

struct GenSpec {
  std::size_t vertices = 10;       // hard upper bound on |V|
  unsigned loops = 1;
  unsigned max_depth = 1;          // maximum loop nesting depth
  double branch_probability = 0.3;
  std::size_t blocks = 4;          // distinct memory blocks
  double access_probability = 0.8;
  std::uint64_t block_size = 32;
  std::uint64_t instruction_size = 4;
  std::uint64_t seed = 1;
  std::string name;  // defaults to "gen-<seed>"
};

/// Deterministic for a fixed spec. Sequences, diamonds and natural loops
/// (one back edge each, to a header dominating the body); every loop body
/// starts with an access. Throws std::invalid_argument when the loops do
/// not fit the vertex budget.
Cfg generate(const GenSpec& spec);

/// Re-derives every edge's block from its address under `config`.
Cfg rebind(const Cfg& g, const CacheConfig& config);

struct CorpusEntry {
  std::string name;
  std::uint64_t seed = 0;
  Cfg cfg;
};

struct ExperimentRow {
  std::string name;
  std::uint64_t seed = 0;
  unsigned k = 0;
  std::uint64_t sets = 0;
  std::uint64_t block_size = 0;
  std::string mode;
  std::size_t n_access = 0;
  std::size_t n_ah = 0;
  std::size_t n_am = 0;
  std::size_t n_du = 0;
  std::size_t prov_must = 0;
  std::size_t prov_may = 0;
  std::size_t prov_ehem = 0;
  std::size_t prov_mc = 0;
  std::size_t focused_runs = 0;
  std::size_t states_explored = 0;
  std::optional<double> t_ai_ms;  // absent unless timings were requested
  std::optional<double> t_mc_ms;

  bool operator==(const ExperimentRow&) const = default;
};

struct ExperimentOptions {
  std::vector<Mode> modes{Mode::AiOnly, Mode::AiMc, Mode::McOnly, Mode::AiMcNoDu};
  InitMode init = InitMode::Empty;
  std::size_t mc_budget = kDefaultModelCheckBudget;
  bool timings = false;
  unsigned jobs = 1;
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;  // program-major, then config, then mode
  std::vector<std::string> errors;
};

ExperimentResult run_experiment(const std::vector<CorpusEntry>& corpus,
                                const std::vector<CacheConfig>& configs,
                                const ExperimentOptions& options);

struct ExperimentSummary {
  std::size_t comparisons = 0;  // (program, config) pairs with both modes
  std::size_t zero_with_du = 0; // pairs where the DU analysis left nothing to check
  std::optional<double> geomean_call_ratio;  // no-DU / with-DU focused runs, zeros removed
  std::optional<double> geomean_time_ratio;  // no-DU / with-DU MC time, zeros removed
};

ExperimentSummary summarize(const std::vector<ExperimentRow>& rows);

std::string_view csv_header();
std::string write_csv(const std::vector<ExperimentRow>& rows);
/// Throws std::invalid_argument on a malformed table.
std::vector<ExperimentRow> parse_csv(std::string_view text);

}  // namespace exactcache
