#include "exactcache/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "exactcache/bench.hpp"
#include "exactcache/classify.hpp"
#include "exactcache/report.hpp"

namespace exactcache::cli {

namespace {

namespace fs = std::filesystem;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int log_level() {
  const char* v = std::getenv("CACHE_ORACLE_LOG");
  return v ? std::atoi(v) : 0;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << content) || !out.flush()) throw IoError("cannot write '" + path.string() + "'");
}

void emit(const std::string& out_path, const std::string& content, std::ostream& out) {
  if (out_path.empty() || out_path == "-")
    out << content;
  else
    write_file(out_path, content);
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

/// Fills options absent from the command line with `key = value` lines of
/// the --config file.
void apply_config_file(CLI::App& cmd, const std::string& path) {
  std::istringstream lines(read_file(path));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    const std::string content = trim(line.substr(0, line.find('#')));
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos)
      throw UsageError(path + ":" + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(content.substr(0, eq));
    std::string value = trim(content.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    CLI::Option* opt = cmd.get_option_no_throw("--" + key);
    if (!opt || key == "config")
      throw UsageError(path + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (opt->count() > 0) continue;
    opt->add_result(value);
    opt->run_callback();
  }
}

struct CacheFlags {
  unsigned assoc = 4;
  std::uint64_t sets = 8;
  std::uint64_t block_size = 32;
  std::string init = "empty";
};

void add_cache_flags(CLI::App& cmd, CacheFlags& f) {
  cmd.add_option("--assoc", f.assoc, "associativity (ways per set)")->capture_default_str();
  cmd.add_option("--sets", f.sets, "number of cache sets (power of two)")->capture_default_str();
  cmd.add_option("--block-size", f.block_size, "memory block size in bytes (power of two)")->capture_default_str();
  cmd.add_option("--init", f.init, "initial cache: empty or unknown")->capture_default_str();
}

CacheConfig to_config(const CacheFlags& f) {
  CacheConfig c{f.assoc, f.sets, f.block_size};
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return c;
}

struct AnalysisFlags {
  std::string input;
  CacheFlags cache;
  std::string mode = "ai+mc";
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  std::size_t budget_oracle = kDefaultOracleBudget;
  std::size_t budget_mc = kDefaultModelCheckBudget;
  std::string out;
  std::string config;
  bool timings = false;
};

void add_analysis_flags(CLI::App& cmd, AnalysisFlags& f) {
  cmd.add_option("input", f.input, "CFG JSON file")->required();
  add_cache_flags(cmd, f.cache);
  cmd.add_option("--mode", f.mode, "ai-only, ai+mc, mc-only or ai+mc-no-du")->capture_default_str();
  cmd.add_option("--jobs", f.jobs, "worker threads");
  cmd.add_option("--budget-oracle", f.budget_oracle, "max (vertex, state) pairs of the concrete oracle")
      ->capture_default_str();
  cmd.add_option("--budget-mc", f.budget_mc, "max (vertex, focused state) pairs per focused run")
      ->capture_default_str();
  cmd.add_option("--out", f.out, "output path (stdout when omitted)");
  cmd.add_option("--config", f.config, "key = value file with defaults for these flags");
  cmd.add_flag("--timings", f.timings, "include wall-clock phase times");
}

ClassifyOptions to_options(const AnalysisFlags& f) {
  ClassifyOptions o;
  try {
    o.mode = parse_mode(f.mode);
    o.init = parse_init_mode(f.cache.init);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  o.mc_budget = f.budget_mc;
  o.jobs = std::max(1u, f.jobs);
  return o;
}

Cfg load_cfg(const std::string& path, const CacheConfig& config) {
  return parse_cfg(read_file(path), config);
}

std::string program_name(const Cfg& g, const std::string& path) {
  return g.name().empty() ? fs::path(path).stem().string() : g.name();
}

int analyze(const AnalysisFlags& f, bool with_oracle, std::ostream& out, std::ostream& err) {
  const CacheConfig config = to_config(f.cache);
  const ClassifyOptions options = to_options(f);
  const Cfg g = load_cfg(f.input, config);

  ClassifyResult result;
  std::optional<DifferentialReport> oracle;
  if (with_oracle) {
    oracle = verify_against_oracle(g, config, options, f.budget_oracle);
    result = classify_all(g, config, options);
  } else {
    result = classify_all(g, config, options);
  }
  if (log_level() >= 1)
    err << "exactcache: " << result.stats.accesses << " accesses, " << result.stats.focused_runs
        << " focused runs, " << result.stats.states_explored << " focused states\n";
  if (oracle && log_level() >= 2)
    for (const auto& e : oracle->entries)
      err << "exactcache: " << to_string(e.access, g.vertex_names()) << " pipeline=" << to_string(e.pipeline)
          << " oracle=" << to_string(e.oracle) << "\n";

  ReportInput in{with_oracle ? "verify" : "analyze", f.input, &g, config, options, f.timings};
  const auto doc = build_report(in, result, oracle ? &*oracle : nullptr);
  emit(f.out, doc.dump(2) + "\n", out);

  for (const auto& e : result.errors) err << "exactcache: " << e << "\n";
  if (!result.errors.empty()) return kBudgetError;
  if (oracle && oracle->disagreements > 0) {
    err << "exactcache: " << oracle->disagreements << " disagreement(s) with the oracle\n";
    return kDisagreement;
  }
  return kOk;
}

int export_smv_files(const AnalysisFlags& f, const std::optional<std::uint64_t>& block_flag,
                     std::ostream& out) {
  const CacheConfig config = to_config(f.cache);
  ClassifyOptions options = to_options(f);
  const Cfg g = load_cfg(f.input, config);
  const std::string name = program_name(g, f.input);

  std::vector<std::pair<std::uint64_t, MemoryBlock>> targets;
  if (block_flag) {
    std::set<MemoryBlock> used;
    for (const auto& e : g.edges())
      if (e.block) used.insert(*e.block);
    const MemoryBlock wanted{*block_flag};
    if (!used.count(wanted)) {
      std::string valid;
      for (auto b : used) valid += (valid.empty() ? "" : ", ") + std::to_string(b.index);
      throw UsageError("block " + std::to_string(*block_flag) + " is not accessed; valid blocks: " +
                       (valid.empty() ? "(none)" : valid));
    }
    targets.emplace_back(set_of(wanted, config), wanted);
  } else {
    if (options.mode == Mode::AiOnly) options.mode = Mode::AiMc;
    targets = residual_blocks(classify_all(g, config, options));
  }

  const fs::path dir = f.out.empty() ? fs::path(".") : fs::path(f.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "'");

  SmvContext context{name, config.associativity, config.num_sets, config.block_size, options.init};
  for (const auto& [set_index, block] : targets) {
    const ProjectedCfg pg = project(g, set_index, config);
    const BlockUniverse universe = BlockUniverse::of(pg);
    const std::size_t focus = *universe.slot_of(block);
    FocusedModel model;
    if (options.mode == Mode::McOnly) {
      model = unsimplified_model(pg, universe, focus);
    } else {
      const auto may = fixpoint<MayDomain>(pg, universe, initial_may(options.init, universe.size(),
                                                                      config.associativity),
                                           config.associativity);
      model = simplify_for(pg, universe, focus, may, config.associativity);
    }
    std::vector<AccessId> accesses;
    for (const auto& a : accesses_of(pg))
      if (a.block == block) accesses.push_back(a);
    const fs::path path = dir / smv_file_name(name, set_index, block);
    write_file(path, export_smv(model, universe, config.associativity, context, accesses));
    out << path.string() << "\n";
  }
  return kOk;
}

struct GenFlags {
  GenSpec spec;
  std::size_t count = 1;
  std::string out = ".";
  std::string prefix = "gen";
  std::string config;
};

int gen(const GenFlags& f, std::ostream& out) {
  std::error_code ec;
  fs::create_directories(f.out, ec);
  if (ec) throw IoError("cannot create directory '" + f.out + "'");
  for (std::size_t i = 0; i < f.count; ++i) {
    GenSpec spec = f.spec;
    spec.seed = f.spec.seed + i;
    spec.name = f.prefix + "-" + std::to_string(spec.seed);
    Cfg g;
    try {
      g = generate(spec);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    const fs::path path = fs::path(f.out) / (spec.name + ".json");
    write_file(path, serialize_cfg(g));
    out << path.string() << "\n";
  }
  return kOk;
}

struct BenchFlags {
  std::string corpus;
  std::string modes = "ai-only,ai+mc,mc-only,ai+mc-no-du";
  std::vector<unsigned> assoc{4};
  std::vector<std::uint64_t> sets{8};
  std::vector<std::uint64_t> block_size{32};
  std::string init = "empty";
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  std::size_t budget_mc = kDefaultModelCheckBudget;
  std::string out;
  std::string config;
  bool timings = false;
};

std::uint64_t seed_from_name(const std::string& name) {
  const auto dash = name.find_last_of('-');
  const std::string digits = dash == std::string::npos ? name : name.substr(dash + 1);
  if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit)) return 0;
  return std::stoull(digits);
}

int bench(const BenchFlags& f, std::ostream& out, std::ostream& err) {
  ExperimentOptions options;
  options.modes.clear();
  std::stringstream modes(f.modes);
  try {
    for (std::string m; std::getline(modes, m, ',');)
      if (!trim(m).empty()) options.modes.push_back(parse_mode(trim(m)));
    options.init = parse_init_mode(f.init);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (options.modes.empty()) throw UsageError("--modes is empty");
  options.mc_budget = f.budget_mc;
  options.timings = f.timings;
  options.jobs = std::max(1u, f.jobs);

  std::vector<CacheConfig> configs;
  for (unsigned k : f.assoc)
    for (auto s : f.sets)
      for (auto b : f.block_size) configs.push_back(to_config(CacheFlags{k, s, b, f.init}));

  std::vector<fs::path> files;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(f.corpus, ec))
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  if (ec) throw IoError("cannot list corpus directory '" + f.corpus + "'");
  std::sort(files.begin(), files.end());

  std::vector<CorpusEntry> corpus;
  for (const auto& path : files) {
    Cfg g = load_cfg(path.string(), configs.front());
    const std::string name = program_name(g, path.string());
    corpus.push_back(CorpusEntry{name, seed_from_name(name), std::move(g)});
  }

  const ExperimentResult result = run_experiment(corpus, configs, options);
  emit(f.out, write_csv(result.rows), out);
  for (const auto& e : result.errors) err << "exactcache: " << e << "\n";

  if (!f.out.empty() && f.out != "-") {
    const ExperimentSummary summary = summarize(result.rows);
    out << "rows: " << result.rows.size() << "\n";
    if (summary.comparisons > 0) {
      out << "focused-run ratio without/with DU (geometric mean, zeros removed): ";
      if (summary.geomean_call_ratio)
        out << *summary.geomean_call_ratio;
      else
        out << "n/a";
      out << " over " << summary.comparisons << " program/config pairs, " << summary.zero_with_du
          << " needing no focused run with DU\n";
      if (summary.geomean_time_ratio)
        out << "MC time ratio without/with DU (geometric mean): " << *summary.geomean_time_ratio << "\n";
      out << "published reference: call ratio 22.45, time ratio 3.7\n";
    }
  }
  return result.errors.empty() ? kOk : kBudgetError;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact LRU instruction-cache classification (always-hit / always-miss / definitely-unknown)",
               "exactcache"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  AnalysisFlags analyze_flags;
  auto* analyze_cmd = app.add_subcommand("analyze", "classify every access and write a JSON report");
  add_analysis_flags(*analyze_cmd, analyze_flags);

  AnalysisFlags verify_flags;
  auto* verify_cmd = app.add_subcommand("verify", "compare the pipeline with the concrete oracle");
  add_analysis_flags(*verify_cmd, verify_flags);

  AnalysisFlags smv_flags;
  std::optional<std::uint64_t> smv_block;
  auto* smv_cmd = app.add_subcommand("export-smv", "write NuSMV focused models (one file per block)");
  add_analysis_flags(*smv_cmd, smv_flags);
  smv_cmd->add_option("--block", smv_block, "export only this block index");

  GenFlags gen_flags;
  auto* gen_cmd = app.add_subcommand("gen", "generate a seeded CFG corpus");
  gen_cmd->add_option("--seed", gen_flags.spec.seed, "first seed")->capture_default_str();
  gen_cmd->add_option("--count", gen_flags.count, "number of programs")->capture_default_str();
  gen_cmd->add_option("--out", gen_flags.out, "output directory")->capture_default_str();
  gen_cmd->add_option("--prefix", gen_flags.prefix, "file and program name prefix")->capture_default_str();
  gen_cmd->add_option("--vertices", gen_flags.spec.vertices, "vertex budget")->capture_default_str();
  gen_cmd->add_option("--loops", gen_flags.spec.loops, "loop count")->capture_default_str();
  gen_cmd->add_option("--depth", gen_flags.spec.max_depth, "maximum loop nesting")->capture_default_str();
  gen_cmd->add_option("--blocks", gen_flags.spec.blocks, "distinct memory blocks")->capture_default_str();
  gen_cmd->add_option("--branch-prob", gen_flags.spec.branch_probability)->capture_default_str();
  gen_cmd->add_option("--access-prob", gen_flags.spec.access_probability)->capture_default_str();
  gen_cmd->add_option("--block-size", gen_flags.spec.block_size, "bytes per block")->capture_default_str();
  gen_cmd->add_option("--instruction-size", gen_flags.spec.instruction_size)->capture_default_str();
  gen_cmd->add_option("--config", gen_flags.config, "key = value file with defaults for these flags");

  BenchFlags bench_flags;
  auto* bench_cmd = app.add_subcommand("bench", "run the experiment matrix over a corpus, emit CSV");
  bench_cmd->add_option("--corpus", bench_flags.corpus, "directory of CFG JSON files")->required();
  bench_cmd->add_option("--modes", bench_flags.modes, "comma-separated modes")->capture_default_str();
  bench_cmd->add_option("--assoc", bench_flags.assoc, "associativities")->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--sets", bench_flags.sets, "set counts")->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--block-size", bench_flags.block_size, "block sizes")->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--init", bench_flags.init)->capture_default_str();
  bench_cmd->add_option("--jobs", bench_flags.jobs, "worker threads");
  bench_cmd->add_option("--budget-mc", bench_flags.budget_mc)->capture_default_str();
  bench_cmd->add_option("--out", bench_flags.out, "CSV path (stdout when omitted)");
  bench_cmd->add_option("--config", bench_flags.config, "key = value file with defaults for these flags");
  bench_cmd->add_flag("--timings", bench_flags.timings, "record wall-clock phase times");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (analyze_cmd->parsed()) {
      if (!analyze_flags.config.empty()) apply_config_file(*analyze_cmd, analyze_flags.config);
      return analyze(analyze_flags, false, out, err);
    }
    if (verify_cmd->parsed()) {
      if (!verify_flags.config.empty()) apply_config_file(*verify_cmd, verify_flags.config);
      return analyze(verify_flags, true, out, err);
    }
    if (smv_cmd->parsed()) {
      if (!smv_flags.config.empty()) apply_config_file(*smv_cmd, smv_flags.config);
      return export_smv_files(smv_flags, smv_block, out);
    }
    if (gen_cmd->parsed()) {
      if (!gen_flags.config.empty()) apply_config_file(*gen_cmd, gen_flags.config);
      return gen(gen_flags, out);
    }
    if (bench_cmd->parsed()) {
      if (!bench_flags.config.empty()) apply_config_file(*bench_cmd, bench_flags.config);
      return bench(bench_flags, out, err);
    }
  } catch (const UsageError& e) {
    err << "exactcache: " << e.what() << "\n";
    return kUsage;
  } catch (const CLI::ParseError& e) {
    err << "exactcache: " << e.what() << "\n";
    return kUsage;
  } catch (const CfgParseError& e) {
    err << "exactcache: " << e.what() << "\n";
    return kParseError;
  } catch (const BudgetError& e) {
    err << "exactcache: " << e.what() << "\n";
    return kBudgetError;
  } catch (const IoError& e) {
    err << "exactcache: " << e.what() << "\n";
    return kIoError;
  } catch (const std::length_error& e) {
    err << "exactcache: " << e.what() << "\n";
    return kBudgetError;
  }
  return kUsage;
}

}  // namespace exactcache::cli
